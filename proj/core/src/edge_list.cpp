#include "dynppr/edge_list.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "dynppr/errors.hpp"

namespace dynppr {

namespace {

constexpr std::size_t kChunkSize = 1 << 22;
constexpr char kBinaryMagic[8] = {'D', 'P', 'P', 'R', 'C', 'S', 'R', '\0'};
constexpr std::uint32_t kBinaryVersion = 1;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

class LineParser {
 public:
  explicit LineParser(LoadStats& stats) : stats_(stats) {}

  void parse(std::string_view line, std::vector<Edge>& edges) {
    ++stats_.lines;
    std::size_t i = 0;
    while (i < line.size() && is_space(line[i])) ++i;
    if (i == line.size()) return;
    if (line[i] == '#') {
      ++stats_.comment_lines;
      return;
    }
    NodeId ids[2];
    for (NodeId& id : ids) {
      while (i < line.size() && is_space(line[i])) ++i;
      if (i == line.size()) throw ParseError(stats_.lines, "expected two node IDs");
      const char* first = line.data() + i;
      const char* last = line.data() + line.size();
      auto [ptr, ec] = std::from_chars(first, last, id);
      if (ec != std::errc() || (ptr != last && !is_space(*ptr)) || id == kNoNode) {
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        throw ParseError(stats_.lines,
                         "invalid node ID '" + std::string(line.substr(i, j - i)) + "'");
      }
      i = static_cast<std::size_t>(ptr - line.data());
    }
    while (i < line.size() && is_space(line[i])) ++i;
    if (i != line.size()) throw ParseError(stats_.lines, "trailing tokens after edge");
    edges.push_back({ids[0], ids[1]});
  }

 private:
  LoadStats& stats_;
};

}  // namespace

Graph load_edge_list(std::istream& in, const LoadOptions& options, LoadStats* stats_out) {
  LoadStats stats;
  LineParser parser(stats);
  std::vector<Edge> edges;

  std::vector<char> buffer(kChunkSize);
  std::string carry;
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got == 0) break;
    std::string_view chunk(buffer.data(), got);
    std::size_t start = 0;
    while (true) {
      const auto nl = chunk.find('\n', start);
      if (nl == std::string_view::npos) {
        carry.append(chunk.substr(start));
        break;
      }
      if (carry.empty()) {
        parser.parse(chunk.substr(start, nl - start), edges);
      } else {
        carry.append(chunk.substr(start, nl - start));
        parser.parse(carry, edges);
        carry.clear();
      }
      start = nl + 1;
    }
  }
  if (!carry.empty()) parser.parse(carry, edges);

  if (options.undirected) {
    const auto directed = edges.size();
    edges.reserve(directed * 2);
    for (std::size_t i = 0; i < directed; ++i) {
      if (edges[i].from != edges[i].to) edges.push_back({edges[i].to, edges[i].from});
    }
  }
  stats.raw_edges = edges.size();

  NodeId node_count = 0;
  if (options.compact_ids) {
    std::vector<NodeId> ids;
    ids.reserve(edges.size() * 2);
    for (const Edge& e : edges) {
      ids.push_back(e.from);
      ids.push_back(e.to);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto rank = [&](NodeId id) {
      return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    for (Edge& e : edges) e = {rank(e.from), rank(e.to)};
    node_count = static_cast<NodeId>(ids.size());
  } else {
    for (const Edge& e : edges) node_count = std::max({node_count, e.from + 1, e.to + 1});
  }

  Graph g = Graph::from_edges(node_count, std::move(edges));
  stats.nodes = g.node_count();
  stats.edges = g.edge_count();
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (g.has_edge(u, u)) ++stats.self_loops;
  }
  if (stats_out != nullptr) *stats_out = stats;
  return g;
}

Graph load_edge_list_file(const std::string& path, const LoadOptions& options,
                          LoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  return load_edge_list(in, options, stats);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.out(u)) out << u << ' ' << v << '\n';
  }
}

void save_binary(const std::string& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  const std::uint64_t n = g.node_count();
  const std::uint64_t m = g.edge_count();
  out.write(kBinaryMagic, sizeof kBinaryMagic);
  out.write(reinterpret_cast<const char*>(&kBinaryVersion), sizeof kBinaryVersion);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  std::vector<std::uint64_t> offsets(g.offsets().begin(), g.offsets().end());
  out.write(reinterpret_cast<const char*>(offsets.data()),
            static_cast<std::streamsize>(offsets.size() * sizeof(std::uint64_t)));
  out.write(reinterpret_cast<const char*>(g.targets().data()),
            static_cast<std::streamsize>(m * sizeof(NodeId)));
  if (!out) throw Error("short write to '" + path + "'");
}

Graph load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  if (!in || std::memcmp(magic, kBinaryMagic, sizeof magic) != 0) {
    throw ValidationError("'" + path + "' is not a graph cache");
  }
  if (version != kBinaryVersion) {
    throw ValidationError("unsupported graph cache version " + std::to_string(version));
  }
  std::vector<std::uint64_t> raw(n + 1);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  std::vector<NodeId> targets(m);
  in.read(reinterpret_cast<char*>(targets.data()),
          static_cast<std::streamsize>(m * sizeof(NodeId)));
  if (!in) throw ValidationError("truncated graph cache '" + path + "'");
  return Graph::from_csr(std::vector<std::size_t>(raw.begin(), raw.end()), std::move(targets));
}

}  // namespace dynppr
