#include "dynppr/io.hpp"

#include <charconv>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "dynppr/errors.hpp"

namespace dynppr {

namespace {

std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

template <class T>
T parse_number(const std::string& token, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "invalid number '" + token + "'");
  }
  return value;
}

}  // namespace

void write_scores(std::ostream& out, std::span<const double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] != 0.0) out << i << ' ' << format_double(scores[i]) << '\n';
  }
}

std::vector<double> read_scores(std::istream& in, NodeId n) {
  std::vector<double> scores(n, 0.0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id_token;
    std::string score_token;
    if (!(fields >> id_token >> score_token)) throw ParseError(line_no, "expected 'node score'");
    const auto id = parse_number<NodeId>(id_token, line_no);
    if (id >= n) throw ParseError(line_no, "node " + id_token + " out of range");
    scores[id] = parse_number<double>(score_token, line_no);
  }
  return scores;
}

std::string stats_to_json(const SolverStats& stats) {
  nlohmann::ordered_json j;
  j["pushes"] = stats.pushes;
  j["touched_nodes"] = stats.touched_nodes;
  j["wall_time_s"] = stats.wall_time_s;
  j["initial_residual_l1"] = stats.initial_residual_l1;
  j["final_residual_l1"] = stats.final_residual_l1;
  return j.dump();
}

SolverStats stats_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  SolverStats s;
  s.pushes = j.at("pushes").get<std::uint64_t>();
  s.touched_nodes = j.at("touched_nodes").get<std::uint64_t>();
  s.wall_time_s = j.at("wall_time_s").get<double>();
  s.initial_residual_l1 = j.at("initial_residual_l1").get<double>();
  s.final_residual_l1 = j.at("final_residual_l1").get<double>();
  return s;
}

void write_batch(std::ostream& out, const PerturbationBatch& batch) {
  out << "old_nodes " << batch.old_node_count << '\n';
  out << "[insert_nodes]\n";
  for (std::size_t k = 0; k < batch.inserted_nodes.size(); ++k) {
    const auto& node = batch.inserted_nodes[k];
    out << batch.union_id_of_inserted(k) << " out";
    for (NodeId v : node.out) out << ' ' << v;
    out << " in";
    for (NodeId v : node.in) out << ' ' << v;
    out << '\n';
  }
  out << "[delete_nodes]\n";
  for (NodeId u : batch.deleted_nodes) out << u << '\n';
  out << "[insert_edges]\n";
  for (const Edge& e : batch.inserted_edges) out << e.from << ' ' << e.to << '\n';
  out << "[delete_edges]\n";
  for (const Edge& e : batch.deleted_edges) out << e.from << ' ' << e.to << '\n';
}

PerturbationBatch read_batch(std::istream& in) {
  enum class Section { kHeader, kInsertNodes, kDeleteNodes, kInsertEdges, kDeleteEdges };
  PerturbationBatch batch;
  Section section = Section::kHeader;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line == "[insert_nodes]") { section = Section::kInsertNodes; continue; }
    if (line == "[delete_nodes]") { section = Section::kDeleteNodes; continue; }
    if (line == "[insert_edges]") { section = Section::kInsertEdges; continue; }
    if (line == "[delete_edges]") { section = Section::kDeleteEdges; continue; }

    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    auto id = [&](std::size_t i) { return parse_number<NodeId>(tokens.at(i), line_no); };
    switch (section) {
      case Section::kHeader:
        if (tokens.size() != 2 || tokens[0] != "old_nodes") {
          throw ParseError(line_no, "expected 'old_nodes N' header");
        }
        batch.old_node_count = id(1);
        have_header = true;
        break;
      case Section::kInsertNodes: {
        if (tokens.size() < 3 || tokens[1] != "out") {
          throw ParseError(line_no, "expected '<id> out ... in ...'");
        }
        if (id(0) != batch.union_id_of_inserted(batch.inserted_nodes.size())) {
          throw ParseError(line_no, "inserted nodes must be listed in order");
        }
        PerturbationBatch::InsertedNode node;
        bool in_list = false;
        for (std::size_t i = 2; i < tokens.size(); ++i) {
          if (tokens[i] == "in") {
            if (in_list) throw ParseError(line_no, "duplicate 'in'");
            in_list = true;
            continue;
          }
          (in_list ? node.in : node.out).push_back(id(i));
        }
        if (!in_list) throw ParseError(line_no, "missing 'in' list");
        batch.inserted_nodes.push_back(std::move(node));
        break;
      }
      case Section::kDeleteNodes:
        if (tokens.size() != 1) throw ParseError(line_no, "expected one node ID");
        batch.deleted_nodes.push_back(id(0));
        break;
      case Section::kInsertEdges:
      case Section::kDeleteEdges:
        if (tokens.size() != 2) throw ParseError(line_no, "expected 'u v'");
        (section == Section::kInsertEdges ? batch.inserted_edges : batch.deleted_edges)
            .push_back({id(0), id(1)});
        break;
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'old_nodes' header");
  return batch;
}

std::string plan_to_json(const PerturbPlan& plan) {
  nlohmann::ordered_json j;
  j["insert_nodes"] = plan.insert_nodes;
  j["delete_nodes"] = plan.delete_nodes;
  j["insert_edge_fraction"] = plan.insert_edge_fraction;
  j["delete_edge_fraction"] = plan.delete_edge_fraction;
  j["rng_seed"] = plan.rng_seed;
  return j.dump(2);
}

PerturbPlan plan_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PerturbPlan plan;
  plan.insert_nodes = j.at("insert_nodes").get<std::uint64_t>();
  plan.delete_nodes = j.at("delete_nodes").get<std::uint64_t>();
  plan.insert_edge_fraction = j.at("insert_edge_fraction").get<double>();
  plan.delete_edge_fraction = j.at("delete_edge_fraction").get<double>();
  plan.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return plan;
}

}  // namespace dynppr
