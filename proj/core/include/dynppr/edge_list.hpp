#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "dynppr/graph.hpp"

namespace dynppr {

struct LoadOptions {
  bool compact_ids = false;  // relabel the IDs that occur to 0..k-1, keeping their order
  bool undirected = false;   // ingest every line as two arcs
};

struct LoadStats {
  std::size_t lines = 0;
  std::size_t comment_lines = 0;
  std::size_t raw_edges = 0;  // arcs before deduplication
  std::size_t edges = 0;      // arcs after deduplication
  std::size_t self_loops = 0;
  NodeId nodes = 0;
};

// SNAP-style text: one "u v" pair per line, '#' starts a comment line.
Graph load_edge_list(std::istream& in, const LoadOptions& options = {},
                     LoadStats* stats = nullptr);
Graph load_edge_list_file(const std::string& path, const LoadOptions& options = {},
                          LoadStats* stats = nullptr);

void write_edge_list(std::ostream& out, const Graph& g);

// Versioned binary adjacency cache.
void save_binary(const std::string& path, const Graph& g);
Graph load_binary(const std::string& path);

}  // namespace dynppr
