#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "dynppr/batch.hpp"
#include "dynppr/edge_list.hpp"
#include "dynppr/errors.hpp"
#include "dynppr/graph.hpp"
#include "dynppr/perturb.hpp"
#include "oracles.hpp"

using namespace dynppr;

namespace {

Graph parse(const std::string& text, LoadOptions opts = {}, LoadStats* stats = nullptr) {
  std::istringstream in(text);
  return load_edge_list(in, opts, stats);
}

std::vector<NodeId> row_of(const Graph& g, NodeId u, NodeId s) {
  std::vector<NodeId> out;
  for (NodeId v : out_neighbors_effective(g, u, s)) out.push_back(v);
  return out;
}

}  // namespace

TEST(Graph, FromEdgesSortsAndDeduplicates) {
  const Graph g = Graph::from_edges(3, {{0, 2}, {0, 1}, {0, 2}, {2, 2}});
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(std::vector<NodeId>(g.out(0).begin(), g.out(0).end()), (std::vector<NodeId>{1, 2}));
  EXPECT_EQ(g.out_degree(1), 0u);
  EXPECT_TRUE(g.has_edge(2, 2));
  EXPECT_FALSE(g.has_edge(1, 0));
}

TEST(Graph, EdgeCountIsSumOfOutDegrees) {
  Rng rng(3);
  const Graph g = random_digraph(150, 5.0, rng);
  std::size_t sum = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) sum += g.out_degree(u);
  EXPECT_EQ(sum, g.edge_count());
}

TEST(Graph, RejectsOutOfRangeEndpoints) {
  EXPECT_THROW(Graph::from_edges(2, {{0, 2}}), ValidationError);
  EXPECT_THROW(Graph::from_csr({0, 2}, {0}), ValidationError);
}

TEST(EffectiveRow, StoredNeighbors) {
  const Graph g = Graph::from_edges(3, {{0, 1}, {0, 2}});
  const auto row = out_neighbors_effective(g, 0, 1);
  EXPECT_EQ(row.degree(), 2u);
  EXPECT_EQ(row_of(g, 0, 1), (std::vector<NodeId>{1, 2}));
}

TEST(EffectiveRow, DanglingPointsToSource) {
  const Graph g = Graph::from_edges(3, {{0, 1}});
  const auto row = out_neighbors_effective(g, 2, 0);
  EXPECT_TRUE(row.dangling());
  EXPECT_EQ(row.degree(), 1u);
  EXPECT_EQ(row_of(g, 2, 0), (std::vector<NodeId>{0}));
}

TEST(EffectiveRow, DanglingSourceRestartsOnItself) {
  const Graph g = Graph::from_edges(2, {{1, 0}});
  EXPECT_EQ(row_of(g, 0, 0), (std::vector<NodeId>{0}));
}

TEST(EffectiveRow, RowsAreStochastic) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Graph g = random_digraph(60, 2.0, rng);
    const NodeId s = static_cast<NodeId>(rng.below(60));
    for (NodeId u = 0; u < g.node_count(); ++u) {
      const auto row = out_neighbors_effective(g, u, s);
      double sum = 0.0;
      for ([[maybe_unused]] NodeId v : row) sum += row.weight();
      EXPECT_NEAR(sum, 1.0, 1e-15);
    }
  }
}

TEST(EdgeList, CommentsAndBasicPairs) {
  LoadStats stats;
  const Graph g = parse("# c\n0 1\n1 2\n", {}, &stats);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(stats.comment_lines, 1u);
}

TEST(EdgeList, DuplicatesCollapse) {
  LoadStats stats;
  const Graph g = parse("0 1\n0 1\n", {}, &stats);
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(stats.raw_edges, 2u);
  EXPECT_EQ(stats.edges, 1u);
}

TEST(EdgeList, EmptyInputIsEmptyGraph) {
  const Graph g = parse("");
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(EdgeList, WhitespaceTabsAndCrlf) {
  const Graph g = parse("  0\t1\r\n\n2   0\r\n# x\r\n");
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(2, 0));
}

TEST(EdgeList, RawIdsExtendDensely) {
  const Graph g = parse("5 7\n");
  EXPECT_EQ(g.node_count(), 8u);
  EXPECT_TRUE(g.has_edge(5, 7));
}

TEST(EdgeList, CompactIdsKeepOrder) {
  const Graph g = parse("50 70\n70 10\n", {.compact_ids = true});
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_TRUE(g.has_edge(2, 0));
}

TEST(EdgeList, UndirectedAddsBothArcs) {
  const Graph g = parse("0 1\n", {.undirected = true});
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 0));
}

TEST(EdgeList, SelfLoopKeptAndCounted) {
  LoadStats stats;
  const Graph g = parse("0 0\n0 1\n", {}, &stats);
  EXPECT_EQ(g.out_degree(0), 2u);
  EXPECT_EQ(stats.self_loops, 1u);
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    parse("0 1\n# ok\n1 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("0 1 2\n"), ParseError);
  EXPECT_THROW(parse("0\n"), ParseError);
  EXPECT_THROW(parse("-1 2\n"), ParseError);
}

TEST(EdgeList, TextAndBinaryRoundTrip) {
  Rng rng(5);
  const Graph g = random_digraph(300, 4.0, rng);
  std::stringstream text;
  write_edge_list(text, g);
  EXPECT_EQ(load_edge_list(text), g);

  const auto path = std::filesystem::temp_directory_path() / "dynppr_graph_test.bin";
  save_binary(path.string(), g);
  EXPECT_EQ(load_binary(path.string()), g);
  std::filesystem::remove(path);
}

TEST(Batch, EmptyBatchIsIdentity) {
  const Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  PerturbationBatch b;
  b.old_node_count = 4;
  const auto result = apply_batch(g, b);
  EXPECT_EQ(result.graph, g);
  EXPECT_EQ(result.id_map, IdMap::identity(4));
  EXPECT_TRUE(changed_rows(g, result.graph, result.id_map, 0, 0).empty());
}

// Six nodes 0..5; insert two nodes, delete two, modify survivor links.
TEST(Batch, ToyScenarioMatchesHandCount) {
  const Graph g = Graph::from_edges(
      6, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 0}, {3, 4}, {4, 5}, {5, 0}, {5, 3}});
  PerturbationBatch b;
  b.old_node_count = 6;
  b.deleted_nodes = {3, 4};
  b.inserted_nodes = {{{0, 7}, {2}}, {{5}, {}}};  // node 6: ->0, ->7, 2->; node 7: ->5
  b.inserted_edges = {{1, 0}};
  b.deleted_edges = {{0, 2}};
  const auto result = apply_batch(g, b);
  // survivors 0,1,2,5 -> 0,1,2,3; inserted 6,7 -> 4,5
  EXPECT_EQ(result.graph.node_count(), 6u);
  const std::set<std::pair<NodeId, NodeId>> expected = {
      {0, 1}, {1, 2}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {4, 5}, {2, 4}, {5, 3}};
  EXPECT_EQ(oracle::edge_set(result.graph, [](NodeId u) { return u; }), expected);
  EXPECT_EQ(result.id_map.to_new(5), 3u);
  EXPECT_TRUE(result.id_map.is_deleted(3));
  EXPECT_TRUE(result.id_map.is_inserted(4));
  EXPECT_EQ(result.id_map.new_count(), 6u + 2u - 2u);
}

TEST(Batch, DeletedNodeDisappearsFromAdjacency) {
  const Graph g = Graph::from_edges(4, {{0, 2}, {1, 2}, {2, 3}, {3, 2}});
  PerturbationBatch b;
  b.old_node_count = 4;
  b.deleted_nodes = {2};
  const auto result = apply_batch(g, b);
  for (NodeId u = 0; u < result.graph.node_count(); ++u) {
    EXPECT_TRUE(result.graph.out(u).empty());
  }
}

TEST(Batch, ValidationErrors) {
  const Graph g = Graph::from_edges(3, {{0, 1}});
  PerturbationBatch b;
  b.old_node_count = 3;
  b.deleted_nodes = {5};
  EXPECT_THROW(apply_batch(g, b), ValidationError);

  b = {};
  b.old_node_count = 3;
  b.deleted_nodes = {2};
  b.inserted_edges = {{1, 2}};
  EXPECT_THROW(apply_batch(g, b), ValidationError);

  b = {};
  b.old_node_count = 3;
  b.deleted_edges = {{1, 0}};  // not an old edge
  EXPECT_THROW(apply_batch(g, b), ValidationError);

  b = {};
  b.old_node_count = 3;
  b.inserted_edges = {{0, 1}};  // already present
  EXPECT_THROW(apply_batch(g, b), ValidationError);

  b = {};
  b.old_node_count = 3;
  b.inserted_edges = {{0, 2}};
  b.deleted_edges = {{0, 2}};
  EXPECT_THROW(apply_batch(g, b), ValidationError);
}

TEST(ChangedRows, DeleteOneOfSeveralEdges) {
  const Graph g = Graph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  PerturbationBatch b;
  b.old_node_count = 3;
  b.deleted_edges = {{0, 1}};
  const auto r = apply_batch(g, b);
  EXPECT_EQ(changed_rows(g, r.graph, r.id_map, 2, 2), (std::vector<NodeId>{0}));
}

TEST(ChangedRows, LosingLastEdgeMakesRowDangling) {
  const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}});
  PerturbationBatch b;
  b.old_node_count = 3;
  b.deleted_edges = {{1, 2}};
  const auto r = apply_batch(g, b);
  EXPECT_EQ(changed_rows(g, r.graph, r.id_map, 0, 0), (std::vector<NodeId>{1}));
}

TEST(ChangedRows, DanglingToSourceEqualsExplicitEdgeToSource) {
  // Node 1 swaps its patched row {0} for an explicit edge to 0: same row.
  const Graph g = Graph::from_edges(3, {{0, 1}, {2, 1}});
  PerturbationBatch b;
  b.old_node_count = 3;
  b.inserted_edges = {{1, 0}};
  const auto r = apply_batch(g, b);
  EXPECT_TRUE(changed_rows(g, r.graph, r.id_map, 0, 0).empty());
  EXPECT_EQ(structurally_changed_rows(g, r.graph, r.id_map), (std::vector<NodeId>{1}));
}

TEST(ChangedRows, MatchesBruteForceOnRandomBatches) {
  Rng rng(2024);
  for (int t = 0; t < 50; ++t) {
    const Graph g = random_digraph(static_cast<NodeId>(20 + rng.below(180)), 1 + 6 * rng.unit(), rng);
    const NodeId s = static_cast<NodeId>(rng.below(g.node_count()));
    const auto b = random_node_batch(g, rng.below(5), rng.below(5), rng.below(20), 3.0, s, rng);
    const auto r = apply_batch(g, b);
    const NodeId s_new = r.id_map.to_new(s);
    const auto p_old = oracle::transition(g, s);
    const auto p_new = oracle::transition(r.graph, s_new);
    std::vector<NodeId> brute;
    for (NodeId u = 0; u < g.node_count(); ++u) {
      if (r.id_map.is_deleted(u)) continue;
      std::map<NodeId, double> a;
      std::map<NodeId, double> c;
      for (NodeId v = 0; v < g.node_count(); ++v) {
        if (p_old[u][v] == 0.0) continue;
        a[r.id_map.is_deleted(v) ? kNoNode - v : r.id_map.to_new(v)] = p_old[u][v];
      }
      const NodeId un = r.id_map.to_new(u);
      for (NodeId v = 0; v < r.graph.node_count(); ++v) {
        if (p_new[un][v] != 0.0) c[v] = p_new[un][v];
      }
      if (a != c) brute.push_back(u);
    }
    EXPECT_EQ(changed_rows(g, r.graph, r.id_map, s, s_new), brute) << "trial " << t;
  }
}

TEST(Batch, ReverseRecoversOriginal) {
  Rng rng(77);
  for (int t = 0; t < 30; ++t) {
    const Graph g = random_digraph(static_cast<NodeId>(10 + rng.below(100)), 3.0, rng);
    const auto b = random_node_batch(g, rng.below(4), rng.below(4), rng.below(15), 2.0, 0, rng);
    const auto fwd = apply_batch(g, b);
    const auto back = apply_batch(fwd.graph, reverse_batch(g, b, fwd));
    ASSERT_EQ(back.graph.node_count(), g.node_count());
    ASSERT_EQ(back.graph.edge_count(), g.edge_count());
    // Survivors compose through both maps; deleted nodes come back as the
    // reverse batch's inserted nodes, in ascending old-ID order.
    std::vector<NodeId> compose(g.node_count());
    NodeId k = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
      compose[u] = fwd.id_map.is_deleted(u) ? back.id_map.survivor_count() + k++
                                            : back.id_map.to_new(fwd.id_map.to_new(u));
    }
    EXPECT_EQ(oracle::edge_set(g, [&](NodeId u) { return compose[u]; }),
              oracle::edge_set(back.graph, [](NodeId u) { return u; }));
  }
}

TEST(IdMap, CountsAndValidation) {
  const auto m = IdMap::from_old_to_new({0, kNoNode, 1}, 3);
  EXPECT_EQ(m.deleted(), (std::vector<NodeId>{1}));
  EXPECT_EQ(m.inserted(), (std::vector<NodeId>{2}));
  EXPECT_EQ(m.survivor_count(), 2u);
  EXPECT_TRUE(m.has_node_changes());
  EXPECT_THROW(IdMap::from_old_to_new({0, 0}, 2), ValidationError);
  EXPECT_THROW(IdMap::from_old_to_new({0, 5}, 2), ValidationError);
}
