#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "scalowork/graph.hpp"

using namespace scalowork;

namespace {

std::set<Edge> edge_set(const Graph& g) {
  auto e = g.edges();
  return {e.begin(), e.end()};
}

bool connected(const Graph& g) {
  if (g.vertex_count() == 0) return true;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : g.neighbors(v)) {
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == g.vertex_count();
}

}  // namespace

TEST(Graph, FromEdgesRejectsBadInput) {
  EXPECT_THROW(Graph::from_edges(3, std::vector<Edge>{{0, 3}}), ParameterError);
  EXPECT_THROW(Graph::from_edges(3, std::vector<Edge>{{1, 1}}), ParameterError);
  EXPECT_THROW(Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 0}}), ParameterError);
}

TEST(Graph, NeighborsSortedAndSymmetric) {
  auto g = Graph::from_edges(4, std::vector<Edge>{{3, 0}, {0, 1}, {2, 0}});
  auto nb = g.neighbors(0);
  EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
  EXPECT_EQ(g.degree(0), 3u);
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(1, 2));
  EXPECT_EQ(g.edge_count(), 3u);
}

TEST(Generators, BaTreeWithSingleAttachment) {
  auto g = generate_ba(5, 1, 7);
  EXPECT_EQ(g.vertex_count(), 5u);
  EXPECT_EQ(g.edge_count(), 4u);
  EXPECT_TRUE(connected(g));
}

TEST(Generators, BaTriangle) {
  auto g = generate_ba(3, 2, 1);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(edge_set(g), (std::set<Edge>{{0, 1}, {0, 2}, {1, 2}}));
}

TEST(Generators, BaEdgeCountFormula) {
  for (std::size_t attach : {1u, 2u, 3u, 5u}) {
    const std::size_t n = 100;
    auto g = generate_ba(n, attach, 11);
    EXPECT_EQ(g.edge_count(), attach * (n - attach) + attach * (attach - 1) / 2) << "attach=" << attach;
    EXPECT_GE(properties(g).delta_min, attach);
  }
}

TEST(Generators, BaRejectsBadParameters) {
  EXPECT_THROW(generate_ba(3, 0, 1), ParameterError);
  EXPECT_THROW(generate_ba(3, 3, 1), ParameterError);
}

TEST(Generators, ErComplete) {
  auto g = generate_er(4, 1.0, 3);
  EXPECT_EQ(g.edge_count(), 6u);
  EXPECT_EQ(g, make_complete(4));
}

TEST(Generators, ErEmptyAtZero) { EXPECT_EQ(generate_er(10, 0.0, 3).edge_count(), 0u); }

TEST(Generators, ErEdgeCountWithinFiveSigma) {
  auto g = generate_er(1000, 0.05, 42);
  const double pairs = 1000.0 * 999.0 / 2.0;
  const double mean = pairs * 0.05;
  const double sigma = std::sqrt(pairs * 0.05 * 0.95);
  EXPECT_LT(std::abs(static_cast<double>(g.edge_count()) - mean), 5 * sigma);
}

TEST(Generators, ErRejectsBadProbability) {
  EXPECT_THROW(generate_er(10, -0.1, 1), ParameterError);
  EXPECT_THROW(generate_er(10, 1.5, 1), ParameterError);
}

TEST(Generators, SeededDeterminism) {
  EXPECT_EQ(generate_ba(200, 4, 9), generate_ba(200, 4, 9));
  EXPECT_EQ(generate_er(200, 0.1, 9), generate_er(200, 0.1, 9));
  EXPECT_NE(generate_ba(200, 4, 9), generate_ba(200, 4, 10));
}

TEST(Properties, Star) {
  auto p = properties(make_star(5));
  EXPECT_EQ(p.n, 6u);
  EXPECT_EQ(p.m, 5u);
  EXPECT_EQ(p.delta_min, 1u);
  EXPECT_EQ(p.delta_max, 5u);
}

TEST(Properties, EmptyVertexSetThrows) { EXPECT_THROW(properties(Graph{}), ParameterError); }

TEST(Relabel, PathUnderMapping) {
  auto g = make_path(3);
  auto h = relabel(g, VertexPermutation({2, 0, 1}));
  EXPECT_EQ(edge_set(h), (std::set<Edge>{{0, 2}, {0, 1}}));
}

TEST(Relabel, PreservesAdjacencyAndProperties) {
  auto g = generate_ba(60, 3, 5);
  auto iso = make_isomorph(g, 77);
  EXPECT_EQ(properties(iso.graph), properties(g));
  for (const auto& [u, v] : g.edges()) EXPECT_TRUE(iso.graph.has_edge(iso.mapping(u), iso.mapping(v)));
  EXPECT_EQ(relabel(iso.graph, iso.mapping.inverse()), g);
}

TEST(Relabel, RejectsNonBijection) {
  EXPECT_THROW(VertexPermutation({0, 0, 1}), ParameterError);
  EXPECT_THROW(relabel(make_path(3), VertexPermutation::identity(4)), ParameterError);
}

TEST(InstancePool, IsomorphsDifferAndShareProperties) {
  auto g = generate_ba(50, 2, 3);
  auto pool = make_instance_pool(g, 8, 99);
  ASSERT_EQ(pool.size(), 8u);
  std::set<std::vector<Vertex>> mappings;
  for (const auto& iso : pool) {
    EXPECT_EQ(properties(iso.graph), properties(g));
    mappings.insert(iso.mapping.mapping());
  }
  EXPECT_EQ(mappings.size(), 8u);
  EXPECT_THROW(make_instance_pool(g, 0, 1), ParameterError);
}

TEST(TextFormat, RoundTrip) {
  auto g = generate_er(40, 0.2, 5);
  EXPECT_EQ(parse_graph(to_text(g)), g);
  EXPECT_EQ(to_text(make_path(3)), "3 2\n0 1\n1 2\n");
}

TEST(TextFormat, ErrorsCarryLineNumber) {
  try {
    parse_graph("3 2\n0 1\n1 x\n");
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
  EXPECT_THROW(parse_graph("3 2\n0 1\n"), DecodeError);
  EXPECT_THROW(parse_graph("3 1\n0 5\n"), DecodeError);
}

TEST(TextFormat, GzipFileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "scalowork_graph_test";
  std::filesystem::create_directories(dir);
  auto g = generate_ba(300, 3, 8);
  const auto plain = (dir / "g.txt").string();
  const auto packed = (dir / "g.txt.gz").string();
  write_graph_file(plain, g);
  write_graph_file(packed, g, true);
  EXPECT_EQ(read_graph_file(plain), g);
  EXPECT_EQ(read_graph_file(packed, true), g);
  EXPECT_LT(std::filesystem::file_size(packed), std::filesystem::file_size(plain));
  std::filesystem::remove_all(dir);
}
