#pragma once

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scalowork/errors.hpp"
#include "scalowork/random.hpp"

namespace scalowork {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Immutable undirected simple graph on vertices 0..n-1, stored as CSR.
/// Neighbor lists are sorted ascending and never contain the owner vertex.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  /// Builds a graph from an edge list. Each unordered pair may appear once;
  /// self-loops, duplicates and out-of-range endpoints are rejected.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges) {
    if (n > std::size_t{0xFFFFFFFFu}) throw ParameterError("vertex count exceeds 32-bit labels");
    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
      if (u >= n || v >= n) {
        throw ParameterError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                             ") out of range for n=" + std::to_string(n));
      }
      if (u == v) throw ParameterError("self-loop at vertex " + std::to_string(u));
      ++g.offsets_[u + 1];
      ++g.offsets_[v + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.adjacency_.resize(g.offsets_.back());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
      g.adjacency_[cursor[u]++] = v;
      g.adjacency_[cursor[v]++] = u;
    }
    for (std::size_t v = 0; v < n; ++v) {
      auto first = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]);
      auto last = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]);
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last) {
        throw ParameterError("duplicate edge at vertex " + std::to_string(v));
      }
    }
    g.edge_count_ = edges.size();
    return g;
  }

  static Graph from_edges(std::size_t n, const std::vector<Edge>& edges) {
    return from_edges(n, std::span<const Edge>(edges));
  }

  std::size_t vertex_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adjacency_.data() + offsets_[v], degree(v)};
  }

  bool has_edge(Vertex u, Vertex v) const noexcept {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Canonical edge list: u < v, sorted lexicographically.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (Vertex u = 0; u < vertex_count(); ++u) {
      for (Vertex v : neighbors(u)) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  std::vector<std::size_t> degree_sequence() const {
    std::vector<std::size_t> d(vertex_count());
    for (Vertex v = 0; v < vertex_count(); ++v) d[v] = degree(v);
    return d;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> adjacency_;
  std::size_t edge_count_ = 0;
};

struct GraphProperties {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t delta_min = 0;  // δ
  std::size_t delta_max = 0;  // Δ

  double avg_degree() const { return n == 0 ? 0.0 : 2.0 * static_cast<double>(m) / static_cast<double>(n); }

  friend bool operator==(const GraphProperties&, const GraphProperties&) = default;
};

inline GraphProperties properties(const Graph& g) {
  if (g.vertex_count() == 0) throw ParameterError("properties of an empty vertex set");
  GraphProperties p;
  p.n = g.vertex_count();
  p.m = g.edge_count();
  p.delta_min = g.degree(0);
  p.delta_max = g.degree(0);
  for (Vertex v = 1; v < p.n; ++v) {
    p.delta_min = std::min(p.delta_min, g.degree(v));
    p.delta_max = std::max(p.delta_max, g.degree(v));
  }
  return p;
}

/// Bijection on 0..n-1. Relabeling sends vertex v of the source graph to
/// mapping[v] in the isomorph.
class VertexPermutation {
 public:
  VertexPermutation() = default;

  explicit VertexPermutation(std::vector<Vertex> mapping) : mapping_(std::move(mapping)) {
    std::vector<char> seen(mapping_.size(), 0);
    for (Vertex x : mapping_) {
      if (x >= mapping_.size() || seen[x]) throw ParameterError("mapping is not a bijection");
      seen[x] = 1;
    }
  }

  static VertexPermutation identity(std::size_t n) {
    std::vector<Vertex> m(n);
    std::iota(m.begin(), m.end(), Vertex{0});
    return VertexPermutation(std::move(m));
  }

  std::size_t size() const noexcept { return mapping_.size(); }
  Vertex operator()(Vertex v) const noexcept { return mapping_[v]; }
  const std::vector<Vertex>& mapping() const noexcept { return mapping_; }

  VertexPermutation inverse() const {
    std::vector<Vertex> inv(mapping_.size());
    for (std::size_t v = 0; v < mapping_.size(); ++v) inv[mapping_[v]] = static_cast<Vertex>(v);
    return VertexPermutation(std::move(inv));
  }

  friend bool operator==(const VertexPermutation&, const VertexPermutation&) = default;

 private:
  std::vector<Vertex> mapping_;
};

inline Graph relabel(const Graph& g, const VertexPermutation& f) {
  if (f.size() != g.vertex_count()) throw ParameterError("permutation size differs from vertex count");
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& [u, v] : g.edges()) edges.emplace_back(f(u), f(v));
  return Graph::from_edges(g.vertex_count(), edges);
}

struct Isomorph {
  Graph graph;
  VertexPermutation mapping;  // source vertex -> isomorph vertex
};

inline VertexPermutation random_permutation(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vertex> m(n);
  std::iota(m.begin(), m.end(), Vertex{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(m[i - 1], m[uniform_below(rng, i)]);
  }
  return VertexPermutation(std::move(m));
}

inline Isomorph make_isomorph(const Graph& g, std::uint64_t seed) {
  auto f = random_permutation(g.vertex_count(), seed);
  auto h = relabel(g, f);
  return {std::move(h), std::move(f)};
}

/// z isomorphs with independent permutations. The mappings stay with the
/// caller (the utility side); only the graphs are published.
inline std::vector<Isomorph> make_instance_pool(const Graph& g, std::size_t z, std::uint64_t seed) {
  if (z == 0) throw ParameterError("instance count z must be at least 1");
  std::vector<Isomorph> pool;
  pool.reserve(z);
  for (std::size_t i = 0; i < z; ++i) pool.push_back(make_isomorph(g, derive_seed(seed, i)));
  return pool;
}

// ---------------------------------------------------------------------------
// Generators

/// Barabási-Albert preferential attachment. The first `attach` vertices form a
/// clique; every later vertex attaches to `attach` distinct earlier vertices
/// drawn proportionally to degree.
inline Graph generate_ba(std::size_t n, std::size_t attach, std::uint64_t seed) {
  if (attach < 1 || n <= attach) {
    throw ParameterError("BA requires n > attach >= 1 (n=" + std::to_string(n) +
                         ", attach=" + std::to_string(attach) + ")");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(attach * (n - attach) + attach * (attach - 1) / 2);
  std::vector<Vertex> endpoints;  // one entry per edge endpoint
  endpoints.reserve(2 * edges.capacity());
  for (Vertex u = 0; u < attach; ++u) {
    for (Vertex v = u + 1; v < attach; ++v) {
      edges.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  std::vector<Vertex> targets;
  targets.reserve(attach);
  for (Vertex v = static_cast<Vertex>(attach); v < n; ++v) {
    targets.clear();
    if (v == attach) {
      for (Vertex u = 0; u < attach; ++u) targets.push_back(u);
    } else {
      while (targets.size() < attach) {
        Vertex t = endpoints[uniform_below(rng, endpoints.size())];
        if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
      }
    }
    for (Vertex t : targets) {
      edges.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return Graph::from_edges(n, edges);
}

/// Erdős-Rényi G(n, p) using geometric skipping over the upper triangle.
inline Graph generate_er(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("edge probability must lie in [0, 1]");
  std::vector<Edge> edges;
  if (p == 1.0) {
    for (Vertex v = 1; v < n; ++v)
      for (Vertex w = 0; w < v; ++w) edges.emplace_back(w, v);
    return Graph::from_edges(n, edges);
  }
  if (p > 0.0 && n > 1) {
    Rng rng(seed);
    const double log_q = std::log1p(-p);
    std::int64_t v = 1;
    std::int64_t w = -1;
    const auto nn = static_cast<std::int64_t>(n);
    while (v < nn) {
      const double r = uniform01(rng);
      w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
      while (w >= v && v < nn) {
        w -= v;
        ++v;
      }
      if (v < nn) edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
    }
  }
  return Graph::from_edges(n, edges);
}

inline Graph make_empty(std::size_t n) { return Graph::from_edges(n, std::vector<Edge>{}); }

inline Graph make_path(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  return Graph::from_edges(n, e);
}

inline Graph make_cycle(std::size_t n) {
  if (n < 3) throw ParameterError("cycle needs at least 3 vertices");
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  e.emplace_back(0, static_cast<Vertex>(n - 1));
  return Graph::from_edges(n, e);
}

inline Graph make_complete(std::size_t n) { return generate_er(n, 1.0, 0); }

/// Star with center 0 and vertices 1..leaves.
inline Graph make_star(std::size_t leaves) {
  std::vector<Edge> e;
  for (Vertex v = 1; v <= leaves; ++v) e.emplace_back(0, v);
  return Graph::from_edges(leaves + 1, e);
}

// ---------------------------------------------------------------------------
// Text format: "n m" header, then m lines "u v" with u < v in canonical order.

inline std::string to_text(const Graph& g) {
  std::string out;
  out.reserve(16 + g.edge_count() * 14);
  out += std::to_string(g.vertex_count());
  out += ' ';
  out += std::to_string(g.edge_count());
  out += '\n';
  for (const auto& [u, v] : g.edges()) {
    out += std::to_string(u);
    out += ' ';
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

inline Graph parse_graph(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) return true;
    }
    return false;
  };
  auto parse_pair = [&](std::string_view line, std::uint64_t& a, std::uint64_t& b) {
    std::istringstream in{std::string(line)};
    std::string extra;
    if (!(in >> a >> b) || (in >> extra)) throw DecodeError("expected two unsigned integers", line_no);
  };

  std::string_view line;
  if (!next_line(line)) throw DecodeError("missing 'n m' header", line_no + 1);
  std::uint64_t n = 0, m = 0;
  parse_pair(line, n, m);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    if (!next_line(line)) throw DecodeError("expected " + std::to_string(m) + " edges, found " + std::to_string(i), line_no + 1);
    std::uint64_t u = 0, v = 0;
    parse_pair(line, u, v);
    if (u >= n || v >= n) throw DecodeError("vertex out of range", line_no);
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (next_line(line)) throw DecodeError("trailing data after edge list", line_no);
  try {
    return Graph::from_edges(n, edges);
  } catch (const ParameterError& e) {
    throw DecodeError(e.what(), line_no);
  }
}

/// Reads a whole file; with `gzip` set the file is inflated through zlib.
inline std::string read_file(const std::string& path, bool gzip = false) {
  if (gzip) {
    std::unique_ptr<gzFile_s, int (*)(gzFile)> f(gzopen(path.c_str(), "rb"), gzclose);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string out;
    char buf[1 << 16];
    int got;
    while ((got = gzread(f.get(), buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(got));
    if (got < 0) throw std::runtime_error("gzip read failed for " + path);
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view data, bool gzip = false) {
  if (gzip) {
    std::unique_ptr<gzFile_s, int (*)(gzFile)> f(gzopen(path.c_str(), "wb"), gzclose);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    if (!data.empty() && gzwrite(f.get(), data.data(), static_cast<unsigned>(data.size())) == 0) {
      throw std::runtime_error("gzip write failed for " + path);
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline Graph read_graph_file(const std::string& path, bool gzip = false) { return parse_graph(read_file(path, gzip)); }

inline void write_graph_file(const std::string& path, const Graph& g, bool gzip = false) {
  write_file(path, to_text(g), gzip);
}

}  // namespace scalowork
