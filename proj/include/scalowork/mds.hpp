#pragma once

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "scalowork/errors.hpp"
#include "scalowork/graph.hpp"

namespace scalowork {

struct DominatingSet {
  std::vector<Vertex> vertices;  // sorted, duplicate-free
  std::size_t graph_n = 0;

  static DominatingSet of(std::vector<Vertex> vertices, std::size_t graph_n) {
    std::sort(vertices.begin(), vertices.end());
    if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end()) {
      throw ValidationError("dominating set lists a vertex twice");
    }
    if (!vertices.empty() && vertices.back() >= graph_n) {
      throw ValidationError("vertex " + std::to_string(vertices.back()) + " out of range for n=" + std::to_string(graph_n));
    }
    return {std::move(vertices), graph_n};
  }

  std::size_t size() const noexcept { return vertices.size(); }

  friend bool operator==(const DominatingSet&, const DominatingSet&) = default;
};

/// Upper bound k = n(1+ln(1+δ))/(1+δ) on the size of an acceptable solution.
struct CardinalityBound {
  double k = 0.0;

  bool admits(std::size_t size) const noexcept { return static_cast<double>(size) <= k; }
};

inline CardinalityBound compute_bound(std::size_t n, std::size_t delta_min) {
  const double d = static_cast<double>(delta_min);
  return {static_cast<double>(n) * (1.0 + std::log1p(d)) / (1.0 + d)};
}

inline CardinalityBound compute_bound(const GraphProperties& p) { return compute_bound(p.n, p.delta_min); }

struct CoverageReport {
  bool dominating = false;
  std::vector<Vertex> uncovered;

  explicit operator bool() const noexcept { return dominating; }
};

/// Visited-set sweep: mark each member and its neighbors, then compare the
/// visited count against |V|.
inline CoverageReport is_dominating(const Graph& g, const DominatingSet& s) {
  if (s.graph_n != g.vertex_count()) {
    throw ValidationError("set computed for n=" + std::to_string(s.graph_n) + " checked against n=" +
                          std::to_string(g.vertex_count()));
  }
  std::vector<char> visited(g.vertex_count(), 0);
  std::size_t visited_count = 0;
  auto mark = [&](Vertex v) {
    if (!visited[v]) {
      visited[v] = 1;
      ++visited_count;
    }
  };
  for (Vertex v : s.vertices) {
    if (v >= g.vertex_count()) throw ValidationError("vertex " + std::to_string(v) + " out of range");
    mark(v);
    for (Vertex u : g.neighbors(v)) mark(u);
  }
  CoverageReport r;
  r.dominating = visited_count == g.vertex_count();
  if (!r.dominating) {
    for (Vertex v = 0; v < g.vertex_count(); ++v)
      if (!visited[v]) r.uncovered.push_back(v);
  }
  return r;
}

// Larger key wins: higher span first, then the smaller vertex id.
constexpr std::uint64_t span_key(std::uint32_t span, Vertex v) noexcept {
  return (std::uint64_t{span} << 32) | (0xFFFFFFFFu - v);
}

/// Classic greedy: repeatedly take the vertex covering the most white
/// vertices, lowest id on ties.
inline DominatingSet greedy_sequential(const Graph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<std::uint32_t> span(n);
  std::vector<char> white(n, 1);
  std::priority_queue<std::uint64_t> heap;
  for (Vertex v = 0; v < n; ++v) {
    span[v] = static_cast<std::uint32_t>(g.degree(v) + 1);
    heap.push(span_key(span[v], v));
  }
  std::vector<Vertex> chosen;
  std::size_t covered = 0;
  auto cover = [&](Vertex u) {
    if (!white[u]) return;
    white[u] = 0;
    ++covered;
    --span[u];
    for (Vertex x : g.neighbors(u)) --span[x];
  };
  while (covered < n) {
    const std::uint64_t key = heap.top();
    heap.pop();
    const auto v = static_cast<Vertex>(0xFFFFFFFFu - (key & 0xFFFFFFFFu));
    const auto s = static_cast<std::uint32_t>(key >> 32);
    if (s != span[v]) {
      if (span[v] > 0) heap.push(span_key(span[v], v));
      continue;
    }
    if (s == 0) continue;
    chosen.push_back(v);
    cover(v);
    for (Vertex u : g.neighbors(v)) cover(u);
  }
  return DominatingSet::of(std::move(chosen), n);
}

/// Exhaustive minimum dominating set, smallest size first. Test oracle only.
inline DominatingSet brute_force_mds(const Graph& g) {
  constexpr std::size_t kMaxN = 25;
  const std::size_t n = g.vertex_count();
  if (n > kMaxN) throw ParameterError("brute force limited to n <= 25, got n=" + std::to_string(n));
  if (n == 0) return {{}, 0};
  std::vector<std::uint32_t> closed(n);
  for (Vertex v = 0; v < n; ++v) {
    closed[v] = std::uint32_t{1} << v;
    for (Vertex u : g.neighbors(v)) closed[v] |= std::uint32_t{1} << u;
  }
  const std::uint32_t full = (n == 32) ? ~0u : ((std::uint32_t{1} << n) - 1);
  std::vector<Vertex> pick;
  for (std::size_t k = 1; k <= n; ++k) {
    pick.resize(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = static_cast<Vertex>(i);
    while (true) {
      std::uint32_t mask = 0;
      for (Vertex v : pick) mask |= closed[v];
      if (mask == full) return DominatingSet::of(pick, n);
      // next combination in lexicographic order
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  throw ProtocolError("unreachable: the full vertex set always dominates");
}

// ---------------------------------------------------------------------------
// Round-synchronized distributed greedy

/// Contiguous ranges: vertex v goes to worker floor(v * workers / n).
inline std::vector<std::uint32_t> contiguous_partition(std::size_t n, unsigned workers) {
  if (workers == 0) throw ParameterError("worker count must be at least 1");
  std::vector<std::uint32_t> part(n);
  for (std::size_t v = 0; v < n; ++v) part[v] = static_cast<std::uint32_t>((v * workers) / n);
  return part;
}

/// Fixed set of threads running one task per worker between barriers. The
/// calling thread acts as worker 0.
class WorkerTeam {
 public:
  explicit WorkerTeam(unsigned workers) : workers_(workers), start_(workers), done_(workers) {
    for (unsigned w = 1; w < workers_; ++w) threads_.emplace_back([this, w] { loop(w); });
  }

  WorkerTeam(const WorkerTeam&) = delete;
  WorkerTeam& operator=(const WorkerTeam&) = delete;

  ~WorkerTeam() {
    if (workers_ > 1) {
      stop_.store(true);
      start_.arrive_and_wait();
      for (auto& t : threads_) t.join();
    }
  }

  unsigned size() const noexcept { return workers_; }

  void run(const std::function<void(unsigned)>& task) {
    if (workers_ == 1) {
      task(0);
      return;
    }
    task_ = &task;
    start_.arrive_and_wait();
    guarded(0);
    done_.arrive_and_wait();
    task_ = nullptr;
    if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
  }

 private:
  void loop(unsigned w) {
    for (;;) {
      start_.arrive_and_wait();
      if (stop_.load()) return;
      guarded(w);
      done_.arrive_and_wait();
    }
  }

  void guarded(unsigned w) {
    try {
      (*task_)(w);
    } catch (...) {
      std::lock_guard lock(error_mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  unsigned workers_;
  std::barrier<> start_;
  std::barrier<> done_;
  std::atomic<bool> stop_{false};
  const std::function<void(unsigned)>* task_ = nullptr;
  std::mutex error_mutex_;
  std::exception_ptr error_;
  std::vector<std::thread> threads_;
};

enum class Color : std::uint8_t { white, grey, black };

struct SolverState {
  std::vector<Color> color;
  std::vector<std::uint32_t> span;  // w(v) as of the last span exchange
  std::size_t round = 0;
  std::size_t white = 0;
};

/// Span reports of one worker in one round.
struct WorkerReport {
  std::size_t round = 0;
  unsigned worker = 0;
  std::size_t reported = 0;  // owned vertices with span > 0
  std::size_t admitted = 0;
  bool missed = false;  // worker was silent; the coordinator redid its share
  std::uint64_t work_units = 0;
};

struct RoundStats {
  std::size_t round = 0;
  std::size_t white_before = 0;
  std::size_t admitted = 0;
  std::size_t white_after = 0;
  std::uint64_t critical_units = 0;  // slowest worker plus coordinator fallback
};

struct DistributedOptions {
  // Worker stays silent in the given round.
  std::function<bool(unsigned worker, std::size_t round)> silent;
  // Checked before every round; true ends the run early.
  std::function<bool()> should_stop;
};

struct DistributedResult {
  DominatingSet set;
  std::size_t rounds = 0;
  bool completed = false;
  std::vector<WorkerReport> contributions;
  std::vector<RoundStats> round_stats;
  std::uint64_t total_units = 0;     // adjacency entries scanned, all workers
  std::uint64_t critical_units = 0;  // sum over rounds of the slowest share
};

/// Distributed greedy over a vertex partition. Each round every vertex with
/// span > 0 reports w(v) to its hop-2 neighborhood and joins the set iff its
/// (span, -id) key is maximal there. Rounds are barrier-synchronized, so the
/// result does not depend on the number of workers or the partition.
class DistributedGreedy {
 public:
  DistributedGreedy(const Graph& g, unsigned workers, std::vector<std::uint32_t> partition,
                    DistributedOptions options = {})
      : g_(g), workers_(workers), options_(std::move(options)) {
    if (workers == 0) throw ParameterError("worker count must be at least 1");
    const std::size_t n = g.vertex_count();
    std::vector<Vertex> gaps;
    owned_.resize(workers);
    for (Vertex v = 0; v < n; ++v) {
      if (v >= partition.size() || partition[v] >= workers) {
        gaps.push_back(v);
      } else {
        owned_[partition[v]].push_back(v);
      }
    }
    if (!gaps.empty()) {
      std::string ids;
      for (std::size_t i = 0; i < gaps.size() && i < 16; ++i) ids += (i ? "," : "") + std::to_string(gaps[i]);
      if (gaps.size() > 16) ids += ",...";
      throw ProtocolError("partition leaves " + std::to_string(gaps.size()) + " vertices unassigned: " + ids);
    }
    state_.color.assign(n, Color::white);
    state_.span.assign(n, 0);
    state_.white = n;
    best1_.assign(n, 0);
    admit_.assign(n, 0);
  }

  DistributedGreedy(const Graph& g, unsigned workers, DistributedOptions options = {})
      : DistributedGreedy(g, workers, contiguous_partition(g.vertex_count(), workers), std::move(options)) {}

  bool done() const noexcept { return state_.white == 0; }
  const SolverState& state() const noexcept { return state_; }

  /// Executes one synchronized round. No-op once every vertex is covered.
  void step() {
    if (done()) return;
    const std::size_t round = ++state_.round;
    const std::size_t white_before = state_.white;
    std::vector<WorkerReport> reports(workers_);
    std::vector<std::size_t> white_left(workers_, 0);
    std::uint64_t fallback_units = 0;
    for (unsigned w = 0; w < workers_; ++w) {
      reports[w].round = round;
      reports[w].worker = w;
      reports[w].missed = options_.silent && options_.silent(w, round);
    }

    auto phase = [&](auto&& body) {
      team_.run([&](unsigned w) {
        if (!reports[w].missed) reports[w].work_units += body(w);
      });
      for (unsigned w = 0; w < workers_; ++w)
        if (reports[w].missed) fallback_units += body(w);
    };

    // Span exchange.
    phase([&](unsigned w) {
      std::uint64_t units = 0;
      std::size_t reported = 0;
      for (Vertex v : owned_[w]) {
        units += g_.degree(v) + 1;
        if (state_.color[v] == Color::black) {
          state_.span[v] = 0;
          continue;
        }
        std::uint32_t s = state_.color[v] == Color::white ? 1 : 0;
        for (Vertex u : g_.neighbors(v)) s += state_.color[u] == Color::white;
        state_.span[v] = s;
        reported += s > 0;
      }
      reports[w].reported = reported;
      return units;
    });
    // Closed hop-1 maximum; hop-2 maximum is the maximum of these over N[v].
    phase([&](unsigned w) {
      std::uint64_t units = 0;
      for (Vertex v : owned_[w]) {
        std::uint64_t b = span_key(state_.span[v], v);
        for (Vertex u : g_.neighbors(v)) b = std::max(b, span_key(state_.span[u], u));
        best1_[v] = b;
        units += g_.degree(v) + 1;
      }
      return units;
    });
    phase([&](unsigned w) {
      std::uint64_t units = 0;
      for (Vertex v : owned_[w]) {
        admit_[v] = 0;
        if (state_.span[v] == 0) continue;
        const std::uint64_t mine = span_key(state_.span[v], v);
        std::uint64_t b = best1_[v];
        for (Vertex u : g_.neighbors(v)) b = std::max(b, best1_[u]);
        admit_[v] = (b == mine);
        units += g_.degree(v) + 1;
      }
      return units;
    });
    // Admitted vertices are pairwise more than two hops apart, so their closed
    // neighborhoods are disjoint and the writes below never collide.
    phase([&](unsigned w) {
      std::uint64_t units = 0;
      std::size_t admitted = 0;
      for (Vertex v : owned_[w]) {
        if (!admit_[v]) continue;
        ++admitted;
        state_.color[v] = Color::black;
        state_.span[v] = 0;
        for (Vertex u : g_.neighbors(v))
          if (state_.color[u] == Color::white) state_.color[u] = Color::grey;
        units += g_.degree(v) + 1;
      }
      reports[w].admitted = admitted;
      return units;
    });
    phase([&](unsigned w) {
      std::size_t c = 0;
      for (Vertex v : owned_[w]) c += state_.color[v] == Color::white;
      white_left[w] = c;
      return std::uint64_t{0};
    });

    RoundStats stats;
    stats.round = round;
    stats.white_before = white_before;
    std::uint64_t slowest = 0;
    state_.white = 0;
    for (unsigned w = 0; w < workers_; ++w) {
      stats.admitted += reports[w].admitted;
      state_.white += white_left[w];
      slowest = std::max(slowest, reports[w].work_units);
      total_units_ += reports[w].work_units;
      contributions_.push_back(reports[w]);
    }
    total_units_ += fallback_units;
    stats.white_after = state_.white;
    stats.critical_units = slowest + fallback_units;
    critical_units_ += stats.critical_units;
    round_stats_.push_back(stats);
  }

  /// Runs rounds until covered or `should_stop` fires.
  DistributedResult run() {
    while (!done()) {
      if (options_.should_stop && options_.should_stop()) break;
      step();
    }
    return result();
  }

  DistributedResult result() const {
    DistributedResult r;
    std::vector<Vertex> chosen;
    for (Vertex v = 0; v < g_.vertex_count(); ++v)
      if (state_.color[v] == Color::black) chosen.push_back(v);
    r.set = DominatingSet{std::move(chosen), g_.vertex_count()};
    r.rounds = state_.round;
    r.completed = done();
    r.contributions = contributions_;
    r.round_stats = round_stats_;
    r.total_units = total_units_;
    r.critical_units = critical_units_;
    return r;
  }

 private:
  const Graph& g_;
  unsigned workers_;
  DistributedOptions options_;
  std::vector<std::vector<Vertex>> owned_;
  SolverState state_;
  std::vector<std::uint64_t> best1_;
  std::vector<char> admit_;
  std::vector<WorkerReport> contributions_;
  std::vector<RoundStats> round_stats_;
  std::uint64_t total_units_ = 0;
  std::uint64_t critical_units_ = 0;
  WorkerTeam team_{workers_};
};

inline DistributedResult greedy_distributed(const Graph& g, unsigned workers, std::vector<std::uint32_t> partition,
                                            DistributedOptions options = {}) {
  return DistributedGreedy(g, workers, std::move(partition), std::move(options)).run();
}

inline DistributedResult greedy_distributed(const Graph& g, unsigned workers = 1, DistributedOptions options = {}) {
  return DistributedGreedy(g, workers, std::move(options)).run();
}

/// Per-round statistics as CSV.
inline std::string round_stats_csv(const DistributedResult& r) {
  std::string out = "round,white_before,admitted,white_after,critical_units\n";
  for (const auto& s : r.round_stats) {
    out += std::to_string(s.round) + ',' + std::to_string(s.white_before) + ',' + std::to_string(s.admitted) + ',' +
           std::to_string(s.white_after) + ',' + std::to_string(s.critical_units) + '\n';
  }
  return out;
}

}  // namespace scalowork
