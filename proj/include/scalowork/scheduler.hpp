#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "scalowork/errors.hpp"
#include "scalowork/graph.hpp"
#include "scalowork/mds.hpp"

namespace scalowork {

struct LookupRow {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::int64_t tau_ms = 0;  // generation + verification

  friend bool operator==(const LookupRow&, const LookupRow&) = default;
};

class LookupTable {
 public:
  LookupTable() = default;

  LookupTable(std::vector<LookupRow> rows, double l) : rows_(std::move(rows)), l_(l) {
    if (!(l >= 1.0)) throw ParameterError("multiplier l must be at least 1");
    for (const auto& r : rows_) {
      if (r.tau_ms <= 0) throw ParameterError("lookup row with non-positive tau");
      if (r.n == 0 || r.m == 0) throw ParameterError("lookup row with empty graph");
    }
    std::stable_sort(rows_.begin(), rows_.end(), [](const LookupRow& a, const LookupRow& b) { return a.n < b.n; });
  }

  const std::vector<LookupRow>& rows() const noexcept { return rows_; }
  double multiplier() const noexcept { return l_; }
  bool empty() const noexcept { return rows_.empty(); }

  /// Row with the largest n' ≤ n, else the smallest row.
  const LookupRow& select(std::uint64_t n) const {
    if (rows_.empty()) throw ParameterError("lookup table is empty");
    auto it = std::upper_bound(rows_.begin(), rows_.end(), n, [](std::uint64_t q, const LookupRow& r) { return q < r.n; });
    return it == rows_.begin() ? rows_.front() : *std::prev(it);
  }

  std::string to_csv() const {
    std::string out = "n,m,tau_ms\n";
    for (const auto& r : rows_) out += std::to_string(r.n) + ',' + std::to_string(r.m) + ',' + std::to_string(r.tau_ms) + '\n';
    return out;
  }

  static LookupTable from_csv(std::string_view text, double l) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<LookupRow> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "n,m,tau_ms") continue;
      LookupRow r;
      char c1 = 0, c2 = 0;
      std::istringstream fields(line);
      if (!(fields >> r.n >> c1 >> r.m >> c2 >> r.tau_ms) || c1 != ',' || c2 != ',') {
        throw DecodeError("expected 'n,m,tau_ms'", line_no);
      }
      rows.push_back(r);
    }
    return {std::move(rows), l};
  }

 private:
  std::vector<LookupRow> rows_;
  double l_ = 1.5;
};

/// T_max = l · τ(G') · (m''·n'') / (m'·n'), rounded up to whole milliseconds.
inline std::int64_t estimate_tmax(const LookupTable& table, std::uint64_t n, std::uint64_t m) {
  const LookupRow& r = table.select(n);
  const long double scaled = static_cast<long double>(r.tau_ms) * static_cast<long double>(m) *
                             static_cast<long double>(n) /
                             (static_cast<long double>(r.m) * static_cast<long double>(r.n));
  return static_cast<std::int64_t>(std::ceil(static_cast<long double>(table.multiplier()) * scaled));
}

/// Measures τ in ms for one instance; may throw to signal a failed run.
using InstanceTimer = std::function<std::int64_t(const Graph&, unsigned workers)>;

/// Median of three wall-clock runs of distributed greedy plus the coverage
/// check, at least 1 ms.
inline std::int64_t wall_clock_tau(const Graph& g, unsigned workers) {
  std::vector<std::int64_t> runs;
  for (int i = 0; i < 3; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = greedy_distributed(g, workers);
    if (!is_dominating(g, r.set).dominating) throw ValidationError("solver produced a non-dominating set");
    const auto t1 = std::chrono::steady_clock::now();
    runs.push_back(std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
  }
  std::sort(runs.begin(), runs.end());
  return std::max<std::int64_t>(1, runs[1]);
}

struct LookupBuild {
  LookupTable table;
  std::vector<std::string> warnings;  // one per skipped instance
};

inline LookupBuild build_lookup(std::span<const Graph> instances, unsigned workers, double l = 1.5,
                                const InstanceTimer& timer = wall_clock_tau) {
  if (instances.empty()) throw ParameterError("lookup table needs at least one benchmark instance");
  std::vector<LookupRow> rows;
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Graph& g = instances[i];
    try {
      const std::int64_t tau = timer(g, workers);
      if (tau <= 0) throw ValidationError("non-positive measurement");
      rows.push_back({g.vertex_count(), g.edge_count(), tau});
    } catch (const std::exception& e) {
      warnings.push_back("instance " + std::to_string(i) + " skipped: " + e.what());
    }
  }
  return {LookupTable(std::move(rows), l), std::move(warnings)};
}

}  // namespace scalowork
