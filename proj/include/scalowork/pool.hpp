#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "scalowork/errors.hpp"
#include "scalowork/graph.hpp"
#include "scalowork/mds.hpp"
#include "scalowork/protocol.hpp"

namespace scalowork {

enum class PartitionStrategy : std::uint8_t { contiguous, degree_balanced };

/// Vertex -> miner assignment. Degree-balanced placement is
/// longest-processing-time first with load deg(v)+1, lowest miner on ties.
inline std::vector<std::uint32_t> partition_vertices(const Graph& g, unsigned miners,
                                                     PartitionStrategy strategy = PartitionStrategy::contiguous) {
  if (miners == 0) throw ParameterError("pool needs at least one miner");
  const std::size_t n = g.vertex_count();
  if (strategy == PartitionStrategy::contiguous) return contiguous_partition(n, miners);

  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return g.degree(a) > g.degree(b); });
  std::vector<std::uint32_t> part(n);
  // (load, miner) min-set
  std::set<std::pair<std::uint64_t, std::uint32_t>> loads;
  for (std::uint32_t w = 0; w < miners; ++w) loads.insert({0, w});
  for (Vertex v : order) {
    auto [load, w] = *loads.begin();
    loads.erase(loads.begin());
    part[v] = w;
    loads.insert({load + g.degree(v) + 1, w});
  }
  return part;
}

struct PoolConfig {
  std::string pool_id;
  std::string manager;
  std::vector<std::string> miners;
  PartitionStrategy strategy = PartitionStrategy::contiguous;
};

struct MinerContribution {
  std::string miner;
  std::size_t assigned = 0;
  std::size_t rounds_reported = 0;
  std::size_t rounds_missed = 0;
  std::size_t admitted = 0;  // vertices this miner put into the set
};

struct ContributionLedger {
  std::size_t total_rounds = 0;
  std::vector<MinerContribution> miners;
};

struct PoolSolveOptions {
  std::function<bool(std::size_t miner, std::size_t round)> silent;
  std::function<bool()> deadline_passed;
};

struct PoolSolveResult {
  DistributedResult solve;  // solve.completed == false: deadline hit, set is partial
  ContributionLedger ledger;
};

/// Runs the distributed greedy with the pool's miners as workers and builds
/// the contribution ledger from the per-round span reports.
inline PoolSolveResult run_pool_solve(const Graph& g, const PoolConfig& config, const PoolSolveOptions& options = {}) {
  if (config.miners.empty()) throw ParameterError("pool needs at least one miner");
  const auto miners = static_cast<unsigned>(config.miners.size());
  auto part = partition_vertices(g, miners, config.strategy);

  PoolSolveResult out;
  out.ledger.miners.resize(miners);
  for (unsigned w = 0; w < miners; ++w) out.ledger.miners[w].miner = config.miners[w];
  for (auto w : part) ++out.ledger.miners[w].assigned;

  DistributedOptions opts;
  if (options.silent) opts.silent = [&](unsigned w, std::size_t r) { return options.silent(w, r); };
  if (options.deadline_passed) opts.should_stop = options.deadline_passed;
  out.solve = greedy_distributed(g, miners, std::move(part), std::move(opts));

  out.ledger.total_rounds = out.solve.rounds;
  for (const auto& rep : out.solve.contributions) {
    auto& c = out.ledger.miners[rep.worker];
    if (rep.missed) {
      ++c.rounds_missed;
    } else {
      ++c.rounds_reported;
      c.admitted += rep.admitted;
    }
  }
  return out;
}

/// Indices of miners whose missed-round fraction exceeds `threshold`.
inline std::vector<std::size_t> detect_free_riders(const ContributionLedger& ledger, double threshold = 0.1) {
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < ledger.miners.size(); ++i) {
    const auto& c = ledger.miners[i];
    const std::size_t total = c.rounds_reported + c.rounds_missed;
    if (total == 0) continue;
    if (static_cast<double>(c.rounds_missed) / static_cast<double>(total) > threshold) flagged.push_back(i);
  }
  return flagged;
}

struct RewardSplit {
  std::vector<Coin> payouts;  // per miner, ledger order
  Coin manager_remainder = 0;
  bool escrowed = false;  // every miner flagged; reward held by the manager

  Coin total() const { return std::accumulate(payouts.begin(), payouts.end(), manager_remainder); }
};

/// Proportional split by assigned-vertex count times reported-round fraction.
/// Flagged miners get nothing; integer rounding remainder goes to the manager.
inline RewardSplit distribute_reward(Coin reward, const ContributionLedger& ledger, std::span<const std::size_t> flagged) {
  RewardSplit out;
  out.payouts.assign(ledger.miners.size(), 0);
  std::vector<unsigned __int128> weight(ledger.miners.size(), 0);
  unsigned __int128 total = 0;
  for (std::size_t i = 0; i < ledger.miners.size(); ++i) {
    if (std::find(flagged.begin(), flagged.end(), i) != flagged.end()) continue;
    const auto& c = ledger.miners[i];
    const std::size_t rounds = c.rounds_reported + c.rounds_missed;
    weight[i] = rounds == 0 ? static_cast<unsigned __int128>(c.assigned)
                            : static_cast<unsigned __int128>(c.assigned) * c.rounds_reported;
    total += weight[i];
  }
  if (total == 0) {
    out.escrowed = true;
    out.manager_remainder = reward;
    return out;
  }
  Coin paid = 0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    out.payouts[i] = static_cast<Coin>(static_cast<unsigned __int128>(reward) * weight[i] / total);
    paid += out.payouts[i];
  }
  out.manager_remainder = reward - paid;
  return out;
}

inline std::string ledger_csv(const ContributionLedger& ledger, const RewardSplit& split) {
  std::string out = "miner,assigned,reported,missed,payout\n";
  for (std::size_t i = 0; i < ledger.miners.size(); ++i) {
    const auto& c = ledger.miners[i];
    out += c.miner + ',' + std::to_string(c.assigned) + ',' + std::to_string(c.rounds_reported) + ',' +
           std::to_string(c.rounds_missed) + ',' + std::to_string(i < split.payouts.size() ? split.payouts[i] : 0) + '\n';
  }
  return out;
}

}  // namespace scalowork
