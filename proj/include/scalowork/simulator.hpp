#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <tuple>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scalowork/chain.hpp"
#include "scalowork/committee.hpp"
#include "scalowork/crypto.hpp"
#include "scalowork/errors.hpp"
#include "scalowork/graph.hpp"
#include "scalowork/mds.hpp"
#include "scalowork/pool.hpp"
#include "scalowork/protocol.hpp"
#include "scalowork/random.hpp"
#include "scalowork/scheduler.hpp"

namespace scalowork {

namespace detail {

inline std::string num(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

inline std::int64_t modeled_ms(std::uint64_t units, double units_per_ms) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(static_cast<double>(units) / units_per_ms)));
}

}  // namespace detail

struct GraphSpec {
  enum class Model : std::uint8_t { ba, er };
  Model model = Model::ba;
  std::size_t n = 200;
  double avg_degree = 8.0;

  void validate() const {
    if (n < 2) throw ParameterError("graph needs at least 2 vertices");
    if (!(avg_degree > 0.0) || avg_degree >= static_cast<double>(n)) throw ParameterError("average degree must lie in (0, n)");
    if (model == Model::ba && attach() >= n) throw ParameterError("BA attach count must be below n");
  }

  std::size_t attach() const { return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(avg_degree / 2.0))); }

  Graph generate(std::uint64_t seed) const {
    if (model == Model::ba) return generate_ba(n, attach(), seed);
    return generate_er(n, avg_degree / static_cast<double>(n - 1), seed);
  }
};

/// Per-link delays uniform in [0, eta].
struct NetworkModel {
  std::int64_t eta_ms = 50;

  std::int64_t delay(Rng& rng) const { return static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(eta_ms) + 1)); }
};

enum class AdversaryMode : std::uint8_t { none, selfish, replay, theft, free_rider };

struct AdversaryConfig {
  AdversaryMode mode = AdversaryMode::none;
  double lambda = 0.0;  // share of total solver throughput
  Coin fee = 0;         // F, replay scenario
  bool forge_descriptor = false;
  std::size_t withhold_epochs = 2;  // private lead released once this long
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::size_t pools = 4;
  std::size_t miners_per_pool = 3;
  std::size_t epochs = 10;
  GraphSpec graph;
  std::uint64_t z = 16;
  std::size_t finality = 6;
  std::size_t window = 10;
  std::size_t committee_size = 7;
  NetworkModel network;
  Coin reward = 100;
  double units_per_ms = 200.0;  // modeled solver throughput per pool
  double l = 1.5;
  std::size_t lookup_instances = 3;
  std::size_t utilities = 3;
  HardnessPolicy hardness;
  std::size_t free_rider_pools = 0;  // pools whose last miner never reports
  AdversaryConfig adversary;

  void validate() const {
    if (pools == 0) throw ParameterError("simulation needs at least one pool");
    if (miners_per_pool == 0) throw ParameterError("pools need at least one miner");
    if (epochs == 0) throw ParameterError("simulation needs at least one epoch");
    if (z == 0) throw ParameterError("instance count z must be at least 1");
    if (window == 0 || committee_size == 0) throw ParameterError("committee window and size must be positive");
    if (network.eta_ms < 0) throw ParameterError("eta must be non-negative");
    if (!(units_per_ms > 0.0)) throw ParameterError("solver throughput must be positive");
    if (!(l >= 1.0)) throw ParameterError("multiplier l must be at least 1");
    if (lookup_instances == 0 || utilities == 0) throw ParameterError("need lookup instances and utilities");
    if (free_rider_pools > pools) throw ParameterError("more free-rider pools than pools");
    if (adversary.lambda < 0.0 || adversary.lambda >= 1.0) throw ParameterError("lambda must lie in [0, 1)");
    if (adversary.withhold_epochs == 0) throw ParameterError("withhold_epochs must be at least 1");
    graph.validate();
    hardness.validate();
  }

  static SimConfig from_json(const nlohmann::json& j) {
    SimConfig c;
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("seed", c.seed);
    get("pools", c.pools);
    get("miners_per_pool", c.miners_per_pool);
    get("epochs", c.epochs);
    get("z", c.z);
    get("f", c.finality);
    get("w", c.window);
    get("committee_size", c.committee_size);
    get("eta_ms", c.network.eta_ms);
    get("reward", c.reward);
    get("units_per_ms", c.units_per_ms);
    get("l", c.l);
    get("lookup_instances", c.lookup_instances);
    get("utilities", c.utilities);
    get("free_rider_pools", c.free_rider_pools);
    get("lambda", c.adversary.lambda);
    get("fee", c.adversary.fee);
    get("forge_descriptor", c.adversary.forge_descriptor);
    get("withhold_epochs", c.adversary.withhold_epochs);
    if (j.contains("graph")) {
      const auto& g = j.at("graph");
      if (g.contains("model")) {
        const auto m = g.at("model").get<std::string>();
        if (m == "ba") c.graph.model = GraphSpec::Model::ba;
        else if (m == "er") c.graph.model = GraphSpec::Model::er;
        else throw ParameterError("unknown graph model '" + m + "'");
      }
      if (g.contains("n")) c.graph.n = g.at("n").get<std::size_t>();
      if (g.contains("avg_degree")) c.graph.avg_degree = g.at("avg_degree").get<double>();
    }
    if (j.contains("hardness")) c.hardness = HardnessPolicy::from_json(j.at("hardness"));
    c.validate();
    return c;
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::uint64_t instance_id = 0;  // 0: no descriptor approved
  std::string utility;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::int64_t t_max_ms = 0;
  std::size_t blocks = 0;    // generated before the deadline
  std::size_t aborted = 0;   // honest pools that missed the deadline
  std::size_t collisions = 0;  // pool pairs that drew the same index
  bool distinct_roots = true;
  std::string winner;  // empty: no block this epoch on the reference node
  std::size_t set_size = 0;
  double work = 0.0;
  std::int64_t gen_ms = 0;
  std::int64_t verify_ms = 0;
  std::size_t forks = 1;  // distinct tips across honest nodes
  std::size_t reorg_depth = 0;
  std::size_t reversions = 0;  // cumulative, all honest nodes
  std::size_t committed_height = 0;
  std::size_t flagged = 0;  // free riders flagged in the winning pool
  Coin payout = 0;          // paid to the winning pool's miners
};

struct RunMetrics {
  std::vector<EpochRecord> epochs;
  std::size_t pool_runs = 0;      // honest pool-epochs that reached solving
  std::size_t pool_finished = 0;  // ... and finished before the deadline
  std::size_t collisions = 0;
  double expected_collisions = 0.0;  // Σ C(k,2)/z
  std::size_t root_violations = 0;
  std::size_t reversions = 0;
  std::size_t max_reorg_depth = 0;
  // Adversary scenarios
  std::size_t adversary_blocks = 0;
  std::size_t adversary_releases = 0;
  std::size_t adversary_adopted = 0;  // adversary blocks on an honest node's adopted chain at the end
  std::size_t rejected_late = 0;
  std::size_t rejected_forged = 0;
  std::string chain_log;  // reference node

  std::size_t epochs_all_finished() const {
    return static_cast<std::size_t>(std::count_if(epochs.begin(), epochs.end(), [](const EpochRecord& e) {
      return e.instance_id != 0 && e.aborted == 0;
    }));
  }

  std::string csv() const {
    std::string out =
        "epoch,instance_id,utility,n,m,t_max_ms,blocks,aborted,collisions,distinct_roots,winner,set_size,work,"
        "gen_ms,verify_ms,forks,reorg_depth,reversions,committed_height,flagged,payout\n";
    for (const auto& e : epochs) {
      out += std::to_string(e.epoch) + ',' + std::to_string(e.instance_id) + ',' + e.utility + ',' +
             std::to_string(e.n) + ',' + std::to_string(e.m) + ',' + std::to_string(e.t_max_ms) + ',' +
             std::to_string(e.blocks) + ',' + std::to_string(e.aborted) + ',' + std::to_string(e.collisions) + ',' +
             (e.distinct_roots ? "1" : "0") + ',' + e.winner + ',' + std::to_string(e.set_size) + ',' +
             detail::num(e.work) + ',' + std::to_string(e.gen_ms) + ',' + std::to_string(e.verify_ms) + ',' +
             std::to_string(e.forks) + ',' + std::to_string(e.reorg_depth) + ',' + std::to_string(e.reversions) + ',' +
             std::to_string(e.committed_height) + ',' + std::to_string(e.flagged) + ',' + std::to_string(e.payout) + '\n';
    }
    return out;
  }
};

/// Epoch-by-epoch simulation with modeled solver time. Every pool is also a
/// verifying node with its own chain view. With a selfish adversary the last
/// pool mines on a private fork and releases it only when ahead.
class Simulation {
 public:
  explicit Simulation(SimConfig config) : cfg_(std::move(config)) {
    cfg_.validate();
    const bool selfish = cfg_.adversary.mode == AdversaryMode::selfish;
    if (selfish && cfg_.pools < 2) throw ParameterError("selfish scenario needs an honest pool and the adversary");
    honest_ = selfish ? cfg_.pools - 1 : cfg_.pools;

    for (std::size_t p = 0; p < cfg_.pools; ++p) {
      const std::string id = (selfish && p == honest_) ? "adversary" : "pool-" + std::to_string(p);
      pools_.push_back({id, keygen(id, cfg_.seed)});
      PoolConfig pc;
      pc.pool_id = id;
      pc.manager = id;
      for (std::size_t w = 0; w < cfg_.miners_per_pool; ++w) pc.miners.push_back(id + "/m" + std::to_string(w));
      pool_configs_.push_back(std::move(pc));
    }
    for (std::size_t u = 0; u < cfg_.utilities; ++u) {
      const std::string id = "utility-" + std::to_string(u);
      utility_keys_.push_back(keygen(id, cfg_.seed));
      registry_.entries.push_back({id, utility_keys_.back().pk});
    }
    for (std::size_t p = 0; p < std::min(cfg_.committee_size, honest_); ++p) bootstrap_.push_back(pools_[p].id);
    nodes_.resize(cfg_.pools, ChainState(cfg_.finality, TieBreak::lowest_digest));
    if (selfish) private_view_.emplace(cfg_.finality, TieBreak::lowest_digest);

    std::vector<Graph> bench;
    for (std::size_t i = 0; i < cfg_.lookup_instances; ++i) bench.push_back(cfg_.graph.generate(derive_seed(cfg_.seed, (1ULL << 40) + i)));
    // Row time: modeled generation and verification plus one propagation bound.
    const double upm = cfg_.units_per_ms;
    const std::int64_t eta = cfg_.network.eta_ms;
    auto timer = [upm, eta](const Graph& g, unsigned workers) {
      auto r = greedy_distributed(g, workers);
      std::uint64_t verify_units = 0;
      for (Vertex v : r.set.vertices) verify_units += g.degree(v) + 1;
      return detail::modeled_ms(r.critical_units, upm) + detail::modeled_ms(verify_units, upm) + eta;
    };
    table_ = build_lookup(bench, static_cast<unsigned>(cfg_.miners_per_pool), cfg_.l, timer).table;
  }

  const LookupTable& lookup() const noexcept { return table_; }
  const ChainState& node(std::size_t i) const { return nodes_.at(i); }

  RunMetrics run() {
    RunMetrics metrics;
    for (std::size_t e = 0; e < cfg_.epochs; ++e) metrics.epochs.push_back(run_epoch(e, metrics));
    for (std::size_t q = 0; q < honest_; ++q) {
      metrics.reversions += nodes_[q].reversions();
      metrics.max_reorg_depth = std::max(metrics.max_reorg_depth, nodes_[q].max_reorg_depth());
      if (honest_ < cfg_.pools) {
        for (const auto* b : nodes_[q].adopted_chain()) metrics.adversary_adopted += b->miner == pools_[honest_].id;
      }
    }
    metrics.chain_log = nodes_[0].export_log();
    return metrics;
  }

 private:
  struct Participant {
    std::string id;
    KeyPair keys;
  };

  struct EpochContext {
    std::shared_ptr<MemoryInstanceStore> store;
    std::vector<PublicKey> committee;
    std::int64_t origin = 0;
    std::int64_t t_max = 0;
  };

  struct Delivery {
    std::int64_t at = 0;
    std::size_t block = 0;  // index into blocks
    std::size_t node = 0;
    std::uint64_t order = 0;
    bool release = false;  // adversary decision point, not a delivery

    bool operator>(const Delivery& o) const {
      return std::tie(at, order) > std::tie(o.at, o.order);
    }
  };

  bool is_adversary(std::size_t p) const { return p >= honest_; }

  EpochRecord run_epoch(std::size_t e, RunMetrics& metrics) {
    EpochRecord rec;
    rec.epoch = e;
    const std::int64_t origin = clock_ms_;
    ChainState& ref = nodes_[0];

    const auto miners = ref.miners();
    const CommitteeWindow window = derive_committee(miners, cfg_.window, cfg_.committee_size, bootstrap_);
    std::vector<CommitteeMember> members;
    std::vector<PublicKey> committee_pks;
    for (const auto& id : window.members) {
      auto it = std::find_if(pools_.begin(), pools_.end(), [&](const Participant& p) { return p.id == id; });
      members.push_back({id, it->keys});
      committee_pks.push_back(it->keys.pk);
    }

    const std::size_t u = select_utility(registry_, ref.tip().digest);
    rec.utility = registry_.entries[u].identity;
    const Graph g = cfg_.graph.generate(derive_seed(cfg_.seed, e));
    const GraphProperties props = properties(g);
    rec.n = props.n;
    rec.m = props.m;
    const std::int64_t t_max = estimate_tmax(table_, props.n, props.m);
    rec.t_max_ms = t_max;
    const ProblemDescriptor d =
        make_descriptor(props, cfg_.reward, utility_keys_[u].pk, cfg_.z, "mem://epoch-" + std::to_string(e), t_max);

    CommitteeApproval approval;
    try {
      approval = authority_.approve(d, cfg_.hardness, members);
    } catch (const ProtocolError&) {
      // Rejected by the committee; a fresh descriptor follows next epoch.
      clock_ms_ += cfg_.network.eta_ms + 1;
      finish_record(rec);
      return rec;
    }
    rec.instance_id = approval.instance_id;
    const Digest dh = descriptor_hash(d);
    const Signature sig_d = sign(dh.bytes, utility_keys_[u].sk);

    auto store = std::make_shared<MemoryInstanceStore>();
    const auto pool = make_instance_pool(g, cfg_.z, derive_seed(cfg_.seed, (2ULL << 40) + e));
    for (std::size_t j = 0; j < pool.size(); ++j) {
      store->put(dh, j, pool[j].graph, sign_instance(pool[j].graph, utility_keys_[u].sk));
    }
    EpochContext ctx{store, committee_pks, origin, t_max};
    epochs_[approval.instance_id] = ctx;
    while (epochs_.size() > 2 * cfg_.finality + 2) epochs_.erase(epochs_.begin());
    const RewardTransaction reward = make_reward_transaction(d, origin, committee_pks);

    std::vector<std::uint64_t> start_ids(cfg_.pools);
    for (std::size_t q = 0; q < cfg_.pools; ++q) start_ids[q] = nodes_[q].tip().instance_id;

    // Generation
    std::vector<Block> blocks;
    std::vector<std::size_t> producer;
    std::vector<std::uint64_t> indices;
    std::set<Digest> roots;
    std::optional<std::int64_t> adversary_found;
    std::map<std::size_t, PoolSolveResult> solves;
    for (std::size_t p = 0; p < cfg_.pools; ++p) {
      double throughput = cfg_.units_per_ms;
      Digest prev = nodes_[p].tip().digest;
      std::uint64_t prev_id = nodes_[p].tip().instance_id;
      if (is_adversary(p)) {
        if (cfg_.adversary.lambda <= 0.0) continue;
        throughput = cfg_.units_per_ms * static_cast<double>(honest_) * cfg_.adversary.lambda / (1.0 - cfg_.adversary.lambda);
        const ChainNode* tip = private_view_->find(private_tip_);
        prev = tip->digest;
        prev_id = tip->instance_id;
      }
      MiningRequest req{d, sig_d, approval, reward, prev, prev_id, pools_[p].id, {}, 1 << 20};
      ManualClock clock(origin);
      bool used = false;
      PoolSolveOptions opts;
      if (p < cfg_.free_rider_pools) {
        const std::size_t lazy = cfg_.miners_per_pool - 1;
        opts.silent = [lazy](std::size_t miner, std::size_t) { return miner == lazy && lazy > 0; };
      }
      PoolSolver solver = [&](const Graph& instance) -> std::optional<DominatingSet> {
        if (used) return std::nullopt;
        used = true;
        auto r = run_pool_solve(instance, pool_configs_[p], opts);
        clock.advance(detail::modeled_ms(r.solve.critical_units, throughput));
        DominatingSet s = r.solve.set;
        solves[p] = std::move(r);
        return s;
      };
      GenerationResult gen = generate_block(req, *store, clock, solver);
      indices.push_back(gen.index);
      roots.insert(gen.merkle_root);
      if (!is_adversary(p)) {
        ++metrics.pool_runs;
        if (gen.status == GenerationStatus::ok) ++metrics.pool_finished;
        else ++rec.aborted;
      }
      if (gen.status != GenerationStatus::ok) continue;
      if (is_adversary(p)) {
        ++metrics.adversary_blocks;
        if (cfg_.adversary.forge_descriptor) {
          gen.block->header.sig_descriptor = sign(dh.bytes, pools_[p].keys.sk);
        }
        adversary_found = gen.block->header.timestamp_ms;
      }
      blocks.push_back(std::move(*gen.block));
      producer.push_back(p);
    }
    rec.blocks = blocks.size();
    for (std::size_t a = 0; a < indices.size(); ++a)
      for (std::size_t b = a + 1; b < indices.size(); ++b) rec.collisions += indices[a] == indices[b];
    rec.distinct_roots = roots.size() == indices.size();
    metrics.collisions += rec.collisions;
    const double k = static_cast<double>(indices.size());
    metrics.expected_collisions += k * (k - 1.0) / 2.0 / static_cast<double>(cfg_.z);
    metrics.root_violations += rec.distinct_roots ? 0 : 1;

    // Delivery
    Rng net(derive_seed(cfg_.seed, (3ULL << 40) + e));
    std::priority_queue<Delivery, std::vector<Delivery>, std::greater<>> queue;
    std::uint64_t order = 0;
    std::vector<std::size_t> adversary_withheld_new;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const std::size_t p = producer[b];
      if (is_adversary(p)) {
        private_view_->add_block(blocks[b], true);
        private_tip_ = block_digest(blocks[b]);
        withheld_.push_back(blocks[b]);
        queue.push({*adversary_found, b, p, order++, true});
        continue;
      }
      for (std::size_t q = 0; q < cfg_.pools; ++q) {
        const std::int64_t delay = q == p ? 0 : cfg_.network.delay(net);
        queue.push({blocks[b].header.timestamp_ms + delay, b, q, order++, false});
      }
    }

    std::vector<EpochVerifier> verifiers;
    for (std::size_t q = 0; q < cfg_.pools; ++q) verifiers.emplace_back(committee_pks, *store, origin);
    std::map<Digest, Verdict> content;
    std::vector<Block> released;  // adversary blocks in flight, indexed past `blocks`
    auto block_at = [&](std::size_t i) -> const Block& { return i < blocks.size() ? blocks[i] : released[i - blocks.size()]; };

    while (!queue.empty()) {
      const Delivery ev = queue.top();
      queue.pop();
      if (ev.release) {
        const double private_work = private_view_->find(private_tip_)->cumulative;
        if (withheld_.size() >= cfg_.adversary.withhold_epochs && heavier(private_work, nodes_[honest_].tip().cumulative)) {
          ++metrics.adversary_releases;
          for (auto& w : withheld_) {
            released.push_back(std::move(w));
            const std::size_t idx = blocks.size() + released.size() - 1;
            for (std::size_t q = 0; q < honest_; ++q) queue.push({ev.at + cfg_.network.delay(net), idx, q, order++, false});
            queue.push({ev.at, idx, honest_, order++, false});  // the adversary's public view
          }
          withheld_.clear();
        }
        continue;
      }
      const Block& blk = block_at(ev.block);
      const Digest bd = block_digest(blk);
      const std::uint64_t id = blk.header.instance_id();
      auto ectx = epochs_.find(id);
      if (ectx == epochs_.end()) {
        ++metrics.rejected_late;
        continue;
      }
      auto memo = content.find(bd);
      if (memo == content.end()) {
        memo = content.emplace(bd, check_block_content(blk, ectx->second.committee, 0, *ectx->second.store)).first;
      }
      Verdict v;
      if (id == approval.instance_id) {
        v = verifiers[ev.node].submit(blk, start_ids[ev.node], ev.at, &memo->second);
      } else {
        VerifyContext vc;
        vc.now_ms = ev.at;
        vc.epoch_origin_ms = ectx->second.origin;
        vc.committee = ectx->second.committee;
        vc.store = ectx->second.store.get();
        v = verify_block(blk, vc, &memo->second);
      }
      if (v.reason == RejectReason::deadline_passed) ++metrics.rejected_late;
      if (v.reason == RejectReason::bad_descriptor_signature) ++metrics.rejected_forged;
      // A non-improving block still counts as a fork candidate, but only with valid content.
      if (v.accepted() || (v.reason == RejectReason::not_improving && memo->second.accepted())) {
        nodes_[ev.node].add_block(blk, true);
        if (private_view_ && ev.node == honest_) private_view_->add_block(blk, true);
      }
    }

    // Adversary abandons a private fork that is not ahead.
    if (private_view_) {
      const ChainNode* mine = private_view_->find(private_tip_);
      if (mine == nullptr || !heavier(mine->cumulative, nodes_[honest_].tip().cumulative)) {
        private_tip_ = nodes_[honest_].tip().digest;
        withheld_.clear();
      }
    }

    // Epoch outcome on the reference node
    const ChainNode& tip = ref.tip();
    if (tip.instance_id == approval.instance_id) {
      rec.winner = tip.miner;
      rec.set_size = tip.set_size;
      rec.work = tip.work;
      auto bi = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) { return block_digest(b) == tip.digest; });
      if (bi != blocks.end()) {
        const std::size_t p = producer[static_cast<std::size_t>(bi - blocks.begin())];
        rec.gen_ms = bi->header.timestamp_ms - origin;
        auto memo = content.find(tip.digest);
        if (memo != content.end()) rec.verify_ms = detail::modeled_ms(memo->second.work_units, cfg_.units_per_ms);
        const auto& solved = solves.at(p);
        const auto flagged = detect_free_riders(solved.ledger);
        rec.flagged = flagged.size();
        const RewardSplit split = distribute_reward(cfg_.reward, solved.ledger, flagged);
        rec.payout = cfg_.reward - split.manager_remainder;
      }
    }
    clock_ms_ = origin + t_max + cfg_.network.eta_ms + 1;
    finish_record(rec);
    return rec;
  }

  void finish_record(EpochRecord& rec) const {
    std::set<Digest> tips;
    for (std::size_t q = 0; q < honest_; ++q) {
      tips.insert(nodes_[q].tip().digest);
      rec.reorg_depth = std::max(rec.reorg_depth, nodes_[q].max_reorg_depth());
      rec.reversions += nodes_[q].reversions();
    }
    rec.forks = tips.size();
    rec.committed_height = nodes_[0].committed_height();
  }

  SimConfig cfg_;
  std::size_t honest_ = 0;
  std::vector<Participant> pools_;
  std::vector<PoolConfig> pool_configs_;
  std::vector<KeyPair> utility_keys_;
  UtilityRegistry registry_;
  std::vector<std::string> bootstrap_;
  std::vector<ChainState> nodes_;
  std::optional<ChainState> private_view_;
  Digest private_tip_{};
  std::vector<Block> withheld_;
  std::map<std::uint64_t, EpochContext> epochs_;
  ApprovalAuthority authority_;
  LookupTable table_;
  std::int64_t clock_ms_ = 0;
};

inline RunMetrics run_honest(SimConfig config) {
  config.adversary = {};
  return Simulation(std::move(config)).run();
}

/// The last pool is a selfish adversary holding `lambda` of total power.
inline RunMetrics run_selfish(SimConfig config, double lambda, bool forge_descriptor = false) {
  if (!(lambda >= 0.0 && lambda < 0.5)) throw ParameterError("selfish scenario needs 0 <= lambda < 0.5");
  config.adversary.mode = AdversaryMode::selfish;
  config.adversary.lambda = lambda;
  config.adversary.forge_descriptor = forge_descriptor;
  return Simulation(std::move(config)).run();
}

// ---------------------------------------------------------------------------
// Replay attack payoff

/// Exact rational in [0, 1].
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Fraction parse(std::string_view text) {
    Fraction f{0, 1};
    const auto dot = text.find('.');
    std::string digits(text.substr(0, dot));
    if (dot != std::string_view::npos) {
      const auto frac = text.substr(dot + 1);
      digits += frac;
      for (std::size_t i = 0; i < frac.size(); ++i) f.den *= 10;
    }
    if (digits.empty() || digits.size() > 18 || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw ParameterError("not a decimal fraction: '" + std::string(text) + "'");
    }
    f.num = std::stoull(digits);
    return f;
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct ReplayPayoff {
  __int128 numerator = 0;  // payoff = numerator / denominator
  std::uint64_t denominator = 1;
  bool profitable = false;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
};

/// λF − (1−λ)·rd, attack profitable iff F > ((1−λ)/λ)·rd.
inline ReplayPayoff replay_payoff(Fraction lambda, Coin fee, Coin reward) {
  if (lambda.den == 0) throw ParameterError("zero denominator");
  if (2 * static_cast<unsigned __int128>(lambda.num) > lambda.den) throw ParameterError("lambda must not exceed 0.5");
  ReplayPayoff out;
  out.denominator = lambda.den;
  out.numerator = static_cast<__int128>(lambda.num) * fee - static_cast<__int128>(lambda.den - lambda.num) * reward;
  out.profitable = lambda.num > 0 && static_cast<unsigned __int128>(fee) * lambda.num >
                                         static_cast<unsigned __int128>(reward) * (lambda.den - lambda.num);
  return out;
}

// ---------------------------------------------------------------------------
// Solution theft

struct TheftResult {
  std::size_t n = 0;
  std::uint64_t search_space = 0;  // n!
  std::uint64_t tried = 0;
  bool success = false;
};

inline constexpr std::size_t kTheftMaxN = 12;

/// A lazy pool holding the winner's solution for `source` searches vertex
/// bijections, in lexicographic order, for one that maps `source` onto its own
/// instance, giving up after `budget` candidates.
inline TheftResult attempt_theft(const Graph& source, const Graph& own, std::uint64_t budget) {
  const std::size_t n = source.vertex_count();
  if (n > kTheftMaxN) throw ParameterError("theft search refuses n > " + std::to_string(kTheftMaxN));
  if (own.vertex_count() != n) throw ParameterError("instances differ in size");
  TheftResult out;
  out.n = n;
  out.search_space = 1;
  for (std::size_t i = 2; i <= n; ++i) out.search_space *= i;
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), Vertex{0});
  const auto edges = source.edges();
  do {
    if (out.tried == budget) break;
    ++out.tried;
    bool iso = true;
    for (const auto& [a, b] : edges) {
      if (!own.has_edge(perm[a], perm[b])) {
        iso = false;
        break;
      }
    }
    if (iso) {
      out.success = true;
      break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

/// Theft against a fresh pair of isomorphs of a BA graph. `identical` forces
/// both pools onto the same instance.
inline TheftResult run_solution_theft(std::uint64_t seed, std::size_t n, std::uint64_t budget, bool identical = false) {
  if (n > kTheftMaxN) throw ParameterError("theft search refuses n > " + std::to_string(kTheftMaxN));
  if (n < 3) throw ParameterError("theft scenario needs n >= 3");
  const Graph g = generate_ba(n, 2, derive_seed(seed, 0));
  const auto pool = make_instance_pool(g, 2, derive_seed(seed, 1));
  const Graph& victim = pool[0].graph;
  const Graph& own = identical ? pool[0].graph : pool[1].graph;
  return attempt_theft(victim, own, budget);
}

// ---------------------------------------------------------------------------
// Storage

struct StorageReport {
  double scalowork = 0.0;  // edges stored
  double chrisimos = 0.0;
  double difference = 0.0;
};

inline StorageReport storage_accounting(std::uint64_t pools, std::uint64_t m, std::uint64_t n, std::uint64_t delta_min) {
  if (pools == 0) throw ParameterError("storage accounting needs K >= 1");
  if (n == 0) throw ParameterError("storage accounting needs n >= 1");
  StorageReport r;
  const double K = static_cast<double>(pools), E = static_cast<double>(m);
  r.scalowork = 2.0 * K * E;
  r.chrisimos = K * (2.0 * E + static_cast<double>(delta_min) * static_cast<double>(n - 1) / 2.0) + E;
  r.difference = r.chrisimos - r.scalowork;
  return r;
}

inline StorageReport storage_accounting(std::uint64_t pools, const Graph& g) {
  const auto p = properties(g);
  return storage_accounting(pools, p.m, p.n, p.delta_min);
}

/// Σ ln(b!) over vertex-degree classes of size b: log of the number of
/// degree-preserving vertex matchings between two isomorphs.
inline double degree_ambiguity_log(const Graph& g) {
  std::map<std::size_t, std::size_t> classes;
  for (Vertex v = 0; v < g.vertex_count(); ++v) ++classes[g.degree(v)];
  double total = 0.0;
  for (const auto& [deg, b] : classes) total += std::lgamma(static_cast<double>(b) + 1.0);
  return total;
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchConfig {
  std::vector<std::size_t> node_counts{10000};
  std::vector<double> avg_degrees{50};
  std::vector<unsigned> workers{1};
  std::uint64_t seed = 1;
  std::int64_t cutoff_ms = 15 * 60 * 1000;
  bool wall_clock = false;  // add measured times (not reproducible)
  double units_per_ms = 2000.0;
  std::uint64_t memory_limit_bytes = 8ULL << 30;

  void validate() const {
    if (node_counts.empty() || avg_degrees.empty() || workers.empty()) throw ParameterError("empty benchmark sweep");
    for (auto n : node_counts)
      if (n < 2) throw ParameterError("benchmark needs n >= 2");
    for (auto w : workers)
      if (w == 0) throw ParameterError("worker count must be at least 1");
    for (auto d : avg_degrees)
      if (!(d >= 2.0)) throw ParameterError("benchmark degree must be at least 2");
    if (cutoff_ms <= 0 || !(units_per_ms > 0.0)) throw ParameterError("cutoff and throughput must be positive");
  }
};

struct BenchRow {
  std::size_t n = 0;
  double avg_degree = 0;
  std::uint64_t m = 0;
  unsigned workers = 0;
  std::string status;  // ok | censored | skipped-memory
  std::size_t set_size = 0;
  std::size_t rounds = 0;
  std::uint64_t gen_units = 0;  // critical path
  std::uint64_t verify_units = 0;
  std::int64_t gen_model_ms = 0;
  std::int64_t verify_model_ms = 0;
  double gen_wall_ms = 0.0;
  double verify_wall_ms = 0.0;
};

/// Rough peak footprint of one benchmark row.
inline std::uint64_t bench_memory_estimate(std::size_t n, double avg_degree) {
  const double m = static_cast<double>(n) * avg_degree / 2.0;
  // edge list + endpoint list + CSR + solver arrays
  return static_cast<std::uint64_t>(m * (8.0 + 8.0 + 8.0) + static_cast<double>(n) * 48.0);
}

inline std::vector<BenchRow> run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<BenchRow> rows;
  for (std::size_t n : cfg.node_counts) {
    for (double d : cfg.avg_degrees) {
      const std::size_t attach = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(d / 2.0)));
      const bool too_big = bench_memory_estimate(n, d) > cfg.memory_limit_bytes || attach >= n;
      std::optional<Graph> g;
      if (!too_big) g = generate_ba(n, attach, derive_seed(cfg.seed, n * 1000 + static_cast<std::size_t>(d)));
      for (unsigned w : cfg.workers) {
        BenchRow row;
        row.n = n;
        row.avg_degree = d;
        row.workers = w;
        if (!g) {
          row.status = "skipped-memory";
          rows.push_back(row);
          continue;
        }
        row.m = g->edge_count();
        DistributedOptions opts;
        const auto t0 = std::chrono::steady_clock::now();
        const auto cutoff = t0 + std::chrono::milliseconds(cfg.cutoff_ms);
        opts.should_stop = [cutoff] { return std::chrono::steady_clock::now() >= cutoff; };
        auto r = greedy_distributed(*g, w, std::move(opts));
        const auto t1 = std::chrono::steady_clock::now();
        row.rounds = r.rounds;
        row.set_size = r.set.size();
        row.gen_units = r.critical_units;
        row.gen_model_ms = detail::modeled_ms(r.critical_units, cfg.units_per_ms);
        row.gen_wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (!r.completed) {
          row.status = "censored";
          rows.push_back(row);
          continue;
        }
        const auto t2 = std::chrono::steady_clock::now();
        const auto cover = is_dominating(*g, r.set);
        const auto t3 = std::chrono::steady_clock::now();
        if (!cover.dominating) throw ValidationError("benchmark solver produced a non-dominating set");
        for (Vertex v : r.set.vertices) row.verify_units += g->degree(v) + 1;
        row.verify_model_ms = detail::modeled_ms(row.verify_units, cfg.units_per_ms);
        row.verify_wall_ms = std::chrono::duration<double, std::milli>(t3 - t2).count();
        row.status = "ok";
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline std::string bench_csv(std::span<const BenchRow> rows, bool wall_clock) {
  std::string out = "n,avg_degree,m,workers,status,set_size,rounds,gen_units,verify_units,gen_model_ms,verify_model_ms";
  out += wall_clock ? ",gen_wall_ms,verify_wall_ms\n" : "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + ',' + detail::num(r.avg_degree) + ',' + std::to_string(r.m) + ',' +
           std::to_string(r.workers) + ',' + r.status + ',' + std::to_string(r.set_size) + ',' +
           std::to_string(r.rounds) + ',' + std::to_string(r.gen_units) + ',' + std::to_string(r.verify_units) + ',' +
           std::to_string(r.gen_model_ms) + ',' + std::to_string(r.verify_model_ms);
    if (wall_clock) out += ',' + detail::num(r.gen_wall_ms) + ',' + detail::num(r.verify_wall_ms);
    out += '\n';
  }
  return out;
}

}  // namespace scalowork
