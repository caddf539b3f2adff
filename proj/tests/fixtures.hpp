#pragma once

// One approved epoch: utility keys, committee, descriptor, signed isomorphs in
// a memory store, and a helper that mines a block for a given manager.

#include <memory>
#include <string>
#include <vector>

#include "scalowork/committee.hpp"
#include "scalowork/graph.hpp"
#include "scalowork/mds.hpp"
#include "scalowork/protocol.hpp"

namespace scalowork::testing {

struct EpochFixture {
  Graph graph;
  KeyPair utility;
  std::vector<CommitteeMember> members;
  std::vector<PublicKey> committee;
  ProblemDescriptor descriptor;
  Signature sig_descriptor;
  CommitteeApproval approval;
  std::vector<Isomorph> pool;
  MemoryInstanceStore store;
  RewardTransaction reward;
  std::int64_t origin_ms = 1000;

  explicit EpochFixture(Graph g, std::uint64_t z = 4, std::uint64_t seed = 1, std::int64_t t_max_ms = 60000,
                        std::uint64_t last_id = 0, std::size_t committee_size = 3)
      : graph(std::move(g)), utility(keygen("utility", seed)) {
    for (std::size_t i = 0; i < committee_size; ++i) {
      const std::string id = "member-" + std::to_string(i);
      members.push_back({id, keygen(id, seed)});
      committee.push_back(members.back().keys.pk);
    }
    descriptor = make_descriptor(properties(graph), 100, utility.pk, z, "mem://epoch", t_max_ms);
    const Digest dh = descriptor_hash(descriptor);
    sig_descriptor = sign(dh.bytes, utility.sk);
    ApprovalAuthority authority(last_id);
    approval = authority.approve(descriptor, HardnessPolicy{}, members);
    pool = make_instance_pool(graph, z, derive_seed(seed, 7));
    publish_instances(store, dh, pool, utility.sk);
    reward = make_reward_transaction(descriptor, origin_ms, committee);
  }

  MiningRequest request(const std::string& manager, const Digest& prev_hash = {}, std::uint64_t prev_id = 0) const {
    MiningRequest r;
    r.descriptor = descriptor;
    r.sig_descriptor = sig_descriptor;
    r.approval = approval;
    r.reward = reward;
    r.prev_hash = prev_hash;
    r.prev_instance_id = prev_id;
    r.manager = manager;
    return r;
  }

  static PoolSolver greedy_solver() {
    return [](const Graph& g) -> std::optional<DominatingSet> { return greedy_distributed(g, 2).set; };
  }

  GenerationResult mine(const std::string& manager, const Digest& prev_hash = {}, std::uint64_t prev_id = 0) const {
    ManualClock clock(origin_ms + 10);
    return generate_block(request(manager, prev_hash, prev_id), store, clock, greedy_solver());
  }

  Block block(const std::string& manager, const Digest& prev_hash = {}, std::uint64_t prev_id = 0) const {
    auto r = mine(manager, prev_hash, prev_id);
    if (!r.block) throw std::runtime_error("fixture mining failed: " + std::string(status_name(r.status)));
    return *r.block;
  }

  VerifyContext context(std::int64_t now_ms, std::uint64_t prev_id = 0,
                        std::optional<std::size_t> past_size = std::nullopt) const {
    VerifyContext ctx;
    ctx.past_size = past_size;
    ctx.prev_instance_id = prev_id;
    ctx.now_ms = now_ms;
    ctx.epoch_origin_ms = origin_ms;
    ctx.committee = committee;
    ctx.store = &store;
    return ctx;
  }
};

}  // namespace scalowork::testing
