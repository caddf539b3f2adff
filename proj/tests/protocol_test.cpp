#include <gtest/gtest.h>

#include <array>
#include <filesystem>

#include "fixtures.hpp"
#include "scalowork/protocol.hpp"

using namespace scalowork;
using scalowork::testing::EpochFixture;

TEST(InstanceIndex, ModuloOne) {
  for (int i = 0; i < 20; ++i) EXPECT_EQ(select_instance_index(hash(std::to_string(i)), hash("p"), 1), 0u);
  EXPECT_THROW(select_instance_index(hash("a"), hash("b"), 0), ParameterError);
}

TEST(InstanceIndex, RegressionVector) {
  EXPECT_EQ(select_instance_index(hash("mr"), hash("prev"), 16), 13u);
  EXPECT_EQ(select_instance_index(hash("mr"), hash("prev"), 64), 29u);
  EXPECT_EQ(select_instance_index(hash("mr"), hash("prev"), 1000), 301u);
}

TEST(InstanceIndex, PuzzleFeeRootsSpreadUniformly) {
  EpochFixture fx(generate_ba(30, 2, 1));
  constexpr std::size_t z = 16, trials = 10000;
  std::array<std::size_t, z> counts{};
  const Digest prev = hash("tip");
  for (std::size_t i = 0; i < trials; ++i) {
    const std::vector<Transaction> txs{make_puzzle_fee(fx.reward, "manager-" + std::to_string(i))};
    ++counts[select_instance_index(transactions_root(txs), prev, z)];
  }
  const double expect = static_cast<double>(trials) / z;
  double chi2 = 0;
  for (auto c : counts) chi2 += (static_cast<double>(c) - expect) * (static_cast<double>(c) - expect) / expect;
  EXPECT_LT(chi2, 30.578);  // 15 degrees of freedom, 1% level
}

TEST(Transactions, PuzzleFeesDifferByManager) {
  EpochFixture fx(generate_ba(30, 2, 1));
  const auto a = make_puzzle_fee(fx.reward, "pool-a");
  const auto b = make_puzzle_fee(fx.reward, "pool-b");
  EXPECT_NE(transactions_root(std::vector<Transaction>{a}), transactions_root(std::vector<Transaction>{b}));
  EXPECT_EQ(a.spends, fx.reward.digest());
  EXPECT_EQ(Transaction::deserialize(FieldReader(a.serialize())), a);
}

TEST(Transactions, MempoolByFeeDensityWithinBudget) {
  std::vector<Transaction> pool;
  for (Coin fee : {5u, 50u, 20u, 1u}) {
    Transaction t;
    t.from = "x";
    t.to = "y";
    t.fee = fee;
    pool.push_back(t);
  }
  const std::size_t one = pool[0].size();
  auto picked = select_mempool(pool, 2 * one);
  ASSERT_EQ(picked.size(), 2u);
  EXPECT_EQ(picked[0].fee, 50u);
  EXPECT_EQ(picked[1].fee, 20u);
  EXPECT_TRUE(select_mempool(pool, one - 1).empty());
}

TEST(Descriptor, Validation) {
  auto p = properties(make_star(3));
  EXPECT_THROW(make_descriptor(p, 1, keygen(1).pk, 0, "a", 10), ParameterError);
  EXPECT_THROW(make_descriptor(p, 1, keygen(1).pk, 1, "a", 0), ParameterError);
}

TEST(Descriptor, QuorumSizes) {
  EXPECT_EQ(committee_quorum(1), 1u);
  EXPECT_EQ(committee_quorum(3), 2u);
  EXPECT_EQ(committee_quorum(4), 3u);
  EXPECT_EQ(committee_quorum(7), 5u);
  EXPECT_EQ(committee_quorum(9), 6u);
}

TEST(Generate, StarGivesCenter) {
  EpochFixture fx(make_star(8), 1);
  auto r = fx.mine("pool-a");
  ASSERT_EQ(r.status, GenerationStatus::ok);
  EXPECT_EQ(r.block->header.solution.size(), 1u);
  const Vertex center = fx.pool[0].mapping(0);
  EXPECT_EQ(r.block->header.solution.vertices[0], center);
  EXPECT_TRUE(verify_block(*r.block, fx.context(fx.origin_ms + 20)).accepted());
}

TEST(Generate, BlockShape) {
  EpochFixture fx(generate_ba(120, 3, 2), 8);
  auto b = fx.block("pool-a", hash("prev"), 0);
  ASSERT_EQ(b.transactions.size(), 1u);
  EXPECT_EQ(b.transactions[0].kind, Transaction::Kind::puzzle_fee);
  EXPECT_EQ(b.header.merkle_root, transactions_root(b.transactions));
  EXPECT_EQ(b.header.bound, compute_bound(properties(fx.graph)).k);
  EXPECT_LE(static_cast<double>(b.header.solution.size()), b.header.bound);
  EXPECT_EQ(b.header.miner, "pool-a");
  EXPECT_EQ(b.header.prev_hash, hash("prev"));
}

TEST(Generate, TamperedDescriptorSignature) {
  EpochFixture fx(generate_ba(50, 2, 3));
  auto req = fx.request("pool-a");
  req.sig_descriptor.bytes[3] ^= 1;
  ManualClock clock(fx.origin_ms);
  EXPECT_EQ(generate_block(req, fx.store, clock, EpochFixture::greedy_solver()).status,
            GenerationStatus::bad_descriptor_signature);
}

TEST(Generate, CommitteeAndIdChecks) {
  EpochFixture fx(generate_ba(50, 2, 3));
  ManualClock clock(fx.origin_ms);
  auto req = fx.request("pool-a");
  req.approval.signature.data[0] ^= 1;
  EXPECT_EQ(generate_block(req, fx.store, clock, EpochFixture::greedy_solver()).status,
            GenerationStatus::bad_committee_signature);
  EXPECT_EQ(fx.mine("pool-a", {}, fx.approval.instance_id).status, GenerationStatus::stale_id);
}

TEST(Generate, InstancePropertyMismatch) {
  EpochFixture fx(generate_ba(50, 2, 3), 1);
  const Graph other = generate_ba(51, 2, 3);
  fx.store.put(descriptor_hash(fx.descriptor), 0, other, sign_instance(other, fx.utility.sk));
  EXPECT_EQ(fx.mine("pool-a").status, GenerationStatus::property_mismatch);
}

TEST(Generate, MissingOrForgedInstance) {
  EpochFixture fx(generate_ba(50, 2, 3), 1);
  MemoryInstanceStore empty;
  ManualClock clock(fx.origin_ms);
  EXPECT_EQ(generate_block(fx.request("a"), empty, clock, EpochFixture::greedy_solver()).status,
            GenerationStatus::instance_missing);
  fx.store.put(descriptor_hash(fx.descriptor), 0, fx.pool[0].graph, sign_instance(fx.pool[0].graph, keygen(77).sk));
  EXPECT_EQ(fx.mine("a").status, GenerationStatus::bad_instance_signature);
}

TEST(Generate, AbortsWhenDeadlineReached) {
  EpochFixture fx(generate_ba(80, 2, 3), 2, 1, 100);
  ManualClock clock(fx.origin_ms);
  // Each attempt costs 60 ms and yields nothing within the bound.
  PoolSolver slow = [&](const Graph& g) -> std::optional<DominatingSet> {
    clock.advance(60);
    std::vector<Vertex> all(g.vertex_count());
    for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
    return DominatingSet{all, g.vertex_count()};
  };
  auto r = generate_block(fx.request("a"), fx.store, clock, slow);
  EXPECT_EQ(r.status, GenerationStatus::aborted);
  EXPECT_EQ(r.attempts, 2u);
  EXPECT_FALSE(r.block);
}

TEST(Generate, KeepsImprovingUntilBound) {
  EpochFixture fx(generate_ba(80, 2, 3), 2);
  ManualClock clock(fx.origin_ms);
  std::size_t calls = 0;
  PoolSolver staged = [&](const Graph& g) -> std::optional<DominatingSet> {
    ++calls;
    if (calls == 1) {
      std::vector<Vertex> all(g.vertex_count());
      for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
      return DominatingSet{all, g.vertex_count()};
    }
    return greedy_distributed(g, 1).set;
  };
  auto r = generate_block(fx.request("a"), fx.store, clock, staged);
  EXPECT_EQ(r.status, GenerationStatus::ok);
  EXPECT_EQ(calls, 2u);
}

class Rejection : public ::testing::Test {
 protected:
  EpochFixture fx{generate_ba(150, 3, 5), 8};
  Block honest = fx.block("pool-a", hash("prev"), 0);
  std::int64_t now = fx.origin_ms + 100;

  RejectReason check(const Block& b, const VerifyContext& ctx) const { return verify_block(b, ctx).reason; }
  RejectReason check(const Block& b) const { return check(b, fx.context(now)); }
};

TEST_F(Rejection, HonestAccepted) {
  auto v = verify_block(honest, fx.context(now));
  EXPECT_TRUE(v.accepted());
  EXPECT_GT(v.work_units, 0u);
}

TEST_F(Rejection, MerkleMismatch) {
  Block b = honest;
  b.transactions[0].memo = "tampered";
  EXPECT_EQ(check(b), RejectReason::merkle_mismatch);
}

TEST_F(Rejection, Deadline) {
  EXPECT_EQ(check(honest, fx.context(fx.origin_ms + fx.descriptor.t_max_ms)), RejectReason::deadline_passed);
  EXPECT_EQ(check(honest, fx.context(fx.origin_ms + fx.descriptor.t_max_ms - 1)), RejectReason::none);
}

TEST_F(Rejection, StaleId) {
  EXPECT_EQ(check(honest, fx.context(now, fx.approval.instance_id)), RejectReason::stale_id);
}

TEST_F(Rejection, NotImproving) {
  const auto size = honest.header.solution.size();
  EXPECT_EQ(check(honest, fx.context(now, 0, size)), RejectReason::not_improving);
  EXPECT_EQ(check(honest, fx.context(now, 0, size + 1)), RejectReason::none);
}

TEST_F(Rejection, BadDescriptorSignature) {
  Block b = honest;
  b.header.sig_descriptor.bytes[10] ^= 0x80;
  EXPECT_EQ(check(b), RejectReason::bad_descriptor_signature);
}

TEST_F(Rejection, BadCommitteeSignature) {
  Block b = honest;
  b.header.approval.signature.data.back() ^= 1;
  EXPECT_EQ(check(b), RejectReason::bad_committee_signature);
  Block outsider = honest;
  outsider.header.approval.signers[0] = keygen(4242).pk;
  EXPECT_EQ(check(outsider), RejectReason::bad_committee_signature);
}

TEST_F(Rejection, BadInstanceSignature) {
  const auto index = verify_block(honest, fx.context(now)).index;
  const Graph& g = fx.pool[index].graph;
  fx.store.put(descriptor_hash(fx.descriptor), index, g, sign_instance(g, keygen(31337).sk));
  EXPECT_EQ(check(honest), RejectReason::bad_instance_signature);
}

TEST_F(Rejection, UncoveredVertex) {
  const auto index = verify_block(honest, fx.context(now)).index;
  const Graph& g = fx.pool[index].graph;
  Block b = honest;
  auto& s = b.header.solution.vertices;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto trial = s;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (!is_dominating(g, DominatingSet{trial, g.vertex_count()}).dominating) {
      s = trial;
      break;
    }
  }
  ASSERT_LT(s.size(), honest.header.solution.size());
  auto v = verify_block(b, fx.context(now));
  EXPECT_EQ(v.reason, RejectReason::uncovered_vertex);
  EXPECT_FALSE(v.uncovered.empty());
}

TEST_F(Rejection, ExtraReasons) {
  Block b = honest;
  b.header.bound += 1.0;
  EXPECT_EQ(check(b), RejectReason::bound_mismatch);
  Block unsorted = honest;
  std::reverse(unsorted.header.solution.vertices.begin(), unsorted.header.solution.vertices.end());
  EXPECT_EQ(check(unsorted), RejectReason::malformed_solution);
  MemoryInstanceStore empty;
  auto ctx = fx.context(now);
  ctx.store = &empty;
  EXPECT_EQ(check(honest, ctx), RejectReason::instance_missing);
}

TEST_F(Rejection, EveryReasonHasDistinctName) {
  std::set<std::string_view> names;
  for (std::size_t r = 0; r < kRejectReasonCount; ++r) names.insert(reason_name(static_cast<RejectReason>(r)));
  EXPECT_EQ(names.size(), kRejectReasonCount);
}

TEST(EpochVerifierTest, StrictImprovementAndClose) {
  EpochFixture fx(generate_ba(150, 3, 5), 8);
  EpochVerifier verifier(fx.committee, fx.store, fx.origin_ms);
  EXPECT_FALSE(verifier.past_size());
  Block first = fx.block("pool-a");
  Block second = fx.block("pool-b");
  ASSERT_NE(block_digest(first), block_digest(second));
  EXPECT_TRUE(verifier.submit(first, 0, fx.origin_ms + 50).accepted());
  EXPECT_EQ(verifier.past_size(), first.header.solution.size());
  if (second.header.solution.size() >= first.header.solution.size()) {
    EXPECT_EQ(verifier.submit(second, 0, fx.origin_ms + 60).reason, RejectReason::not_improving);
    EXPECT_EQ(verifier.best(), first);
  }
  auto committed = verifier.close_epoch();
  ASSERT_TRUE(committed);
  EXPECT_FALSE(verifier.past_size());
  EXPECT_FALSE(verifier.best());
}

TEST(Serialization, RoundTripAndCanonical) {
  EpochFixture fx(generate_ba(60, 2, 4), 4);
  Block b = fx.block("pool-a", hash("prev"), 0);
  Transaction extra;
  extra.from = "alice";
  extra.to = "bob";
  extra.amount = 5;
  extra.fee = 1;
  b.transactions.push_back(extra);
  const Bytes bytes = serialize_block(b);
  const Block back = deserialize_block(bytes);
  EXPECT_EQ(back, b);
  EXPECT_EQ(serialize_block(back), bytes);
  EXPECT_EQ(block_digest(back), block_digest(b));
}

TEST(Serialization, TruncationAndGarbage) {
  EpochFixture fx(generate_ba(60, 2, 4), 4);
  const Bytes bytes = serialize_block(fx.block("pool-a"));
  for (std::size_t cut : {std::size_t{1}, bytes.size() / 2, bytes.size() - 1}) {
    Bytes t(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
    EXPECT_THROW(deserialize_block(t), DecodeError) << "cut " << cut;
  }
  Bytes trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(deserialize_block(trailing), DecodeError);
  EXPECT_THROW(deserialize_block(FieldWriter().field("not-a-block").take()), DecodeError);
}

// Regression pin: changes whenever the header encoding or key derivation does.
TEST(Serialization, GoldenDigest) {
  EpochFixture fx(make_star(6), 2, 42);
  const Block b = fx.block("golden-pool", hash("genesis"), 0);
  EXPECT_EQ(block_digest(b).hex(), "dc74d4db774fb83d9025a2ac384dab3d8634187bf3f83859b0c027944f40e730");
}

TEST(Store, DirectoryLayout) {
  const auto root = std::filesystem::temp_directory_path() / "scalowork_store_test";
  std::filesystem::remove_all(root);
  EpochFixture fx(generate_ba(40, 2, 6), 3);
  DirectoryInstanceStore dir(root);
  const Digest dh = descriptor_hash(fx.descriptor);
  publish_instances(dir, dh, fx.pool, fx.utility.sk);
  EXPECT_TRUE(std::filesystem::exists(root / dh.hex() / "2.graph"));
  EXPECT_TRUE(std::filesystem::exists(root / dh.hex() / "2.sig"));
  auto rec = dir.fetch(dh, 1);
  ASSERT_TRUE(rec);
  EXPECT_EQ(*rec->graph, fx.pool[1].graph);
  EXPECT_TRUE(verify_instance(*rec->graph, rec->signature, fx.utility.pk));
  EXPECT_FALSE(dir.fetch(dh, 3));
  std::filesystem::remove_all(root);
}
