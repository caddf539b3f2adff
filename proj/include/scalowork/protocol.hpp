#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scalowork/crypto.hpp"
#include "scalowork/errors.hpp"
#include "scalowork/graph.hpp"
#include "scalowork/mds.hpp"

namespace scalowork {

using Coin = std::uint64_t;

/// ⌈2/3 · c_m⌉ signers.
constexpr std::size_t committee_quorum(std::size_t committee_size) noexcept { return (2 * committee_size + 2) / 3; }

// ---------------------------------------------------------------------------
// Problem descriptor P_G

struct ProblemDescriptor {
  Coin reward = 0;
  PublicKey utility_pk;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t delta_min = 0;
  std::uint64_t delta_max = 0;
  std::uint64_t z = 1;
  std::string instance_addr;
  std::int64_t t_max_ms = 0;

  GraphProperties properties() const { return {n, m, delta_min, delta_max}; }

  bool matches(const GraphProperties& p) const {
    return p.n == n && p.m == m && p.delta_min == delta_min && p.delta_max == delta_max;
  }

  friend bool operator==(const ProblemDescriptor&, const ProblemDescriptor&) = default;
};

inline ProblemDescriptor make_descriptor(const GraphProperties& p, Coin reward, const PublicKey& utility_pk,
                                         std::uint64_t z, std::string instance_addr, std::int64_t t_max_ms) {
  if (z == 0) throw ParameterError("descriptor needs z >= 1");
  if (t_max_ms <= 0) throw ParameterError("descriptor needs t_max > 0");
  return {reward, utility_pk, p.n, p.m, p.delta_min, p.delta_max, z, std::move(instance_addr), t_max_ms};
}

inline FieldWriter encode(const ProblemDescriptor& d) {
  FieldWriter w;
  w.u64(d.reward).hex(d.utility_pk).u64(d.n).u64(d.m).u64(d.delta_min).u64(d.delta_max).u64(d.z);
  w.field(d.instance_addr).i64(d.t_max_ms);
  return w;
}

inline ProblemDescriptor decode_descriptor(FieldReader r) {
  ProblemDescriptor d;
  d.reward = r.u64();
  d.utility_pk = r.hex<PublicKey>();
  d.n = r.u64();
  d.m = r.u64();
  d.delta_min = r.u64();
  d.delta_max = r.u64();
  d.z = r.u64();
  d.instance_addr = r.text();
  d.t_max_ms = r.i64();
  r.expect_end();
  return d;
}

/// H(P_G)
inline Digest descriptor_hash(const ProblemDescriptor& d) { return hash(encode(d).bytes()); }

/// The bytes committee members sign: id ‖ H(P_G).
inline Bytes committee_message(std::uint64_t instance_id, const Digest& descriptor) {
  return FieldWriter().u64(instance_id).field(descriptor.bytes).take();
}

struct CommitteeApproval {
  std::uint64_t instance_id = 0;
  std::vector<PublicKey> signers;
  AggregateSignature signature;

  friend bool operator==(const CommitteeApproval&, const CommitteeApproval&) = default;
};

/// Quorum of distinct committee members signed id ‖ H(P_G).
inline bool verify_approval(const CommitteeApproval& a, const Digest& descriptor, std::span<const PublicKey> committee,
                            std::size_t quorum) {
  if (a.signers.empty() || a.signers.size() < quorum) return false;
  std::vector<PublicKey> sorted = a.signers;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (const auto& pk : a.signers)
    if (std::find(committee.begin(), committee.end(), pk) == committee.end()) return false;
  return aggregate_verify(a.signature, committee_message(a.instance_id, descriptor), a.signers);
}

/// Aggregate is internally consistent (every listed signer signed); does not
/// check committee membership.
inline bool approval_self_consistent(const CommitteeApproval& a, const Digest& descriptor) {
  return !a.signers.empty() && aggregate_verify(a.signature, committee_message(a.instance_id, descriptor), a.signers);
}

// ---------------------------------------------------------------------------
// Transactions

struct Transaction {
  enum class Kind : std::uint8_t { transfer = 0, puzzle_fee = 1 };

  Kind kind = Kind::transfer;
  std::string from;
  std::string to;
  Coin amount = 0;
  Coin fee = 0;
  Digest spends{};  // puzzle fee: digest of the reward transaction
  std::string memo;

  Bytes serialize() const {
    return FieldWriter()
        .u64(static_cast<std::uint64_t>(kind))
        .field(from)
        .field(to)
        .u64(amount)
        .u64(fee)
        .hex(spends)
        .field(memo)
        .take();
  }

  static Transaction deserialize(FieldReader r) {
    Transaction t;
    const auto at = r.offset();
    const auto kind = r.u64();
    if (kind > 1) throw DecodeError("unknown transaction kind", at);
    t.kind = static_cast<Kind>(kind);
    t.from = r.text();
    t.to = r.text();
    t.amount = r.u64();
    t.fee = r.u64();
    t.spends = r.hex<Digest>();
    t.memo = r.text();
    r.expect_end();
    return t;
  }

  std::size_t size() const { return serialize().size(); }

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// τ_reward: time-locked payout for the best solution of one descriptor.
struct RewardTransaction {
  Digest descriptor_hash{};
  std::int64_t broadcast_ms = 0;  // epoch origin shared by miners and verifiers
  std::int64_t timelock_ms = 0;   // = T_max
  std::vector<PublicKey> committee;
  PublicKey utility_pk;
  Coin amount = 0;

  Digest digest() const {
    FieldWriter signers;
    for (const auto& pk : committee) signers.hex(pk);
    return hash(FieldWriter()
                    .field("reward")
                    .hex(descriptor_hash)
                    .i64(broadcast_ms)
                    .i64(timelock_ms)
                    .nested(signers)
                    .hex(utility_pk)
                    .u64(amount)
                    .bytes());
  }
};

inline RewardTransaction make_reward_transaction(const ProblemDescriptor& d, std::int64_t broadcast_ms,
                                                 std::vector<PublicKey> committee) {
  return {descriptor_hash(d), broadcast_ms, d.t_max_ms, std::move(committee), d.utility_pk, d.reward};
}

/// τ_{rd,M}: spends the reward output to the pool manager. Distinct managers
/// give distinct transactions, hence distinct Merkle roots.
inline Transaction make_puzzle_fee(const RewardTransaction& reward, std::string manager) {
  Transaction t;
  t.kind = Transaction::Kind::puzzle_fee;
  t.from = "reward";
  t.to = std::move(manager);
  t.amount = reward.amount;
  t.spends = reward.digest();
  return t;
}

/// Highest fee per byte first, within `byte_budget` serialized bytes.
inline std::vector<Transaction> select_mempool(std::span<const Transaction> mempool, std::size_t byte_budget) {
  struct Entry {
    const Transaction* tx;
    std::size_t size;
    Digest id;
  };
  std::vector<Entry> entries;
  entries.reserve(mempool.size());
  for (const auto& tx : mempool) {
    auto bytes = tx.serialize();
    entries.push_back({&tx, bytes.size(), hash(bytes)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    const auto lhs = static_cast<unsigned __int128>(a.tx->fee) * b.size;
    const auto rhs = static_cast<unsigned __int128>(b.tx->fee) * a.size;
    if (lhs != rhs) return lhs > rhs;
    return a.id < b.id;
  });
  std::vector<Transaction> out;
  std::size_t used = 0;
  for (const auto& e : entries) {
    if (used + e.size > byte_budget) continue;
    used += e.size;
    out.push_back(*e.tx);
  }
  return out;
}

inline Digest transactions_root(std::span<const Transaction> txs) {
  std::vector<Bytes> leaves;
  leaves.reserve(txs.size());
  for (const auto& t : txs) leaves.push_back(t.serialize());
  return merkle_root(leaves);
}

// ---------------------------------------------------------------------------
// Blocks

struct BlockHeader {
  Digest prev_hash{};
  Digest merkle_root{};
  DominatingSet solution;
  double bound = 0.0;
  ProblemDescriptor descriptor;
  Signature sig_descriptor;
  CommitteeApproval approval;
  std::int64_t timestamp_ms = 0;
  std::string miner;

  std::uint64_t instance_id() const noexcept { return approval.instance_id; }

  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block {
  BlockHeader header;
  std::vector<Transaction> transactions;

  friend bool operator==(const Block&, const Block&) = default;
};

inline constexpr std::string_view kBlockMagic = "scalowork-block/1";

inline Bytes serialize_header(const BlockHeader& h) {
  Bytes vertices;
  vertices.reserve(h.solution.vertices.size() * 4);
  for (Vertex v : h.solution.vertices)
    for (int shift = 24; shift >= 0; shift -= 8) vertices.push_back(static_cast<std::uint8_t>(v >> shift));
  FieldWriter solution;
  solution.u64(h.solution.graph_n).field(vertices);
  FieldWriter signers;
  for (const auto& pk : h.approval.signers) signers.hex(pk);
  FieldWriter approval;
  approval.u64(h.approval.instance_id).nested(signers).field(h.approval.signature.hex());
  return FieldWriter()
      .hex(h.prev_hash)
      .hex(h.merkle_root)
      .nested(solution)
      .u64(std::bit_cast<std::uint64_t>(h.bound))
      .nested(encode(h.descriptor))
      .hex(h.sig_descriptor)
      .nested(approval)
      .i64(h.timestamp_ms)
      .field(h.miner)
      .take();
}

inline BlockHeader deserialize_header(FieldReader r) {
  BlockHeader h;
  h.prev_hash = r.hex<Digest>();
  h.merkle_root = r.hex<Digest>();
  {
    auto s = r.nested();
    h.solution.graph_n = s.u64();
    const auto at = s.offset();
    auto raw = s.field();
    if (raw.size() % 4 != 0) throw DecodeError("vertex list length not a multiple of 4", at);
    h.solution.vertices.reserve(raw.size() / 4);
    for (std::size_t i = 0; i < raw.size(); i += 4) {
      h.solution.vertices.push_back(static_cast<Vertex>(raw[i]) << 24 | static_cast<Vertex>(raw[i + 1]) << 16 |
                                    static_cast<Vertex>(raw[i + 2]) << 8 | static_cast<Vertex>(raw[i + 3]));
    }
    s.expect_end();
  }
  h.bound = std::bit_cast<double>(r.u64());
  h.descriptor = decode_descriptor(r.nested());
  h.sig_descriptor = r.hex<Signature>();
  {
    auto a = r.nested();
    h.approval.instance_id = a.u64();
    auto signers = a.nested();
    while (!signers.at_end()) h.approval.signers.push_back(signers.hex<PublicKey>());
    const auto at = a.offset();
    try {
      h.approval.signature = AggregateSignature::from_hex(a.text());
    } catch (const DecodeError& e) {
      throw DecodeError(std::string("bad aggregate signature: ") + e.what(), at);
    }
    a.expect_end();
  }
  h.timestamp_ms = r.i64();
  h.miner = r.text();
  r.expect_end();
  return h;
}

/// Canonical block bytes; also the on-disk block format.
inline Bytes serialize_block(const Block& b) {
  FieldWriter txs;
  for (const auto& t : b.transactions) txs.field(t.serialize());
  return FieldWriter().field(kBlockMagic).field(serialize_header(b.header)).nested(txs).take();
}

inline Block deserialize_block(std::span<const std::uint8_t> bytes) {
  FieldReader r(bytes);
  if (r.text() != kBlockMagic) throw DecodeError("not a block (bad magic)", 0);
  Block b;
  const auto header_at = r.offset() + 4;
  b.header = deserialize_header(FieldReader(r.field(), header_at));
  auto txs = r.nested();
  while (!txs.at_end()) {
    const auto at = txs.offset() + 4;
    b.transactions.push_back(Transaction::deserialize(FieldReader(txs.field(), at)));
  }
  r.expect_end();
  return b;
}

/// Block hash h_B: digest of the serialized header.
inline Digest block_digest(const BlockHeader& h) { return hash(serialize_header(h)); }
inline Digest block_digest(const Block& b) { return block_digest(b.header); }

/// j = H(h_MR ‖ h_prev) mod z, digest read as a big-endian integer.
inline std::uint64_t select_instance_index(const Digest& merkle_root, const Digest& prev_hash, std::uint64_t z) {
  if (z == 0) throw ParameterError("instance count z must be at least 1");
  return digest_mod(hash(FieldWriter().field(merkle_root.bytes).field(prev_hash.bytes).bytes()), z);
}

// ---------------------------------------------------------------------------
// Instance store: <root>/<H(P_G)>/<j>.graph + <j>.sig

inline Digest graph_digest(const Graph& g) { return hash(to_text(g)); }

struct InstanceRecord {
  std::shared_ptr<const Graph> graph;
  Signature signature;  // σ_{G_j} over H(G_j) by the utility key
};

class InstanceStore {
 public:
  virtual ~InstanceStore() = default;
  virtual std::optional<InstanceRecord> fetch(const Digest& descriptor, std::uint64_t index) const = 0;
  virtual void put(const Digest& descriptor, std::uint64_t index, const Graph& g, const Signature& sig) = 0;
};

class MemoryInstanceStore final : public InstanceStore {
 public:
  std::optional<InstanceRecord> fetch(const Digest& descriptor, std::uint64_t index) const override {
    auto it = records_.find({descriptor, index});
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  void put(const Digest& descriptor, std::uint64_t index, const Graph& g, const Signature& sig) override {
    records_[{descriptor, index}] = {std::make_shared<const Graph>(g), sig};
  }

  void put_shared(const Digest& descriptor, std::uint64_t index, std::shared_ptr<const Graph> g,
                  const Signature& sig) {
    records_[{descriptor, index}] = {std::move(g), sig};
  }

 private:
  std::map<std::pair<Digest, std::uint64_t>, InstanceRecord> records_;
};

class DirectoryInstanceStore final : public InstanceStore {
 public:
  explicit DirectoryInstanceStore(std::filesystem::path root) : root_(std::move(root)) {}

  std::optional<InstanceRecord> fetch(const Digest& descriptor, std::uint64_t index) const override {
    const auto dir = root_ / descriptor.hex();
    const auto graph_path = dir / (std::to_string(index) + ".graph");
    const auto sig_path = dir / (std::to_string(index) + ".sig");
    if (!std::filesystem::exists(graph_path) || !std::filesystem::exists(sig_path)) return std::nullopt;
    auto g = std::make_shared<const Graph>(read_graph_file(graph_path.string()));
    std::string sig_text = read_file(sig_path.string());
    while (!sig_text.empty() && (sig_text.back() == '\n' || sig_text.back() == '\r')) sig_text.pop_back();
    return InstanceRecord{std::move(g), Signature::from_hex(sig_text)};
  }

  void put(const Digest& descriptor, std::uint64_t index, const Graph& g, const Signature& sig) override {
    const auto dir = root_ / descriptor.hex();
    std::filesystem::create_directories(dir);
    write_graph_file((dir / (std::to_string(index) + ".graph")).string(), g);
    write_file((dir / (std::to_string(index) + ".sig")).string(), sig.hex() + "\n");
  }

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
};

inline Signature sign_instance(const Graph& g, const SecretKey& utility_sk) {
  return sign(graph_digest(g).bytes, utility_sk);
}

inline bool verify_instance(const Graph& g, const Signature& sig, const PublicKey& utility_pk) {
  return verify(graph_digest(g).bytes, sig, utility_pk);
}

/// Signs and stores every isomorph of the pool under H(P_G).
inline void publish_instances(InstanceStore& store, const Digest& descriptor, std::span<const Isomorph> pool,
                              const SecretKey& utility_sk) {
  for (std::size_t j = 0; j < pool.size(); ++j) store.put(descriptor, j, pool[j].graph, sign_instance(pool[j].graph, utility_sk));
}

// ---------------------------------------------------------------------------
// Clocks

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t start = 0) : now_(start) {}
  std::int64_t now_ms() const override { return now_; }
  void set(std::int64_t t) { now_ = t; }
  void advance(std::int64_t dt) { now_ += dt; }

 private:
  std::int64_t now_;
};

/// Wall clock reading `origin_ms` at construction.
class SteadyClock final : public Clock {
 public:
  explicit SteadyClock(std::int64_t origin_ms = 0) : origin_ms_(origin_ms), start_(std::chrono::steady_clock::now()) {}
  std::int64_t now_ms() const override {
    return origin_ms_ +
           std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::int64_t origin_ms_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Block generation

struct MiningRequest {
  ProblemDescriptor descriptor;
  Signature sig_descriptor;
  CommitteeApproval approval;
  RewardTransaction reward;  // carries the epoch origin and committee keys
  Digest prev_hash{};
  std::uint64_t prev_instance_id = 0;
  std::string manager;
  std::vector<Transaction> mempool;
  std::size_t byte_budget = 1 << 20;
};

enum class GenerationStatus : std::uint8_t {
  ok,
  bad_descriptor_signature,
  bad_committee_signature,
  stale_id,
  instance_missing,
  bad_instance_signature,
  property_mismatch,
  aborted,  // no bound-satisfying solution before the deadline
};

inline std::string_view status_name(GenerationStatus s) {
  switch (s) {
    case GenerationStatus::ok: return "ok";
    case GenerationStatus::bad_descriptor_signature: return "reject-descriptor";
    case GenerationStatus::bad_committee_signature: return "reject-committee";
    case GenerationStatus::stale_id: return "stale-id";
    case GenerationStatus::instance_missing: return "instance-missing";
    case GenerationStatus::bad_instance_signature: return "reject-instance-signature";
    case GenerationStatus::property_mismatch: return "reject-instance";
    case GenerationStatus::aborted: return "abort";
  }
  return "unknown";
}

struct GenerationResult {
  GenerationStatus status = GenerationStatus::aborted;
  std::optional<Block> block;
  std::uint64_t index = 0;
  Digest merkle_root{};
  std::int64_t finished_ms = 0;
  std::size_t attempts = 0;
};

/// Produces a candidate solution for the fetched instance, or nullopt when the
/// pool has nothing further to offer. May advance a simulated clock.
using PoolSolver = std::function<std::optional<DominatingSet>(const Graph&)>;

/// Block generation as run by a pool manager.
inline GenerationResult generate_block(const MiningRequest& req, const InstanceStore& store, const Clock& clock,
                                       const PoolSolver& solver) {
  GenerationResult out;
  const ProblemDescriptor& d = req.descriptor;
  const Digest dh = descriptor_hash(d);
  const std::int64_t deadline = req.reward.broadcast_ms + d.t_max_ms;

  if (!verify(dh.bytes, req.sig_descriptor, d.utility_pk)) {
    out.status = GenerationStatus::bad_descriptor_signature;
    return out;
  }
  if (!verify_approval(req.approval, dh, req.reward.committee, committee_quorum(req.reward.committee.size()))) {
    out.status = GenerationStatus::bad_committee_signature;
    return out;
  }
  if (req.approval.instance_id <= req.prev_instance_id) {
    out.status = GenerationStatus::stale_id;
    return out;
  }

  std::vector<Transaction> txs;
  txs.push_back(make_puzzle_fee(req.reward, req.manager));
  for (auto& t : select_mempool(req.mempool, req.byte_budget)) txs.push_back(std::move(t));
  out.merkle_root = transactions_root(txs);
  out.index = select_instance_index(out.merkle_root, req.prev_hash, d.z);

  auto record = store.fetch(dh, out.index);
  if (!record) {
    out.status = GenerationStatus::instance_missing;
    return out;
  }
  const Graph& g = *record->graph;
  if (!verify_instance(g, record->signature, d.utility_pk)) {
    out.status = GenerationStatus::bad_instance_signature;
    return out;
  }
  if (g.vertex_count() == 0 || !d.matches(properties(g))) {
    out.status = GenerationStatus::property_mismatch;
    return out;
  }

  const CardinalityBound k = compute_bound(d.properties());
  std::vector<Vertex> all(g.vertex_count());
  for (Vertex v = 0; v < all.size(); ++v) all[v] = v;
  DominatingSet best{std::move(all), g.vertex_count()};  // S_G = V_j
  while (!k.admits(best.size()) && clock.now_ms() < deadline) {
    ++out.attempts;
    auto candidate = solver(g);
    if (!candidate) break;
    if (k.admits(candidate->size()) && candidate->size() < best.size()) best = std::move(*candidate);
  }
  out.finished_ms = clock.now_ms();
  if (out.finished_ms >= deadline || !k.admits(best.size())) {
    out.status = GenerationStatus::aborted;
    return out;
  }

  Block b;
  b.header.prev_hash = req.prev_hash;
  b.header.merkle_root = out.merkle_root;
  b.header.solution = std::move(best);
  b.header.bound = k.k;
  b.header.descriptor = d;
  b.header.sig_descriptor = req.sig_descriptor;
  b.header.approval = req.approval;
  b.header.timestamp_ms = out.finished_ms;
  b.header.miner = req.manager;
  b.transactions = std::move(txs);
  out.block = std::move(b);
  out.status = GenerationStatus::ok;
  return out;
}

// ---------------------------------------------------------------------------
// Block verification

enum class RejectReason : std::uint8_t {
  none = 0,
  merkle_mismatch,
  deadline_passed,
  stale_id,
  not_improving,
  bad_descriptor_signature,
  bad_committee_signature,
  bad_instance_signature,
  uncovered_vertex,
  instance_missing,
  property_mismatch,
  bound_mismatch,
  bound_exceeded,
  malformed_solution,
  malformed_transactions,
};

inline constexpr std::size_t kRejectReasonCount = 15;

inline std::string_view reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "accept";
    case RejectReason::merkle_mismatch: return "merkle-mismatch";
    case RejectReason::deadline_passed: return "deadline";
    case RejectReason::stale_id: return "stale-id";
    case RejectReason::not_improving: return "not-improving";
    case RejectReason::bad_descriptor_signature: return "bad-descriptor-signature";
    case RejectReason::bad_committee_signature: return "bad-committee-signature";
    case RejectReason::bad_instance_signature: return "bad-instance-signature";
    case RejectReason::uncovered_vertex: return "uncovered";
    case RejectReason::instance_missing: return "instance-missing";
    case RejectReason::property_mismatch: return "property-mismatch";
    case RejectReason::bound_mismatch: return "bound-mismatch";
    case RejectReason::bound_exceeded: return "bound-exceeded";
    case RejectReason::malformed_solution: return "malformed-solution";
    case RejectReason::malformed_transactions: return "malformed-transactions";
  }
  return "unknown";
}

struct Verdict {
  RejectReason reason = RejectReason::none;
  std::uint64_t index = 0;
  std::vector<Vertex> uncovered;
  std::uint64_t work_units = 0;  // adjacency entries touched by the coverage sweep

  bool accepted() const noexcept { return reason == RejectReason::none; }
};

struct VerifyContext {
  std::optional<std::size_t> past_size;  // nullopt = ∞
  std::uint64_t prev_instance_id = 0;
  std::int64_t now_ms = 0;
  std::int64_t epoch_origin_ms = 0;
  std::span<const PublicKey> committee;
  std::size_t quorum = 0;  // 0 = ⌈2/3 · |committee|⌉
  const InstanceStore* store = nullptr;
};

/// Checks that depend only on the block and the published instances (no
/// clock, no chain view, no epoch state). Merkle mismatch is reported first.
inline Verdict check_block_content(const Block& b, std::span<const PublicKey> committee, std::size_t quorum,
                                   const InstanceStore& store) {
  Verdict v;
  const BlockHeader& h = b.header;
  auto reject = [&](RejectReason r) {
    v.reason = r;
    return v;
  };
  if (b.transactions.empty() || transactions_root(b.transactions) != h.merkle_root) return reject(RejectReason::merkle_mismatch);

  const Digest dh = descriptor_hash(h.descriptor);
  if (!verify(dh.bytes, h.sig_descriptor, h.descriptor.utility_pk)) return reject(RejectReason::bad_descriptor_signature);
  if (quorum == 0) quorum = committee_quorum(committee.size());
  if (!verify_approval(h.approval, dh, committee, quorum)) return reject(RejectReason::bad_committee_signature);

  const auto fees = std::count_if(b.transactions.begin(), b.transactions.end(),
                                  [](const Transaction& t) { return t.kind == Transaction::Kind::puzzle_fee; });
  if (fees != 1) return reject(RejectReason::malformed_transactions);

  if (h.descriptor.z == 0) return reject(RejectReason::property_mismatch);
  v.index = select_instance_index(h.merkle_root, h.prev_hash, h.descriptor.z);
  auto record = store.fetch(dh, v.index);
  if (!record) return reject(RejectReason::instance_missing);
  const Graph& g = *record->graph;
  if (!verify_instance(g, record->signature, h.descriptor.utility_pk)) return reject(RejectReason::bad_instance_signature);
  if (g.vertex_count() == 0 || !h.descriptor.matches(properties(g))) return reject(RejectReason::property_mismatch);
  if (h.bound != compute_bound(h.descriptor.properties()).k) return reject(RejectReason::bound_mismatch);

  const auto& s = h.solution.vertices;
  if (h.solution.graph_n != g.vertex_count() || !std::is_sorted(s.begin(), s.end()) ||
      std::adjacent_find(s.begin(), s.end()) != s.end() || (!s.empty() && s.back() >= g.vertex_count())) {
    return reject(RejectReason::malformed_solution);
  }
  if (!CardinalityBound{h.bound}.admits(s.size())) return reject(RejectReason::bound_exceeded);

  auto coverage = is_dominating(g, h.solution);
  for (Vertex x : s) v.work_units += g.degree(x) + 1;
  if (!coverage.dominating) {
    v.uncovered = std::move(coverage.uncovered);
    return reject(RejectReason::uncovered_vertex);
  }
  return v;
}

/// Block verification. `content` may carry a precomputed
/// check_block_content result for the same block.
inline Verdict verify_block(const Block& b, const VerifyContext& ctx, const Verdict* content = nullptr) {
  Verdict computed;
  if (content == nullptr) {
    if (ctx.store == nullptr) throw ParameterError("verification needs an instance store");
    computed = check_block_content(b, ctx.committee, ctx.quorum, *ctx.store);
    content = &computed;
  }
  Verdict v;
  v.index = content->index;
  if (content->reason == RejectReason::merkle_mismatch) {
    v.reason = RejectReason::merkle_mismatch;
    return v;
  }
  const BlockHeader& h = b.header;
  if (ctx.now_ms >= ctx.epoch_origin_ms + h.descriptor.t_max_ms) {
    v.reason = RejectReason::deadline_passed;
  } else if (h.instance_id() <= ctx.prev_instance_id) {
    v.reason = RejectReason::stale_id;
  } else if (ctx.past_size && h.solution.size() >= *ctx.past_size) {
    v.reason = RejectReason::not_improving;
  } else {
    return *content;
  }
  return v;
}

/// Per-epoch verifier state: past_size starts at ∞, each accepted block
/// lowers it and becomes the cached candidate; close_epoch commits it.
class EpochVerifier {
 public:
  EpochVerifier(std::vector<PublicKey> committee, const InstanceStore& store, std::int64_t epoch_origin_ms)
      : committee_(std::move(committee)), store_(&store), origin_(epoch_origin_ms) {}

  Verdict submit(const Block& b, std::uint64_t prev_instance_id, std::int64_t now_ms, const Verdict* content = nullptr) {
    VerifyContext ctx;
    ctx.past_size = past_size_;
    ctx.prev_instance_id = prev_instance_id;
    ctx.now_ms = now_ms;
    ctx.epoch_origin_ms = origin_;
    ctx.committee = committee_;
    ctx.store = store_;
    Verdict v = verify_block(b, ctx, content);
    if (v.accepted()) {
      past_size_ = b.header.solution.size();
      best_ = b;
    }
    return v;
  }

  std::optional<std::size_t> past_size() const noexcept { return past_size_; }
  const std::optional<Block>& best() const noexcept { return best_; }

  std::optional<Block> close_epoch() {
    past_size_.reset();
    return std::exchange(best_, std::nullopt);
  }

 private:
  std::vector<PublicKey> committee_;
  const InstanceStore* store_;
  std::int64_t origin_;
  std::optional<std::size_t> past_size_;
  std::optional<Block> best_;
};

}  // namespace scalowork
