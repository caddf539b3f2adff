#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scalowork/crypto.hpp"
#include "scalowork/errors.hpp"
#include "scalowork/protocol.hpp"

namespace scalowork {

/// Auditing committee drawn from the miners of the last w blocks.
struct CommitteeWindow {
  std::size_t window = 0;
  std::vector<std::string> members;  // ordered by position in the window

  std::size_t size() const noexcept { return members.size(); }
  bool contains(std::string_view id) const { return std::find(members.begin(), members.end(), id) != members.end(); }
};

/// `miners` lists block producers oldest first (genesis excluded). Members are
/// the c_m most recent distinct miners within the last min(w, height) blocks;
/// an empty chain falls back to the bootstrap committee.
inline CommitteeWindow derive_committee(std::span<const std::string> miners, std::size_t w, std::size_t c_m,
                                        std::span<const std::string> bootstrap) {
  if (w == 0) throw ParameterError("window size w must be at least 1");
  if (c_m == 0) throw ParameterError("committee size must be at least 1");
  CommitteeWindow out;
  out.window = w;
  if (miners.empty()) {
    if (bootstrap.empty()) throw ProtocolError("empty chain and no bootstrap committee");
    for (const auto& id : bootstrap) {
      if (out.members.size() == c_m) break;
      if (!out.contains(id)) out.members.push_back(id);
    }
    return out;
  }
  const std::size_t start = miners.size() > w ? miners.size() - w : 0;
  // Newest first, so that the cap keeps the most recent producers.
  std::vector<std::string> recent;
  for (std::size_t i = miners.size(); i-- > start;) {
    if (recent.size() == c_m) break;
    if (std::find(recent.begin(), recent.end(), miners[i]) == recent.end()) recent.push_back(miners[i]);
  }
  for (std::size_t i = start; i < miners.size(); ++i) {
    const auto& id = miners[i];
    if (!out.contains(id) && std::find(recent.begin(), recent.end(), id) != recent.end()) out.members.push_back(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Utility registry: one "identity hex-pk" pair per line.

struct UtilityEntry {
  std::string identity;
  PublicKey pk;
};

struct UtilityRegistry {
  std::vector<UtilityEntry> entries;

  static UtilityRegistry parse(std::string_view text) {
    UtilityRegistry reg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream fields(line);
      std::string id, pk_hex, extra;
      if (!(fields >> id >> pk_hex) || (fields >> extra)) throw DecodeError("expected 'identity hex-pk'", line_no);
      try {
        reg.entries.push_back({id, PublicKey::from_hex(pk_hex)});
      } catch (const DecodeError&) {
        throw DecodeError("malformed public key", line_no);
      }
    }
    return reg;
  }

  std::string to_text() const {
    std::string out;
    for (const auto& e : entries) out += e.identity + ' ' + e.pk.hex() + '\n';
    return out;
  }
};

/// Seeded uniform choice; the epoch seed is the previous block hash.
inline std::size_t select_utility(const UtilityRegistry& registry, const Digest& epoch_seed) {
  if (registry.entries.empty()) throw ProtocolError("no registered utility companies");
  const Digest d = hash(FieldWriter().field("select-utility").field(epoch_seed.bytes).bytes());
  return static_cast<std::size_t>(digest_mod(d, registry.entries.size()));
}

// ---------------------------------------------------------------------------
// Hardness gate

struct HardnessPolicy {
  std::uint64_t min_n = 0;
  std::uint64_t max_n = std::numeric_limits<std::uint64_t>::max();
  double min_avg_degree = 0.0;
  double max_avg_degree = std::numeric_limits<double>::infinity();

  void validate() const {
    if (min_n > max_n || min_avg_degree > max_avg_degree) throw ParameterError("hardness band has min > max");
  }

  /// JSON object with any of min_n, max_n, min_avg_degree, max_avg_degree.
  static HardnessPolicy from_json(const nlohmann::json& j) {
    HardnessPolicy p;
    if (j.contains("min_n")) p.min_n = j.at("min_n").get<std::uint64_t>();
    if (j.contains("max_n")) p.max_n = j.at("max_n").get<std::uint64_t>();
    if (j.contains("min_avg_degree")) p.min_avg_degree = j.at("min_avg_degree").get<double>();
    if (j.contains("max_avg_degree")) p.max_avg_degree = j.at("max_avg_degree").get<double>();
    p.validate();
    return p;
  }
};

enum class HardnessResult : std::uint8_t { pass, too_small, too_large, too_sparse, too_dense };

inline std::string_view hardness_name(HardnessResult r) {
  switch (r) {
    case HardnessResult::pass: return "pass";
    case HardnessResult::too_small: return "too-small";
    case HardnessResult::too_large: return "too-large";
    case HardnessResult::too_sparse: return "too-sparse";
    case HardnessResult::too_dense: return "too-dense";
  }
  return "unknown";
}

inline HardnessResult check_hardness(const ProblemDescriptor& d, const HardnessPolicy& policy) {
  if (d.n < policy.min_n) return HardnessResult::too_small;
  if (d.n > policy.max_n) return HardnessResult::too_large;
  const double avg = d.properties().avg_degree();
  if (avg < policy.min_avg_degree) return HardnessResult::too_sparse;
  if (avg > policy.max_avg_degree) return HardnessResult::too_dense;
  return HardnessResult::pass;
}

// ---------------------------------------------------------------------------
// Approval

struct CommitteeMember {
  std::string id;
  KeyPair keys;
};

/// Issues strictly increasing instance ids and collects the quorum signature
/// on id ‖ H(P_G).
class ApprovalAuthority {
 public:
  explicit ApprovalAuthority(std::uint64_t last_issued = 0) : last_id_(last_issued) {}

  std::uint64_t last_issued() const noexcept { return last_id_; }

  /// `signing[i]` says whether committee[i] signs. Throws ProtocolError when
  /// the hardness gate fails or fewer than ⌈2/3 · c_m⌉ members sign; no id is
  /// consumed in that case.
  CommitteeApproval approve(const ProblemDescriptor& d, const HardnessPolicy& policy,
                            std::span<const CommitteeMember> committee, const std::vector<bool>& signing) {
    if (committee.empty()) throw ProtocolError("empty committee");
    if (signing.size() != committee.size()) throw ParameterError("signing mask size differs from committee size");
    if (auto h = check_hardness(d, policy); h != HardnessResult::pass) {
      throw ProtocolError("descriptor fails hardness gate: " + std::string(hardness_name(h)));
    }
    const auto signers = static_cast<std::size_t>(std::count(signing.begin(), signing.end(), true));
    if (signers < committee_quorum(committee.size())) {
      throw ProtocolError("approval quorum not reached: " + std::to_string(signers) + " of " +
                          std::to_string(committee.size()) + " signed, need " +
                          std::to_string(committee_quorum(committee.size())));
    }
    CommitteeApproval a;
    a.instance_id = last_id_ + 1;
    const Bytes msg = committee_message(a.instance_id, descriptor_hash(d));
    std::vector<Signature> sigs;
    for (std::size_t i = 0; i < committee.size(); ++i) {
      if (!signing[i]) continue;
      sigs.push_back(sign(msg, committee[i].keys.sk));
      a.signers.push_back(committee[i].keys.pk);
    }
    a.signature = aggregate(sigs);
    last_id_ = a.instance_id;
    return a;
  }

  CommitteeApproval approve(const ProblemDescriptor& d, const HardnessPolicy& policy,
                            std::span<const CommitteeMember> committee) {
    return approve(d, policy, committee, std::vector<bool>(committee.size(), true));
  }

 private:
  std::uint64_t last_id_;
};

}  // namespace scalowork
