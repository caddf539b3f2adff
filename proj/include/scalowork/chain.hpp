#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scalowork/errors.hpp"
#include "scalowork/mds.hpp"
#include "scalowork/protocol.hpp"

namespace scalowork {

/// WD_B = m · n · (k / |S|)
inline double work_done(std::uint64_t n, std::uint64_t m, std::uint64_t delta_min, std::size_t set_size) {
  if (set_size == 0) throw ParameterError("work_done of an empty solution");
  const double k = compute_bound(n, delta_min).k;
  return static_cast<double>(m) * static_cast<double>(n) * (k / static_cast<double>(set_size));
}

inline double work_done(const BlockHeader& h) {
  return work_done(h.descriptor.n, h.descriptor.m, h.descriptor.delta_min, h.solution.size());
}

struct ChainNode {
  Digest digest{};
  Digest prev{};
  std::size_t height = 0;
  std::uint64_t instance_id = 0;
  std::size_t set_size = 0;
  double work = 0.0;
  double cumulative = 0.0;
  std::uint64_t seq = 0;  // arrival order; first seen wins ties
  std::string miner;
  bool valid = true;
};

/// Strictly more cumulative work. Sums of the same per-block values in a
/// different order count as equal.
inline bool heavier(double a, double b) noexcept { return a > b + 1e-12 * std::max(std::abs(a), std::abs(b)); }

/// Rule for rival tips with equal cumulative work.
enum class TieBreak : std::uint8_t { first_seen, lowest_digest };

enum class AddOutcome : std::uint8_t { adopted, stored, orphaned, invalid, duplicate };

inline std::string_view outcome_name(AddOutcome o) {
  switch (o) {
    case AddOutcome::adopted: return "adopted";
    case AddOutcome::stored: return "stored";
    case AddOutcome::orphaned: return "orphaned";
    case AddOutcome::invalid: return "invalid";
    case AddOutcome::duplicate: return "duplicate";
  }
  return "unknown";
}

/// One node's block tree. The adopted chain is the one with the largest
/// cumulative work; a rival replaces it only with strictly more work. Blocks
/// f below the tip are committed.
class ChainState {
 public:
  explicit ChainState(std::size_t finality = 6, TieBreak tie = TieBreak::first_seen) : f_(finality), tie_(tie) {
    ChainNode genesis;
    nodes_.emplace(genesis.digest, genesis);
    tip_ = genesis.digest;
  }

  /// `content_ok` is the caller's verdict on signatures and content. A block
  /// whose id does not exceed its parent's, or whose parent is invalid, is
  /// invalid too. Blocks with an unknown parent wait as orphans.
  AddOutcome add_block(const Block& b, bool content_ok = true) {
    const Digest d = block_digest(b);
    if (nodes_.contains(d)) return AddOutcome::duplicate;
    for (const auto& o : orphans_)
      if (o.digest == d) return AddOutcome::duplicate;
    ChainNode node;
    node.digest = d;
    node.prev = b.header.prev_hash;
    node.instance_id = b.header.instance_id();
    node.set_size = b.header.solution.size();
    node.miner = b.header.miner;
    node.valid = content_ok && node.set_size > 0;
    if (node.valid) node.work = work_done(b.header);
    return insert(std::move(node));
  }

  const ChainNode& tip() const { return nodes_.at(tip_); }
  std::size_t height() const { return tip().height; }
  std::size_t finality() const noexcept { return f_; }
  std::size_t committed_height() const { return height() > f_ ? height() - f_ : 0; }

  const ChainNode* find(const Digest& d) const {
    auto it = nodes_.find(d);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  bool is_ancestor(const Digest& ancestor, const Digest& of) const {
    const ChainNode* n = find(of);
    const ChainNode* a = find(ancestor);
    if (n == nullptr || a == nullptr) return false;
    while (n->height > a->height) n = &nodes_.at(n->prev);
    return n->digest == a->digest;
  }

  /// Adopted chain from the first block after genesis up to the tip.
  std::vector<const ChainNode*> adopted_chain() const {
    std::vector<const ChainNode*> out;
    for (const ChainNode* n = &tip(); n->height > 0; n = &nodes_.at(n->prev)) out.push_back(n);
    return {out.rbegin(), out.rend()};
  }

  std::vector<std::string> miners() const {
    std::vector<std::string> out;
    for (const auto* n : adopted_chain()) out.push_back(n->miner);
    return out;
  }

  std::size_t block_count() const noexcept { return nodes_.size() - 1; }
  std::size_t orphan_count() const noexcept { return orphans_.size(); }
  std::size_t reorgs() const noexcept { return reorgs_; }
  std::size_t max_reorg_depth() const noexcept { return max_reorg_depth_; }
  /// Times a committed block left the adopted chain.
  std::size_t reversions() const noexcept { return reversions_; }

  /// height,digest,id,set_size,work,cumulative along the adopted chain.
  std::string export_log() const {
    std::ostringstream out;
    out.precision(17);
    out << "height,digest,id,set_size,work,cumulative\n";
    for (const auto* n : adopted_chain()) {
      out << n->height << ',' << n->digest.hex() << ',' << n->instance_id << ',' << n->set_size << ',' << n->work << ','
          << n->cumulative << '\n';
    }
    return out.str();
  }

 private:
  AddOutcome insert(ChainNode node) {
    auto parent = nodes_.find(node.prev);
    if (parent == nodes_.end()) {
      node.seq = seq_++;
      node.height = tip().height;  // tip height at arrival, used for pruning
      orphans_.push_back(std::move(node));
      prune_orphans();
      return AddOutcome::orphaned;
    }
    const ChainNode& p = parent->second;
    node.height = p.height + 1;
    node.seq = seq_++;
    if (!p.valid || node.instance_id <= p.instance_id) node.valid = false;
    node.cumulative = node.valid ? p.cumulative + node.work : 0.0;
    const Digest d = node.digest;
    const bool valid = node.valid;
    nodes_.emplace(d, std::move(node));

    AddOutcome outcome = valid ? AddOutcome::stored : AddOutcome::invalid;
    if (valid && prefer(nodes_.at(d), tip())) {
      switch_tip(d);
      outcome = AddOutcome::adopted;
    }
    adopt_orphans(d);
    return outcome;
  }

  bool prefer(const ChainNode& candidate, const ChainNode& current) const {
    if (heavier(candidate.cumulative, current.cumulative)) return true;
    if (tie_ == TieBreak::first_seen || heavier(current.cumulative, candidate.cumulative)) return false;
    return candidate.digest < current.digest;
  }

  void switch_tip(const Digest& d) {
    const ChainNode& old_tip = tip();
    const std::optional<Digest> committed = committed_block();
    if (!is_ancestor(old_tip.digest, d)) {
      ++reorgs_;
      const ChainNode* a = &old_tip;
      const ChainNode* b = &nodes_.at(d);
      while (a->digest != b->digest) {
        if (a->height >= b->height) a = &nodes_.at(a->prev);
        else b = &nodes_.at(b->prev);
      }
      max_reorg_depth_ = std::max(max_reorg_depth_, old_tip.height - a->height);
    }
    tip_ = d;
    if (committed && !is_ancestor(*committed, d)) ++reversions_;
  }

  std::optional<Digest> committed_block() const {
    const std::size_t h = committed_height();
    if (h == 0) return std::nullopt;
    const ChainNode* n = &tip();
    while (n->height > h) n = &nodes_.at(n->prev);
    return n->digest;
  }

  void adopt_orphans(const Digest& parent) {
    std::vector<ChainNode> ready;
    for (auto it = orphans_.begin(); it != orphans_.end();) {
      if (it->prev == parent) {
        ready.push_back(std::move(*it));
        it = orphans_.erase(it);
      } else {
        ++it;
      }
    }
    for (auto& n : ready) insert(std::move(n));
  }

  void prune_orphans() {
    const std::size_t h = tip().height;
    std::erase_if(orphans_, [&](const ChainNode& o) { return h > o.height + 2 * f_; });
  }

  std::size_t f_;
  TieBreak tie_;
  std::map<Digest, ChainNode> nodes_;
  std::vector<ChainNode> orphans_;
  Digest tip_{};
  std::uint64_t seq_ = 0;
  std::size_t reorgs_ = 0;
  std::size_t max_reorg_depth_ = 0;
  std::size_t reversions_ = 0;
};

}  // namespace scalowork
