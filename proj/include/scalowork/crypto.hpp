#pragma once

#include <sodium.h>

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scalowork/errors.hpp"
#include "scalowork/random.hpp"

namespace scalowork {

using Bytes = std::vector<std::uint8_t>;

namespace detail {

inline void ensure_sodium() {
  static const bool ready = [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
    return true;
  }();
  (void)ready;
}

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace detail

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(bytes.size() * 2, '0');
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    out[2 * i] = digits[bytes[i] >> 4];
    out[2 * i + 1] = digits[bytes[i] & 0xF];
  }
  return out;
}

inline Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string", hex.size());
  auto nibble = [&](std::size_t i) -> std::uint8_t {
    const char c = hex[i];
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw DecodeError("invalid hex digit", i);
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(nibble(2 * i) << 4 | nibble(2 * i + 1));
  return out;
}

/// Fixed-size byte string with hex text form.
template <std::size_t N, typename Tag>
struct FixedBytes {
  static constexpr std::size_t size = N;
  std::array<std::uint8_t, N> bytes{};

  std::string hex() const { return to_hex(bytes); }

  static FixedBytes from_hex(std::string_view text) { return from_span(scalowork::from_hex(text)); }

  static FixedBytes from_span(std::span<const std::uint8_t> raw) {
    if (raw.size() != N) {
      throw DecodeError("expected " + std::to_string(N) + " bytes, got " + std::to_string(raw.size()), 0);
    }
    FixedBytes out;
    std::copy(raw.begin(), raw.end(), out.bytes.begin());
    return out;
  }

  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
  friend bool operator==(const FixedBytes&, const FixedBytes&) = default;
};

struct DigestTag {};
struct PublicKeyTag {};
struct SecretKeyTag {};
struct SignatureTag {};

using Digest = FixedBytes<crypto_hash_sha256_BYTES, DigestTag>;
using PublicKey = FixedBytes<crypto_sign_PUBLICKEYBYTES, PublicKeyTag>;
using SecretKey = FixedBytes<crypto_sign_SECRETKEYBYTES, SecretKeyTag>;
using Signature = FixedBytes<crypto_sign_BYTES, SignatureTag>;

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

/// SHA-256.
inline Digest hash(std::span<const std::uint8_t> data) {
  detail::ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

inline Digest hash(std::string_view data) { return hash(detail::as_bytes(data)); }

/// Big-endian integer value of a digest modulo `modulus`.
inline std::uint64_t digest_mod(const Digest& d, std::uint64_t modulus) {
  if (modulus == 0) throw ParameterError("modulus must be positive");
  unsigned __int128 r = 0;
  for (std::uint8_t b : d.bytes) r = (r * 256 + b) % modulus;
  return static_cast<std::uint64_t>(r);
}

/// Canonical multi-field encoding: every field is a 4-byte big-endian length
/// followed by its bytes. All hashed structures go through this writer.
class FieldWriter {
 public:
  FieldWriter& field(std::span<const std::uint8_t> data) {
    const auto len = static_cast<std::uint32_t>(data.size());
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(len >> shift));
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
  }

  FieldWriter& field(std::string_view s) { return field(detail::as_bytes(s)); }

  FieldWriter& u64(std::uint64_t v) {
    std::array<std::uint8_t, 8> be{};
    for (int i = 0; i < 8; ++i) be[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (56 - 8 * i));
    return field(be);
  }

  FieldWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }

  template <std::size_t N, typename Tag>
  FieldWriter& hex(const FixedBytes<N, Tag>& b) {
    return field(b.hex());
  }

  // Nested structure as a single field.
  FieldWriter& nested(const FieldWriter& inner) { return field(inner.out_); }

  const Bytes& bytes() const noexcept { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

/// Reader for FieldWriter output; errors report the byte offset.
class FieldReader {
 public:
  explicit FieldReader(std::span<const std::uint8_t> data, std::size_t base_offset = 0)
      : data_(data), base_(base_offset) {}

  std::span<const std::uint8_t> field() {
    if (data_.size() - pos_ < 4) throw DecodeError("truncated field length", offset());
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = len << 8 | data_[pos_ + static_cast<std::size_t>(i)];
    if (data_.size() - pos_ - 4 < len) throw DecodeError("truncated field body", offset());
    auto out = data_.subspan(pos_ + 4, len);
    pos_ += 4 + len;
    return out;
  }

  std::string text() {
    auto f = field();
    return {f.begin(), f.end()};
  }

  std::uint64_t u64() {
    const std::size_t at = offset();
    auto f = field();
    if (f.size() != 8) throw DecodeError("integer field must be 8 bytes", at);
    std::uint64_t v = 0;
    for (auto b : f) v = v << 8 | b;
    return v;
  }

  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

  template <typename Fixed>
  Fixed hex() {
    const std::size_t at = offset();
    try {
      return Fixed::from_hex(text());
    } catch (const DecodeError& e) {
      throw DecodeError(std::string("bad hex field: ") + e.what(), at);
    }
  }

  FieldReader nested() {
    const std::size_t at = offset() + 4;
    return FieldReader(field(), at);
  }

  bool at_end() const noexcept { return pos_ == data_.size(); }
  std::size_t offset() const noexcept { return base_ + pos_; }

  void expect_end() const {
    if (!at_end()) throw DecodeError("trailing bytes", offset());
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::size_t base_;
};

/// Binary Merkle tree over leaf digests of the serialized transactions. A
/// single leaf is its own root; odd levels duplicate their last node.
inline Digest merkle_root(std::span<const Bytes> transactions) {
  if (transactions.empty()) throw ParameterError("merkle root of an empty transaction list");
  std::vector<Digest> level;
  level.reserve(transactions.size());
  for (const auto& tx : transactions) level.push_back(hash(tx));
  std::array<std::uint8_t, 2 * Digest::size> pair{};
  while (level.size() > 1) {
    if (level.size() % 2 == 1) level.push_back(level.back());
    std::vector<Digest> next;
    next.reserve(level.size() / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      std::copy(level[i].bytes.begin(), level[i].bytes.end(), pair.begin());
      std::copy(level[i + 1].bytes.begin(), level[i + 1].bytes.end(), pair.begin() + Digest::size);
      next.push_back(hash(pair));
    }
    level = std::move(next);
  }
  return level.front();
}

// ---------------------------------------------------------------------------
// Signatures: Ed25519 (deterministic signing). Aggregation concatenates the
// constituent signatures and verifies them as a conjunction.

inline KeyPair keygen_from_seed(const std::array<std::uint8_t, crypto_sign_SEEDBYTES>& seed) {
  detail::ensure_sodium();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.pk.bytes.data(), kp.sk.bytes.data(), seed.data());
  return kp;
}

inline KeyPair keygen(std::uint64_t seed) {
  const Digest d = hash(FieldWriter().field("scalowork-keygen").u64(seed).bytes());
  return keygen_from_seed(d.bytes);
}

/// Key pair from an arbitrary label (participant identity plus run seed).
inline KeyPair keygen(std::string_view label, std::uint64_t seed) {
  const Digest d = hash(FieldWriter().field("scalowork-keygen").field(label).u64(seed).bytes());
  return keygen_from_seed(d.bytes);
}

inline Signature sign(std::span<const std::uint8_t> message, const SecretKey& sk) {
  detail::ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), sk.bytes.data());
  return sig;
}

inline Signature sign(std::string_view message, const SecretKey& sk) { return sign(detail::as_bytes(message), sk); }

inline bool verify(std::span<const std::uint8_t> message, const Signature& sig, const PublicKey& pk) {
  detail::ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), pk.bytes.data()) == 0;
}

inline bool verify(std::string_view message, const Signature& sig, const PublicKey& pk) {
  return verify(detail::as_bytes(message), sig, pk);
}

struct AggregateSignature {
  Bytes data;  // constituent signatures, in signer order

  std::size_t count() const noexcept { return data.size() / Signature::size; }

  std::string hex() const { return to_hex(data); }

  static AggregateSignature from_hex(std::string_view text) {
    AggregateSignature a{scalowork::from_hex(text)};
    if (a.data.size() % Signature::size != 0) throw DecodeError("aggregate length is not a multiple of 64", 0);
    return a;
  }

  friend bool operator==(const AggregateSignature&, const AggregateSignature&) = default;
};

inline AggregateSignature aggregate(std::span<const Signature> sigs) {
  if (sigs.empty()) throw ParameterError("aggregate of zero signatures");
  AggregateSignature a;
  a.data.reserve(sigs.size() * Signature::size);
  for (const auto& s : sigs) a.data.insert(a.data.end(), s.bytes.begin(), s.bytes.end());
  return a;
}

/// One message means every signer signed it; otherwise messages[i] belongs to
/// pks[i].
inline bool aggregate_verify(const AggregateSignature& agg, std::span<const Bytes> messages,
                             std::span<const PublicKey> pks) {
  if (messages.empty()) throw ParameterError("no messages supplied");
  if (messages.size() != 1 && messages.size() != pks.size()) {
    throw ParameterError("message count " + std::to_string(messages.size()) + " does not match signer count " +
                         std::to_string(pks.size()));
  }
  if (pks.empty() || agg.data.size() != pks.size() * Signature::size) return false;
  for (std::size_t i = 0; i < pks.size(); ++i) {
    auto raw = std::span<const std::uint8_t>(agg.data).subspan(i * Signature::size, Signature::size);
    const auto sig = Signature::from_span(raw);
    const Bytes& msg = messages.size() == 1 ? messages[0] : messages[i];
    if (!verify(msg, sig, pks[i])) return false;
  }
  return true;
}

inline bool aggregate_verify(const AggregateSignature& agg, const Bytes& message, std::span<const PublicKey> pks) {
  return aggregate_verify(agg, std::span<const Bytes>(&message, 1), pks);
}

}  // namespace scalowork
