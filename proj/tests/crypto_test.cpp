#include <gtest/gtest.h>

#include <set>

#include "scalowork/crypto.hpp"

using namespace scalowork;

namespace {

Bytes bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(Hash, Sha256Vectors) {
  EXPECT_EQ(hash("").hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(hash("abc").hex(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hash, TrailingZeroByteChangesDigest) {
  for (int i = 0; i < 64; ++i) {
    Bytes x(static_cast<std::size_t>(i), static_cast<std::uint8_t>(i * 7));
    Bytes y = x;
    y.push_back(0);
    EXPECT_NE(hash(x), hash(y));
    EXPECT_EQ(hash(x), hash(Bytes(x)));
  }
}

TEST(Hash, DigestModReadsBigEndian) {
  const Digest d = hash("abc");
  EXPECT_EQ(digest_mod(d, 16), 13u);
  EXPECT_EQ(digest_mod(d, 1000003), 127342u);
  EXPECT_EQ(digest_mod(d, 1), 0u);
  EXPECT_THROW(digest_mod(d, 0), ParameterError);
}

TEST(Hex, RoundTripAndErrors) {
  const Digest d = hash("x");
  EXPECT_EQ(Digest::from_hex(d.hex()), d);
  EXPECT_THROW(from_hex("abc"), DecodeError);
  EXPECT_THROW(from_hex("zz"), DecodeError);
  EXPECT_THROW(Digest::from_hex("00"), DecodeError);
}

TEST(Fields, LengthPrefixedBigEndian) {
  auto b = FieldWriter().field("ab").u64(258).take();
  const Bytes expect{0, 0, 0, 2, 'a', 'b', 0, 0, 0, 8, 0, 0, 0, 0, 0, 0, 1, 2};
  EXPECT_EQ(b, expect);
  FieldReader r(b);
  EXPECT_EQ(r.text(), "ab");
  EXPECT_EQ(r.u64(), 258u);
  EXPECT_TRUE(r.at_end());
}

TEST(Fields, FramingSeparatesConcatenations) {
  EXPECT_NE(FieldWriter().field("ab").field("c").bytes(), FieldWriter().field("a").field("bc").bytes());
}

TEST(Fields, TruncationReportsOffset) {
  auto b = FieldWriter().field("hello").field("world").take();
  b.resize(b.size() - 2);
  FieldReader r(b);
  r.text();
  try {
    r.text();
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 9u);
  }
}

TEST(Merkle, SingletonIsLeafDigest) {
  const std::vector<Bytes> one{bytes_of("t")};
  EXPECT_EQ(merkle_root(one), hash("t"));
}

TEST(Merkle, KnownRoots) {
  const std::vector<Bytes> two{bytes_of("tx"), bytes_of("tx")};
  EXPECT_EQ(merkle_root(two).hex(), "d3de7532b64d5d6cf28655306158c86da8d4ea4e4e7d2e66485ef4701fd3e707");
  const std::vector<Bytes> three{bytes_of("a"), bytes_of("b"), bytes_of("c")};
  EXPECT_EQ(merkle_root(three).hex(), "d31a37ef6ac14a2db1470c4316beb5592e6afd4465022339adafda76a18ffabe");
}

TEST(Merkle, OrderAndContentSensitive) {
  std::vector<Bytes> txs{bytes_of("a"), bytes_of("b"), bytes_of("c"), bytes_of("d"), bytes_of("e")};
  const Digest root = merkle_root(txs);
  std::swap(txs[0], txs[3]);
  EXPECT_NE(merkle_root(txs), root);
  std::swap(txs[0], txs[3]);
  txs[4][0] ^= 1;
  EXPECT_NE(merkle_root(txs), root);
}

TEST(Merkle, EmptyListThrows) { EXPECT_THROW(merkle_root(std::vector<Bytes>{}), ParameterError); }

TEST(Signatures, Rfc8032FirstVector) {
  std::array<std::uint8_t, 32> seed{};
  const Bytes raw = from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
  std::copy(raw.begin(), raw.end(), seed.begin());
  const KeyPair kp = keygen_from_seed(seed);
  EXPECT_EQ(kp.pk.hex(), "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  EXPECT_EQ(sign("", kp.sk).hex(),
            "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595"
            "bbe24655141438e7a100b");
}

TEST(Signatures, SignVerifyAndTamper) {
  const KeyPair kp = keygen(1);
  const KeyPair other = keygen(2);
  const Signature sig = sign("abc", kp.sk);
  EXPECT_TRUE(verify("abc", sig, kp.pk));
  EXPECT_FALSE(verify("abd", sig, kp.pk));
  EXPECT_FALSE(verify("abc", sig, other.pk));
  EXPECT_EQ(sign("abc", kp.sk), sig);
}

TEST(Signatures, KeygenIsSeeded) {
  EXPECT_EQ(keygen(5).pk, keygen(5).pk);
  EXPECT_NE(keygen(5).pk, keygen(6).pk);
  EXPECT_EQ(keygen("member-1", 3).pk, keygen("member-1", 3).pk);
  EXPECT_NE(keygen("member-1", 3).pk, keygen("member-2", 3).pk);
}

TEST(Aggregate, SingleSignature) {
  const KeyPair kp = keygen(9);
  const Bytes msg = bytes_of("m");
  const Signature s = sign(msg, kp.sk);
  const std::vector<PublicKey> pks{kp.pk};
  EXPECT_TRUE(aggregate_verify(aggregate(std::vector<Signature>{s}), msg, pks));
  Signature bad = s;
  bad.bytes[0] ^= 1;
  EXPECT_FALSE(aggregate_verify(aggregate(std::vector<Signature>{bad}), msg, pks));
}

TEST(Aggregate, SameMessageCommittee) {
  const Bytes msg = FieldWriter().u64(7).field(hash("descriptor").bytes).take();
  std::vector<PublicKey> pks;
  std::vector<Signature> sigs;
  for (std::uint64_t i = 0; i < 3; ++i) {
    const KeyPair kp = keygen(100 + i);
    pks.push_back(kp.pk);
    sigs.push_back(sign(msg, kp.sk));
  }
  auto agg = aggregate(sigs);
  EXPECT_EQ(agg.count(), 3u);
  EXPECT_TRUE(aggregate_verify(agg, msg, pks));

  auto forged = sigs;
  forged[1] = sign(msg, keygen(999).sk);
  EXPECT_FALSE(aggregate_verify(aggregate(forged), msg, pks));

  std::swap(pks[0], pks[2]);
  EXPECT_FALSE(aggregate_verify(agg, msg, pks));
}

TEST(Aggregate, DistinctMessages) {
  std::vector<Bytes> msgs{bytes_of("one"), bytes_of("two")};
  std::vector<PublicKey> pks;
  std::vector<Signature> sigs;
  for (std::size_t i = 0; i < 2; ++i) {
    const KeyPair kp = keygen(200 + i);
    pks.push_back(kp.pk);
    sigs.push_back(sign(msgs[i], kp.sk));
  }
  auto agg = aggregate(sigs);
  EXPECT_TRUE(aggregate_verify(agg, msgs, pks));
  std::swap(msgs[0], msgs[1]);
  EXPECT_FALSE(aggregate_verify(agg, msgs, pks));
}

TEST(Aggregate, ConjunctionOfIndividualChecks) {
  const Bytes msg = bytes_of("conj");
  for (int mask = 0; mask < 16; ++mask) {
    std::vector<PublicKey> pks;
    std::vector<Signature> sigs;
    bool all = true;
    for (int i = 0; i < 4; ++i) {
      const KeyPair kp = keygen(300 + static_cast<std::uint64_t>(i));
      pks.push_back(kp.pk);
      Signature s = sign(msg, kp.sk);
      if (mask >> i & 1) s.bytes[5] ^= 0x40;
      all = all && verify(msg, s, kp.pk);
      sigs.push_back(s);
    }
    EXPECT_EQ(aggregate_verify(aggregate(sigs), msg, pks), all) << "mask " << mask;
  }
}

TEST(Aggregate, ShapeErrors) {
  EXPECT_THROW(aggregate(std::vector<Signature>{}), ParameterError);
  const std::vector<Bytes> msgs{bytes_of("a"), bytes_of("b")};
  const std::vector<PublicKey> pks{keygen(1).pk, keygen(2).pk, keygen(3).pk};
  auto agg = aggregate(std::vector<Signature>{sign("a", keygen(1).sk)});
  EXPECT_THROW(aggregate_verify(agg, msgs, pks), ParameterError);
  EXPECT_THROW(AggregateSignature::from_hex("00ff"), DecodeError);
}
