#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>

#include "obsim/bitunit.hpp"
#include "oracles.hpp"

using namespace obsim;

namespace {

Bits random_bits(std::size_t n, std::mt19937_64& rng) {
  Bits b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1U);
  return b;
}

Bits from_string(const std::string& s) {
  Bits b;
  for (char c : s) b.push_back(c == '1' ? 1 : 0);
  return b;
}

}  // namespace

TEST_CASE("make_scheme_params derives phi = 2^k") {
  CHECK(make_scheme_params(36, 4, 256).phi() == 16);
  CHECK(make_scheme_params(8, 0, 1).phi() == 1);
  CHECK(make_scheme_params(8, 3, 100).phi() == 8);
  CHECK(make_scheme_params(36, 4, 256).cb_bits() == 32);
}

TEST_CASE("make_scheme_params rejects invalid geometry") {
  CHECK_THROWS_AS(make_scheme_params(8, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_scheme_params(8, 9, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_scheme_params(0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_scheme_params(8, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_scheme_params(100, SchemeParams::kMaxObBits + 1, 1), std::invalid_argument);
  CHECK_NOTHROW(make_scheme_params(100, SchemeParams::kMaxObBits, 1));
}

TEST_CASE("bit containers reject non-binary values") {
  CHECK_THROWS_AS(BitUnit(Bits{0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(ObPattern(Bits{3}), std::invalid_argument);
  CHECK_THROWS_AS(CbPayload(Bits{0, 7}), std::invalid_argument);
}

TEST_CASE("padding payload is all zeros and flagged") {
  const auto p = CbPayload::padding(32);
  CHECK(p.is_padding());
  CHECK(p.bits() == Bits(32, 0));
  CHECK_FALSE(CbPayload(Bits(32, 0)).is_padding());
}

TEST_CASE("segment slices OB and CB") {
  std::mt19937_64 rng(7);
  const auto params = make_scheme_params(36, 4, 256);
  Bits tail = random_bits(32, rng);
  Bits all = from_string("1010");
  all.insert(all.end(), tail.begin(), tail.end());
  const auto [ob, cb] = segment(BitUnit(all), params);
  CHECK(ob.bits() == from_string("1010"));
  CHECK(cb.bits() == tail);
  CHECK_FALSE(cb.is_padding());

  SUBCASE("k_ob = 0 gives an empty OB") {
    const auto p0 = make_scheme_params(8, 0, 1);
    const auto s = segment(BitUnit(Bits(8, 1)), p0);
    CHECK(s.ob.size() == 0);
    CHECK(s.cb.bits() == Bits(8, 1));
  }
  SUBCASE("all ones, k_ob = 3") {
    const auto s = segment(BitUnit(Bits(8, 1)), make_scheme_params(8, 3, 1));
    CHECK(s.ob.bits() == Bits(3, 1));
    CHECK(s.cb.bits() == Bits(5, 1));
  }
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(segment(BitUnit(Bits(35, 0)), params), std::invalid_argument);
  }
}

TEST_CASE("ob_to_index follows natural binary order") {
  CHECK(ob_to_index(ObPattern(from_string("0000"))) == SlotIndex(1));
  CHECK(ob_to_index(ObPattern(from_string("1111"))) == SlotIndex(16));
  CHECK(ob_to_index(ObPattern(from_string("0101"))) == SlotIndex(6));
  CHECK(ob_to_index(ObPattern()) == SlotIndex(1));
}

TEST_CASE("index_to_ob inverts the table") {
  const auto p4 = make_scheme_params(36, 4, 256);
  CHECK(index_to_ob(SlotIndex(1), p4).bits() == from_string("0000"));
  CHECK(index_to_ob(SlotIndex(16), p4).bits() == from_string("1111"));
  CHECK(index_to_ob(SlotIndex(1), make_scheme_params(8, 0, 1)).size() == 0);
  CHECK_THROWS_AS(index_to_ob(SlotIndex(0), p4), std::out_of_range);
  CHECK_THROWS_AS(index_to_ob(SlotIndex(17), p4), std::out_of_range);
}

TEST_CASE("mapping table is a bijection onto 1..phi (exhaustive, k <= 16)") {
  for (std::size_t k : {0u, 1u, 3u, 4u, 8u, 16u}) {
    const auto params = make_scheme_params(k + 1, k, 1);
    std::vector<bool> seen(params.phi() + 1, false);
    for (std::size_t v = 0; v < params.phi(); ++v) {
      Bits bits(k);
      for (std::size_t i = 0; i < k; ++i) bits[i] = static_cast<std::uint8_t>((v >> (k - 1 - i)) & 1U);
      const ObPattern ob(bits);
      const auto idx = ob_to_index(ob);
      REQUIRE(idx.value() >= 1);
      REQUIRE(idx.value() <= params.phi());
      CHECK_FALSE(seen[idx.value()]);
      seen[idx.value()] = true;
      CHECK(idx.value() == oracle::pattern_value(bits) + 1);
      CHECK(index_to_ob(idx, params) == ob);
    }
  }
}

TEST_CASE("reassemble concatenates the table entry and payload") {
  const auto p = make_scheme_params(36, 4, 256);
  Bits expect = from_string("0101");
  expect.resize(36, 0);
  CHECK(reassemble(SlotIndex(6), CbPayload(Bits(32, 0)), p).bits() == expect);

  Bits ones = from_string("0000");
  ones.resize(36, 1);
  CHECK(reassemble(SlotIndex(1), CbPayload(Bits(32, 1)), p).bits() == ones);

  CHECK_THROWS_AS(reassemble(SlotIndex(1), CbPayload(Bits(31, 0)), p), std::invalid_argument);
  CHECK_THROWS_AS(reassemble(SlotIndex(17), CbPayload(Bits(32, 0)), p), std::out_of_range);
}

TEST_CASE("segment then reassemble is the identity (property)") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 64;
    const std::size_t k = rng() % std::min<std::size_t>(n, 12);
    const auto params = make_scheme_params(n, k, 1);
    const BitUnit bu(random_bits(n, rng));
    const auto [ob, cb] = segment(bu, params);
    CHECK(ob.size() + cb.size() == n);
    CHECK(reassemble(ob_to_index(ob), cb, params) == bu);
  }
}
