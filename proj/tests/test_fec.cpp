#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <random>

#include "obsim/fec.hpp"
#include "obsim/phy.hpp"
#include "oracles.hpp"

using namespace obsim;

namespace {

const std::string kData = OBSIM_TEST_DATA_DIR;
const std::string kQcAlist = OBSIM_DATA_DIR "/qc_1296_r12.alist";

std::vector<std::vector<int>> dense(const LdpcCode& code) {
  std::vector<std::vector<int>> h(code.m_checks(), std::vector<int>(code.n_code(), 0));
  for (std::size_t r = 0; r < code.m_checks(); ++r)
    for (auto c : code.rows()[r]) h[r][c] = 1;
  return h;
}

std::vector<double> clean_llr(const Bits& codeword, double magnitude) {
  std::vector<double> llr;
  for (auto b : codeword) llr.push_back(b ? -magnitude : magnitude);
  return llr;
}

Bits random_bits(std::size_t n, std::mt19937_64& rng) {
  Bits b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1U);
  return b;
}

}  // namespace

TEST_CASE("parse toy 2x4 alist") {
  const auto code = load_alist(kData + "/toy_2x4.alist");
  CHECK(code.n_code() == 4);
  CHECK(code.m_checks() == 2);
  CHECK(code.k_info() == 2);
  CHECK(code.rows()[0] == std::vector<std::uint32_t>{0, 1});
  CHECK(code.rows()[1] == std::vector<std::uint32_t>{2, 3});
  CHECK_FALSE(code.has_encoder());
}

TEST_CASE("alist validation errors") {
  CHECK_THROWS_AS(parse_alist_text(""), AlistError);
  CHECK_THROWS_AS(parse_alist_text("4\n"), AlistError);
  CHECK_THROWS_AS(parse_alist_text("4 x\n"), AlistError);
  // Column 2 claims check 2, row lists put it in check 1.
  CHECK_THROWS_AS(parse_alist_text("4 2\n1 2\n1 1 1 1\n2 2\n1\n2\n1\n2\n1 2\n3 4\n"), AlistError);
  // Index beyond m.
  CHECK_THROWS_AS(parse_alist_text("4 2\n1 2\n1 1 1 1\n2 2\n1\n1\n3\n2\n1 2\n3 4\n"), AlistError);
  // Degree list disagrees with the adjacency line.
  CHECK_THROWS_AS(parse_alist_text("4 2\n1 2\n1 1 1 1\n2 2\n1\n1\n2\n2\n1 2\n3\n"), AlistError);
  // Truncated.
  CHECK_THROWS_AS(parse_alist_text("4 2\n1 2\n1 1 1 1\n2 2\n1\n1\n"), AlistError);
  CHECK_THROWS_AS(load_alist(kData + "/does_not_exist.alist"), AlistError);
}

TEST_CASE("toy encoder: exhaustive info words satisfy every check") {
  const auto code = derive_encoder(load_alist(kData + "/toy_2x4.alist"));
  REQUIRE(code.has_encoder());
  const auto h = dense(code);
  for (unsigned u = 0; u < 4; ++u) {
    const Bits info{static_cast<std::uint8_t>(u & 1U), static_cast<std::uint8_t>((u >> 1) & 1U)};
    const Bits cw = code.encode(info);
    for (const auto& row : h) {
      int parity = 0;
      for (std::size_t j = 0; j < 4; ++j) parity ^= row[j] & cw[j];
      CHECK(parity == 0);
    }
    CHECK(code.extract_info(cw) == info);
  }
  CHECK(code.encode(Bits{0, 0}) == Bits(4, 0));
  CHECK_THROWS_AS(code.encode(Bits{1}), std::invalid_argument);
}

TEST_CASE("QC rate-1/2 matrix: dimensions and rank against a dense oracle") {
  const auto code = load_alist(kQcAlist);
  CHECK(code.n_code() == 1296);
  CHECK(code.m_checks() == 648);
  CHECK(code.k_info() == 648);
  CHECK(oracle::gf2_rank(dense(code)) == code.rank());
}

TEST_CASE("QC encoder property: random info words give valid codewords") {
  const auto code = derive_encoder(load_alist(kQcAlist));
  std::mt19937_64 rng(8);
  for (int t = 0; t < 100; ++t) {
    const Bits info = random_bits(code.k_info(), rng);
    const Bits cw = code.encode(info);
    CHECK(code.satisfies_checks(cw));
    CHECK(code.extract_info(cw) == info);
  }
  CHECK(code.encode(Bits(648, 0)) == Bits(1296, 0));
}

TEST_CASE("rank-deficient H reports the effective dimension") {
  // Third row is the sum of the first two.
  const auto code = derive_encoder(LdpcCode(4, {{0, 1}, {2, 3}, {0, 1, 2, 3}}));
  CHECK(code.rank() == 2);
  CHECK(code.k_info() == 2);
  CHECK(code.satisfies_checks(code.encode(Bits{1, 1})));
}

TEST_CASE("sum-product: noiseless codeword converges in one iteration") {
  const auto code = derive_encoder(load_alist(kQcAlist));
  std::mt19937_64 rng(13);
  const Bits info = random_bits(code.k_info(), rng);
  const auto result = sum_product_decode(code, clean_llr(code.encode(info), 20.0), 50);
  CHECK(result.converged);
  CHECK(result.iterations_used == 1);
  CHECK(result.bits == info);
}

TEST_CASE("sum-product: all-zero LLRs never converge") {
  const auto code = derive_encoder(load_alist(kQcAlist));
  const auto result = sum_product_decode(code, std::vector<double>(1296, 0.0), 7);
  CHECK_FALSE(result.converged);
  CHECK(result.iterations_used == 7);
  CHECK_THROWS_AS(sum_product_decode(code, std::vector<double>(10, 0.0), 7), std::invalid_argument);
  CHECK_THROWS_AS(sum_product_decode(code, std::vector<double>(1296, 1.0), 0), std::invalid_argument);
}

TEST_CASE("sum-product matches brute-force ML on the n=8 toy code for <= 1 error") {
  // Cycle code of K5 minus two edges: [8,4,3], no length-4 cycles in the
  // Tanner graph. Check 5 is the sum of the other four.
  const auto code = derive_encoder(load_alist(kData + "/graph_8.alist"));
  REQUIRE(code.k_info() == 4);
  const auto book = oracle::codebook(dense(code), 8);
  REQUIRE(book.size() == 16);
  for (double magnitude : {1.0, 2.0, 4.0, 8.0}) {
    for (const auto& cw : book) {
      for (int flip = -1; flip < 8; ++flip) {
        auto llr = clean_llr(cw, magnitude);
        if (flip >= 0) llr[flip] = -llr[flip];
        const auto ml = oracle::ml_decode(book, llr);
        CHECK(ml == cw);
        const auto result = sum_product_decode(code, llr, 50);
        CHECK(result.converged);
        CHECK(result.bits == code.extract_info(ml));
      }
    }
  }
}

TEST_CASE("decoder word error rate does not grow with SNR") {
  const auto code = derive_encoder(load_alist(kQcAlist));
  const auto params = make_scheme_params(36, 4, 256);
  auto wer = [&](double db) {
    const auto lv = noise_sigma({db, SnrConvention::EbN0Info}, params, code.rate(), Scheme::Conventional);
    std::mt19937_64 rng(static_cast<std::uint64_t>(db * 100) + 1);
    GaussianStream noise(static_cast<std::uint64_t>(db * 1000) + 3);
    int failures = 0;
    for (int t = 0; t < 150; ++t) {
      const Bits info = random_bits(code.k_info(), rng);
      auto block = bpsk_modulate(code.encode(info), lv.amplitude);
      add_awgn(block.values, lv.sigma, noise);
      const auto res = sum_product_decode(code, soft_llr(block.values, lv.sigma, lv.amplitude), 50);
      failures += res.bits != info;
    }
    return failures / 150.0;
  };
  const double w1 = wer(1.0), w2 = wer(2.0);
  CHECK(w1 > 0.0);
  CHECK(w2 <= w1);
}

TEST_CASE("rate-1 passthrough is the identity") {
  CHECK(rate1_passthrough(Bits{1, 0, 1}) == Bits{1, 0, 1});
  CHECK(rate1_passthrough(Bits{}).empty());
  const std::vector<double> rx{0.2, -0.4, 1.1};
  CHECK(rate1_passthrough(hard_decision(rx)) == hard_decision(rx));
}

TEST_CASE("packing frames into info blocks") {
  const auto params = make_scheme_params(36, 4, 256);
  std::mt19937_64 rng(4);
  auto frame_of = [&](std::size_t slots) {
    Frame f;
    for (std::size_t i = 0; i < slots; ++i) {
      f.payloads.emplace_back(random_bits(params.cb_bits(), rng));
      f.bu_ids.emplace_back(i);
    }
    return f;
  };
  SUBCASE("32 slots fill one 1024-bit block exactly") {
    const std::vector<Frame> frames{frame_of(16), frame_of(16)};
    const auto packed = pack_frames_into_codewords(frames, 1024);
    CHECK(packed.blocks.size() == 1);
    CHECK(packed.pad_bits == 0);
  }
  SUBCASE("one slot leaves 992 pad bits") {
    const std::vector<Frame> frames{frame_of(1)};
    const auto packed = pack_frames_into_codewords(frames, 1024);
    REQUIRE(packed.blocks.size() == 1);
    CHECK(packed.pad_bits == 992);
    CHECK(std::all_of(packed.blocks[0].begin() + 32, packed.blocks[0].end(), [](auto b) { return b == 0; }));
  }
  SUBCASE("unpack inverts pack (property)") {
    for (int t = 0; t < 50; ++t) {
      std::vector<Frame> frames;
      Bits expect;
      const std::size_t count = rng() % 6;
      for (std::size_t i = 0; i < count; ++i) {
        frames.push_back(frame_of(1 + rng() % 16));
        for (const auto& p : frames.back().payloads) expect.insert(expect.end(), p.bits().begin(), p.bits().end());
      }
      const std::size_t k = 1 + rng() % 700;
      const auto packed = pack_frames_into_codewords(frames, k);
      for (const auto& b : packed.blocks) CHECK(b.size() == k);
      CHECK(packed.pad_bits < k);
      CHECK(unpack_blocks(packed) == expect);
    }
  }
}
