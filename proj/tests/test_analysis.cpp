#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "obsim/analysis.hpp"
#include "oracles.hpp"

using namespace obsim;

namespace {

// P(X <= k) for X ~ Binomial(n, p), summed term by term.
double binom_cdf(int k, int n, double p) {
  double total = 0.0;
  for (int i = 0; i <= k; ++i)
    total += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                      (n - i) * std::log1p(-p));
  return total;
}

const SchemeParams kDefault = make_scheme_params(36, 4, 256);

}  // namespace

TEST_CASE("unload probability") {
  CHECK(unload_probability(8, 0) == 1.0);
  CHECK(unload_probability(2, 1) == doctest::Approx(0.5));
  CHECK(unload_probability(8, 8) == doctest::Approx(0.343609).epsilon(1e-5));
  CHECK(unload_probability(16, 256) == doctest::Approx(6.68e-8).epsilon(0.01));
  CHECK(unload_probability(1, 3) == 0.0);
  // Repeated multiplication as an independent route.
  for (std::size_t phi : {2, 8, 32})
    for (std::size_t m : {1, 5, 40}) {
      double q = 1.0;
      for (std::size_t i = 0; i < m; ++i) q *= static_cast<double>(phi - 1) / static_cast<double>(phi);
      CHECK(unload_probability(phi, m) == doctest::Approx(q).epsilon(1e-12));
    }
}

TEST_CASE("unload probability is monotone in M and in phi") {
  for (std::size_t m = 1; m < 200; ++m) {
    CHECK(unload_probability(16, m + 1) < unload_probability(16, m));
    CHECK(unload_probability(8, m) < unload_probability(16, m));
    CHECK(unload_probability(16, m) < unload_probability(32, m));
  }
}

TEST_CASE("spectral and SNR gain") {
  CHECK(spectral_gain(36, 4) == doctest::Approx(1.125));
  CHECK(spectral_gain(36, 0) == 1.0);
  CHECK(spectral_gain(8, 4) == doctest::Approx(2.0));
  CHECK(snr_gain_db(36, 4) == doctest::Approx(0.5115).epsilon(1e-3));
  CHECK(snr_gain_db(36, 0) == 0.0);
  CHECK(snr_gain_db(8, 4) == doctest::Approx(3.0103).epsilon(1e-4));
  CHECK_THROWS_AS(spectral_gain(4, 4), std::invalid_argument);
}

TEST_CASE("Q function against quadrature") {
  CHECK(q_function(0.0) == doctest::Approx(0.5));
  for (double x : {0.3, 1.0, std::sqrt(2.0), 2.5, 4.0}) {
    CHECK(q_function(x) == doctest::Approx(oracle::q_quadrature(x)).epsilon(1e-8));
    CHECK(q_function(-x) == doctest::Approx(1.0 - q_function(x)));
  }
  CHECK(q_function(std::sqrt(2.0)) == doctest::Approx(0.0786).epsilon(1e-3));
}

TEST_CASE("analytic BER at 0 dB Eb/N0") {
  const SnrSpec zero{0.0, SnrConvention::EbN0Info};
  CHECK(analytic_ber(Scheme::Conventional, zero, kDefault) == doctest::Approx(0.0786).epsilon(2e-3));
  // 32/36 of the bits at Q(sqrt(2 * 1.125)), the rest error-free.
  const double expect = (32.0 / 36.0) * oracle::q_quadrature(std::sqrt(2.0 * 1.125));
  CHECK(analytic_ber(Scheme::Proposed, zero, kDefault) == doctest::Approx(expect).epsilon(1e-6));
  CHECK(analytic_ber(Scheme::Proposed, zero, kDefault) == doctest::Approx(0.0594).epsilon(3e-3));

  const auto k0 = make_scheme_params(36, 0, 1);
  CHECK(analytic_ber(Scheme::Proposed, zero, k0) == doctest::Approx(analytic_ber(Scheme::Conventional, zero, k0)));
  CHECK_THROWS_AS(analytic_ber(Scheme::Proposed, zero, kDefault, CodeRate{1, 2}), std::invalid_argument);
}

TEST_CASE("analytic BER under the Es/N0 convention") {
  const SnrSpec es{3.0, SnrConvention::EsN0};
  const double lin = std::pow(10.0, 0.3);
  CHECK(analytic_ber(Scheme::Conventional, es, kDefault) == doctest::Approx(oracle::q_quadrature(std::sqrt(2 * lin))));
  CHECK(analytic_ber(Scheme::Proposed, es, kDefault) ==
        doctest::Approx(oracle::q_quadrature(std::sqrt(2 * lin)) * 32.0 / 36.0));
}

TEST_CASE("analytic curves are ordered and decreasing") {
  std::vector<double> grid;
  for (double x = 0.0; x <= 10.0; x += 0.5) grid.push_back(x);
  for (auto conv : {SnrConvention::EbN0Info, SnrConvention::EsN0}) {
    const auto prop = ber_curve(Scheme::Proposed, conv, kDefault, grid);
    const auto base = ber_curve(Scheme::Conventional, conv, kDefault, grid);
    REQUIRE(prop.y.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(prop.y[i] < base.y[i]);
      if (i) {
        CHECK(prop.y[i] < prop.y[i - 1]);
        CHECK(base.y[i] < base.y[i - 1]);
      }
    }
  }
}

TEST_CASE("analytic SNR at a target BER") {
  const double conv = analytic_snr_at_ber(Scheme::Conventional, SnrConvention::EbN0Info, kDefault, 1e-4);
  const double prop = analytic_snr_at_ber(Scheme::Proposed, SnrConvention::EbN0Info, kDefault, 1e-4);
  CHECK(conv == doctest::Approx(8.40).epsilon(0.01));
  CHECK(analytic_ber(Scheme::Conventional, {conv, SnrConvention::EbN0Info}, kDefault) ==
        doctest::Approx(1e-4).epsilon(1e-6));
  // Energy boost plus the error-free index bits: a bit more than 0.5115 dB.
  CHECK(conv - prop > 0.5115);
  CHECK(conv - prop < 0.7);
}

TEST_CASE("unload curve and delay/storage") {
  const std::vector<std::size_t> m{1, 2, 4};
  const auto c = unload_curve(8, m);
  REQUIRE(c.x.size() == 3);
  CHECK(c.y[2] == doctest::Approx(std::pow(7.0 / 8.0, 4)));

  const auto ds = delay_storage_report(kDefault);
  CHECK(ds.storage_bits == 8192);
  CHECK(ds.resident_bus == 256);
  CHECK(ds.bus_before_first_injection == 256);
}

TEST_CASE("Clopper-Pearson interval hits its tail conditions") {
  for (int n : {10, 50, 200})
    for (int k : {0, 1, n / 3, n - 1, n}) {
      const auto ci = binomial_ci(k, n);
      CHECK(ci.lo <= static_cast<double>(k) / n);
      CHECK(ci.hi >= static_cast<double>(k) / n);
      if (k > 0) CHECK(1.0 - binom_cdf(k - 1, n, ci.lo) == doctest::Approx(0.025).epsilon(1e-6));
      if (k < n) CHECK(binom_cdf(k, n, ci.hi) == doctest::Approx(0.025).epsilon(1e-6));
    }
  CHECK(binomial_ci(0, 0).lo == 0.0);
  CHECK(binomial_ci(0, 0).hi == 1.0);
  CHECK_THROWS_AS(binomial_ci(5, 4), std::invalid_argument);
}

TEST_CASE("binomial sigma check") {
  CHECK(within_binomial_sigma(500, 1000, 0.5, 3.0));
  CHECK(within_binomial_sigma(547, 1000, 0.5, 3.0));   // 2.97 sigma
  CHECK_FALSE(within_binomial_sigma(548, 1000, 0.5, 3.0));
  CHECK_FALSE(within_binomial_sigma(0, 0, 0.5, 3.0));
}
