#include "obsim/analysis.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <stdexcept>

namespace obsim {

double unload_probability(std::size_t phi, std::size_t m) {
  if (phi == 0) throw std::invalid_argument("phi must be positive");
  const double miss = static_cast<double>(phi - 1) / static_cast<double>(phi);
  return std::pow(miss, static_cast<double>(m));
}

double spectral_gain(std::size_t n_total, std::size_t k_ob) {
  if (k_ob >= n_total) throw std::invalid_argument("spectral gain needs k_ob < n_total");
  return static_cast<double>(n_total) / static_cast<double>(n_total - k_ob);
}

double snr_gain_db(std::size_t n_total, std::size_t k_ob) { return 10.0 * std::log10(spectral_gain(n_total, k_ob)); }

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double analytic_ber(Scheme scheme, SnrSpec snr, const SchemeParams& params, CodeRate rate) {
  if (rate.info != rate.coded) throw std::invalid_argument("closed-form BER covers the uncoded case only");
  const double es_n0 = std::pow(10.0, snr.value_db / 10.0);
  if (scheme == Scheme::Conventional) return q_function(std::sqrt(2.0 * es_n0));

  const double gain = spectral_gain(params.n_total(), params.k_ob());
  const double boost = snr.convention == SnrConvention::EbN0Info ? gain : 1.0;
  return q_function(std::sqrt(2.0 * boost * es_n0)) / gain;
}

double analytic_snr_at_ber(Scheme scheme, SnrConvention convention, const SchemeParams& params, double target) {
  double lo = -30.0, hi = 60.0;
  auto ber = [&](double db) { return analytic_ber(scheme, {db, convention}, params); };
  if (!(ber(lo) >= target && ber(hi) <= target)) throw std::domain_error("target BER not bracketed");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ber(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

AnalyticCurve unload_curve(std::size_t phi, std::span<const std::size_t> m_grid) {
  AnalyticCurve c;
  c.label = "unload_probability(phi=" + std::to_string(phi) + ")";
  for (auto m : m_grid) {
    c.x.push_back(static_cast<double>(m));
    c.y.push_back(unload_probability(phi, m));
  }
  return c;
}

AnalyticCurve ber_curve(Scheme scheme, SnrConvention convention, const SchemeParams& params,
                        std::span<const double> snr_db) {
  AnalyticCurve c;
  c.label = "analytic_ber(" + std::string(to_string(scheme)) + "," + std::string(to_string(convention)) + ")";
  for (double db : snr_db) {
    c.x.push_back(db);
    c.y.push_back(analytic_ber(scheme, {db, convention}, params));
  }
  return c;
}

DelayStorageReport delay_storage_report(const SchemeParams& params) {
  return {params.m_storage(), params.m_storage(), params.m_storage() * params.cb_bits()};
}

Interval binomial_ci(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw std::invalid_argument("successes exceed trials");
  const double alpha = 1.0 - confidence;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  const double lo = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, alpha / 2.0);
  const double hi = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - alpha / 2.0);
  return {lo, hi};
}

bool within_binomial_sigma(std::uint64_t successes, std::uint64_t trials, double p, double k) {
  if (trials == 0) return false;
  const double n = static_cast<double>(trials);
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  return std::abs(static_cast<double>(successes) / n - p) <= k * sigma;
}

}  // namespace obsim
