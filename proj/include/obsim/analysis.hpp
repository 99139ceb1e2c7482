#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "obsim/bitunit.hpp"
#include "obsim/phy.hpp"

namespace obsim {

struct AnalyticCurve {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
};

/// Probability that a given column stays empty after M payloads fall
/// uniformly into phi columns: ((phi - 1) / phi)^M.
double unload_probability(std::size_t phi, std::size_t m);

/// N / (N - K). Throws std::invalid_argument unless k_ob < n_total.
double spectral_gain(std::size_t n_total, std::size_t k_ob);

double snr_gain_db(std::size_t n_total, std::size_t k_ob);

/// Gaussian tail, 0.5 * erfc(x / sqrt(2)).
double q_function(double x);

/// Closed-form uncoded BPSK BER over all N bits of a BU. Index-carried bits
/// never err, so the proposed scheme scales the payload bit error rate by
/// (N - K) / N; under EbN0Info its payload symbols also carry N/(N-K) more
/// energy. Throws std::invalid_argument for coded rates.
double analytic_ber(Scheme scheme, SnrSpec snr, const SchemeParams& params, CodeRate rate = {});

/// SNR in dB at which analytic_ber equals `target`, by bisection on
/// [-30, 60] dB.
double analytic_snr_at_ber(Scheme scheme, SnrConvention convention, const SchemeParams& params, double target);

AnalyticCurve unload_curve(std::size_t phi, std::span<const std::size_t> m_grid);
AnalyticCurve ber_curve(Scheme scheme, SnrConvention convention, const SchemeParams& params,
                        std::span<const double> snr_db);

struct DelayStorageReport {
  std::size_t resident_bus;               ///< payloads held in steady state
  std::size_t bus_before_first_injection;
  std::size_t storage_bits;
};

DelayStorageReport delay_storage_report(const SchemeParams& params);

struct Interval {
  double lo;
  double hi;
};

/// Exact (Clopper-Pearson) two-sided binomial confidence interval.
Interval binomial_ci(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

/// |observed/trials - p| <= k * sqrt(p(1-p)/trials).
bool within_binomial_sigma(std::uint64_t successes, std::uint64_t trials, double p, double k);

}  // namespace obsim
