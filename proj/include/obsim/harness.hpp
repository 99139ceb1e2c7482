#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "obsim/analysis.hpp"
#include "obsim/bitunit.hpp"
#include "obsim/fec.hpp"
#include "obsim/phy.hpp"

namespace obsim {

struct Rate1Code {};

struct LdpcChoice {
  std::filesystem::path alist;
  std::size_t max_iters = 50;
  std::shared_ptr<const LdpcCode> code;  ///< derived encoder + decoder graph
};

/// Loads `alist` and derives its encoder.
LdpcChoice load_ldpc_choice(const std::filesystem::path& alist, std::size_t max_iters = 50);

using CodeChoice = std::variant<Rate1Code, LdpcChoice>;

struct ExperimentConfig {
  Scheme scheme = Scheme::Proposed;
  SchemeParams params = make_scheme_params(36, 4, 256);
  std::vector<SnrSpec> snr_grid;
  CodeChoice code = Rate1Code{};
  std::uint64_t n_bus = 100000;     ///< cap on BUs per SNR point
  std::uint64_t master_seed = 1;
  std::uint64_t min_errors = 100;   ///< stop a point once this many bit errors are seen
  bool noiseless = false;           ///< bypass the AWGN stage
  bool paired_noise = false;        ///< share noise streams between schemes
};

/// Throws std::invalid_argument on an inconsistent configuration.
void validate(const ExperimentConfig& config);

struct BerPoint {
  SnrSpec snr{};
  Scheme scheme = Scheme::Proposed;
  std::uint64_t data_seed = 0;
  std::uint64_t noise_seed = 0;
  std::uint64_t bus_sent = 0;
  std::uint64_t bits_sent = 0;       ///< bus_sent * N
  std::uint64_t channel_bits = 0;    ///< information bits that crossed the channel
  std::uint64_t bit_errors = 0;
  std::uint64_t bu_errors = 0;
  std::uint64_t padding_slots = 0;
  std::uint64_t phantom_bus = 0;
  std::uint64_t channel_symbols = 0;
  std::uint64_t blocks = 0;
  std::uint64_t converged_blocks = 0;
  double ber = 0.0;
  Interval ci{0.0, 1.0};
  bool low_confidence = false;
  double mean_residency_rounds = 0.0;
  double wall_seconds = 0.0;

  /// Fraction of decoded blocks that satisfied every check; 1 for rate-1.
  double converged_fraction() const noexcept;
};

struct BerReport {
  ExperimentConfig config;
  std::vector<BerPoint> points;
  std::string noise_algorithm;
  double llr_clamp = kLlrClamp;
};

/// Proposed scheme: storage -> (packing) -> encode -> BPSK -> AWGN ->
/// decode -> slot index recovery -> per-BU comparison with the transmit log.
BerReport run_proposed(const ExperimentConfig& config);

/// Baseline: every BU bit goes through the channel in order.
BerReport run_conventional(const ExperimentConfig& config);

BerReport run_ber(const ExperimentConfig& config);

/// SNR where a curve crosses `target`, by linear interpolation of
/// log10(BER) between the bracketing grid points. Points with zero BER are
/// skipped. Throws std::domain_error when no pair brackets the target.
double snr_at_ber(std::span<const double> snr_db, std::span<const double> ber, double target);

/// SNR(reference) - SNR(candidate) at `target`; positive when the candidate
/// reaches the target at a lower SNR.
double measure_snr_gap(const BerReport& reference, const BerReport& candidate, double target);

/// CSV with header
/// `snr_db,scheme,bits,errors,ber,ci_lo,ci_hi,bu_errors,padding,converged_frac`.
void write_ber_csv(std::ostream& out, std::span<const BerReport> reports);

inline constexpr const char* kBerCsvHeader =
    "snr_db,scheme,bits,errors,ber,ci_lo,ci_hi,bu_errors,padding,converged_frac";

// ---------------------------------------------------------------------------
// Unload-probability experiment.

enum class SnapshotMode {
  /// Fresh storage per trial loaded with exactly M i.i.d. payloads.
  Accumulation,
  /// One storage under streaming refill; column 1 inspected at every round
  /// start after a warm-up.
  SteadyState,
};

struct UnloadConfig {
  std::vector<std::size_t> phis{8, 16, 32};
  std::vector<std::size_t> m_grid;  ///< empty: default grid over [1, 12*phi]
  std::uint64_t trials = 40000;
  std::uint64_t seed = 1;
  std::uint64_t min_events = 100;
  SnapshotMode mode = SnapshotMode::Accumulation;
};

struct UnloadSeries {
  std::size_t phi = 0;
  AnalyticCurve empirical;
  AnalyticCurve analytic;
  std::vector<std::uint64_t> empty_counts;
  std::vector<std::uint64_t> trials;
  std::vector<Interval> ci;
  std::vector<bool> low_confidence;  ///< expected events below min_events
};

std::vector<std::size_t> default_m_grid(std::size_t phi);

std::vector<UnloadSeries> run_unload_experiment(const UnloadConfig& config);

// ---------------------------------------------------------------------------
// Noiseless fidelity check.

struct RoundtripReport {
  std::uint64_t transmitted = 0;
  std::uint64_t recovered = 0;
  std::uint64_t padding_slots = 0;
  std::uint64_t phantoms = 0;        ///< recovered minus transmitted, as a multiset
  std::uint64_t missing = 0;         ///< transmitted BUs absent from the recovered multiset
  bool phantoms_are_padding = false; ///< every extra equals index_to_ob(i) followed by zeros
  bool multiset_equal = false;       ///< recovered - phantoms == transmitted
  bool class_order_preserved = false;
  std::uint64_t channel_symbols = 0;
  std::uint64_t slots = 0;
  double mean_residency_rounds = 0.0;
};

RoundtripReport run_roundtrip(const SchemeParams& params, std::uint64_t n_bus, std::uint64_t seed,
                              const CodeChoice& code = Rate1Code{});

}  // namespace obsim
