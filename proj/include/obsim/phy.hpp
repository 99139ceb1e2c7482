#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "obsim/bitunit.hpp"
#include "obsim/random.hpp"

namespace obsim {

enum class Scheme { Proposed, Conventional };

/// How an SNR value in dB is normalized.
///  - EbN0Info: energy per information bit of the BU. Payload symbols of the
///    proposed scheme absorb the energy of the index-carried bits.
///  - EsN0: energy per transmitted channel symbol.
enum class SnrConvention { EbN0Info, EsN0 };

struct SnrSpec {
  double value_db;
  SnrConvention convention;
};

/// Channel code rate as a ratio of information to coded bits.
struct CodeRate {
  std::size_t info = 1;
  std::size_t coded = 1;
  double value() const noexcept { return static_cast<double>(info) / static_cast<double>(coded); }
};

struct SymbolBlock {
  std::vector<double> values;
  double amplitude = 1.0;
};

struct NoiseModel {
  double sigma;
  std::uint64_t seed;
};

/// Transmit amplitude and per-dimension noise deviation for one SNR point.
struct ChannelLevels {
  double sigma;
  double amplitude;
};

std::string_view to_string(Scheme scheme) noexcept;
std::string_view to_string(SnrConvention convention) noexcept;

/// Bit 0 maps to +amplitude, bit 1 to -amplitude.
SymbolBlock bpsk_modulate(std::span<const std::uint8_t> bits, double amplitude);

/// Noise level and amplitude for an SNR point. Eb is fixed to 1 under
/// EbN0Info, so Es = rate * N/(N-K) for the proposed scheme and Es = rate for
/// the conventional one. Under EsN0 the amplitude is 1 for both schemes.
ChannelLevels noise_sigma(SnrSpec snr, const SchemeParams& params, CodeRate rate, Scheme scheme);

/// Adds N(0, sigma^2) noise drawn from a fresh stream seeded by noise.seed.
std::vector<double> awgn(const SymbolBlock& block, const NoiseModel& noise);

/// Streaming variant: adds noise in place, advancing `stream`.
void add_awgn(std::span<double> samples, double sigma, GaussianStream& stream);

/// value >= 0 decides bit 0; ties go to 0.
Bits hard_decision(std::span<const double> received);

/// Channel LLRs 2*a*y/sigma^2; positive favors bit 0.
std::vector<double> soft_llr(std::span<const double> received, double sigma, double amplitude);

}  // namespace obsim
