#include "obsim/phy.hpp"

#include <cmath>
#include <stdexcept>

namespace obsim {

std::string_view to_string(Scheme scheme) noexcept {
  return scheme == Scheme::Proposed ? "proposed" : "conventional";
}

std::string_view to_string(SnrConvention convention) noexcept {
  return convention == SnrConvention::EbN0Info ? "ebn0" : "esn0";
}

SymbolBlock bpsk_modulate(std::span<const std::uint8_t> bits, double amplitude) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("BPSK amplitude must be positive");
  SymbolBlock block;
  block.amplitude = amplitude;
  block.values.reserve(bits.size());
  for (auto b : bits) block.values.push_back(b ? -amplitude : amplitude);
  return block;
}

ChannelLevels noise_sigma(SnrSpec snr, const SchemeParams& params, CodeRate rate, Scheme scheme) {
  if (rate.info == 0 || rate.coded == 0 || rate.info > rate.coded)
    throw std::invalid_argument("code rate must lie in (0, 1]");
  if (!std::isfinite(snr.value_db)) throw std::invalid_argument("SNR must be finite");
  const double linear = std::pow(10.0, snr.value_db / 10.0);
  if (!(linear > 0.0)) throw std::invalid_argument("SNR linear value must be positive");

  if (snr.convention == SnrConvention::EsN0) return {std::sqrt(1.0 / (2.0 * linear)), 1.0};

  constexpr double eb = 1.0;
  const double n0 = eb / linear;
  double es = eb * rate.value();
  if (scheme == Scheme::Proposed)
    es *= static_cast<double>(params.n_total()) / static_cast<double>(params.cb_bits());
  return {std::sqrt(n0 / 2.0), std::sqrt(es)};
}

void add_awgn(std::span<double> samples, double sigma, GaussianStream& stream) {
  for (auto& s : samples) s += sigma * stream.next();
}

std::vector<double> awgn(const SymbolBlock& block, const NoiseModel& noise) {
  if (!(noise.sigma > 0.0)) throw std::invalid_argument("noise sigma must be positive");
  std::vector<double> out = block.values;
  GaussianStream stream(noise.seed);
  add_awgn(out, noise.sigma, stream);
  return out;
}

Bits hard_decision(std::span<const double> received) {
  Bits bits;
  bits.reserve(received.size());
  for (double y : received) bits.push_back(y < 0.0 ? 1 : 0);
  return bits;
}

std::vector<double> soft_llr(std::span<const double> received, double sigma, double amplitude) {
  if (!(sigma > 0.0)) throw std::invalid_argument("noise sigma must be positive");
  const double scale = 2.0 * amplitude / (sigma * sigma);
  std::vector<double> llr;
  llr.reserve(received.size());
  for (double y : received) llr.push_back(scale * y);
  return llr;
}

}  // namespace obsim
