#include "obsim/bitunit.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace obsim {

bool is_binary(std::span<const std::uint8_t> bits) noexcept {
  return std::all_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b <= 1; });
}

SchemeParams make_scheme_params(std::size_t n_total, std::size_t k_ob, std::size_t m_storage) {
  if (n_total == 0) throw std::invalid_argument("n_total must be at least 1");
  if (k_ob >= n_total)
    throw std::invalid_argument("k_ob must be smaller than n_total (empty payload unsupported)");
  if (k_ob > SchemeParams::kMaxObBits)
    throw std::invalid_argument("k_ob=" + std::to_string(k_ob) + " exceeds the supported maximum of " +
                                std::to_string(SchemeParams::kMaxObBits));
  if (m_storage == 0) throw std::invalid_argument("m_storage must be at least 1");
  return SchemeParams(n_total, k_ob, m_storage);
}

BitUnit::BitUnit(Bits bits) : bits_(std::move(bits)) {
  if (!is_binary(bits_)) throw std::invalid_argument("BitUnit holds a non-binary value");
}

ObPattern::ObPattern(Bits bits) : bits_(std::move(bits)) {
  if (!is_binary(bits_)) throw std::invalid_argument("ObPattern holds a non-binary value");
}

CbPayload::CbPayload(Bits bits) : bits_(std::move(bits)) {
  if (!is_binary(bits_)) throw std::invalid_argument("CbPayload holds a non-binary value");
}

CbPayload CbPayload::padding(std::size_t length) {
  CbPayload p;
  p.bits_.assign(length, 0);
  p.is_padding_ = true;
  return p;
}

Segments segment(const BitUnit& bu, const SchemeParams& params) {
  if (bu.size() != params.n_total())
    throw std::invalid_argument("BU length " + std::to_string(bu.size()) + " does not match n_total " +
                                std::to_string(params.n_total()));
  const auto split = bu.bits().begin() + static_cast<std::ptrdiff_t>(params.k_ob());
  return {ObPattern(Bits(bu.bits().begin(), split)), CbPayload(Bits(split, bu.bits().end()))};
}

SlotIndex ob_to_index(const ObPattern& ob) {
  std::size_t value = 0;
  for (auto b : ob.bits()) value = (value << 1) | b;
  return SlotIndex(value + 1);
}

ObPattern index_to_ob(SlotIndex index, const SchemeParams& params) {
  if (index.value() < 1 || index.value() > params.phi())
    throw std::out_of_range("slot index " + std::to_string(index.value()) + " outside 1.." +
                            std::to_string(params.phi()));
  const std::size_t value = index.value() - 1;
  const std::size_t k = params.k_ob();
  Bits bits(k);
  for (std::size_t i = 0; i < k; ++i) bits[i] = static_cast<std::uint8_t>((value >> (k - 1 - i)) & 1U);
  return ObPattern(std::move(bits));
}

BitUnit reassemble(SlotIndex index, const CbPayload& cb, const SchemeParams& params) {
  if (cb.size() != params.cb_bits())
    throw std::invalid_argument("payload length " + std::to_string(cb.size()) + " does not match " +
                                std::to_string(params.cb_bits()));
  Bits bits = index_to_ob(index, params).bits();
  bits.insert(bits.end(), cb.bits().begin(), cb.bits().end());
  return BitUnit(std::move(bits));
}

}  // namespace obsim
