#include "obsim/receiver.hpp"

#include <stdexcept>
#include <utility>

namespace obsim {

TsPosition recover_ts_index(std::uint64_t psi, std::size_t phi) {
  if (psi == 0) throw std::invalid_argument("psi counts from 1");
  if (phi == 0) throw std::invalid_argument("phi must be positive");
  const std::uint64_t round = (psi - 1) / phi;
  return {round, SlotIndex(static_cast<std::size_t>(psi - round * phi))};
}

void StreamReceiver::push(std::span<const std::uint8_t> bits) {
  const std::size_t payload = params_.cb_bits();
  for (auto b : bits) {
    partial_.push_back(b);
    if (partial_.size() < payload) continue;
    const auto pos = recover_ts_index(next_psi_, params_.phi());
    ready_.push_back(ReceivedSlot{next_psi_, pos.round, pos.slot, std::move(partial_)});
    partial_.clear();
    ++next_psi_;
  }
}

std::vector<ReceivedSlot> StreamReceiver::take_slots() { return std::exchange(ready_, {}); }

BitUnit StreamReceiver::to_bit_unit(const ReceivedSlot& slot) const {
  return reassemble(slot.slot_index, CbPayload(slot.payload_bits), params_);
}

std::vector<BitUnit> receive_stream(std::span<const std::uint8_t> decoded_bits, const SchemeParams& params,
                                    std::size_t pad_bits) {
  if (pad_bits > decoded_bits.size()) throw std::invalid_argument("pad length exceeds stream length");
  const auto body = decoded_bits.first(decoded_bits.size() - pad_bits);
  if (body.size() % params.cb_bits() != 0)
    throw std::invalid_argument("stream length is not a multiple of the payload length");
  StreamReceiver rx(params);
  rx.push(body);
  std::vector<BitUnit> out;
  for (const auto& slot : rx.take_slots()) out.push_back(rx.to_bit_unit(slot));
  return out;
}

}  // namespace obsim
