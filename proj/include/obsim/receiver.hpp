#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "obsim/bitunit.hpp"

namespace obsim {

struct TsPosition {
  std::uint64_t round;  ///< 0-based injection round
  SlotIndex slot;       ///< 1..phi
};

/// Slot index and round of the psi-th received slot (psi counted from 1).
TsPosition recover_ts_index(std::uint64_t psi, std::size_t phi);

struct ReceivedSlot {
  std::uint64_t psi;
  std::uint64_t round;
  SlotIndex slot_index;
  Bits payload_bits;
};

/// Chunks a decoded bit stream into slot payloads, numbering them
/// psi = 1, 2, ... in arrival order. Partial payloads are held until the
/// remaining bits arrive.
class StreamReceiver {
 public:
  explicit StreamReceiver(SchemeParams params) : params_(params) {}

  void push(std::span<const std::uint8_t> bits);
  std::vector<ReceivedSlot> take_slots();

  /// Rebuilds the BU carried by a slot.
  BitUnit to_bit_unit(const ReceivedSlot& slot) const;

  std::size_t pending_bits() const noexcept { return partial_.size(); }
  std::uint64_t slots_received() const noexcept { return next_psi_ - 1; }

 private:
  SchemeParams params_;
  Bits partial_;
  std::vector<ReceivedSlot> ready_;
  std::uint64_t next_psi_ = 1;
};

/// Strips `pad_bits` trailing pad bits and reconstructs every slot as a BU,
/// phantoms from padding slots included. Throws std::invalid_argument when
/// the remaining length is not a whole number of payloads.
std::vector<BitUnit> receive_stream(std::span<const std::uint8_t> decoded_bits, const SchemeParams& params,
                                    std::size_t pad_bits);

}  // namespace obsim
