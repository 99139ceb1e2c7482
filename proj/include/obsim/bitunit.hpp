#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace obsim {

/// Bit sequence, one element per bit, values restricted to 0 and 1.
using Bits = std::vector<std::uint8_t>;

/// Geometry of the opportunistic-bit scheme.
///
/// A bit-unit (BU) of `n_total` bits is split into a leading `k_ob`-bit
/// opportunistic part, conveyed by the index of one of `phi = 2^k_ob` time
/// slots, and a trailing payload of `n_total - k_ob` bits carried inside that
/// slot. `m_storage` is the number of payloads the transmitter accumulates
/// before the first injection round.
class SchemeParams {
 public:
  /// Largest supported OB width; keeps phi and the per-column storage table
  /// addressable.
  static constexpr std::size_t kMaxObBits = 20;

  std::size_t n_total() const noexcept { return n_total_; }
  std::size_t k_ob() const noexcept { return k_ob_; }
  std::size_t phi() const noexcept { return phi_; }
  std::size_t m_storage() const noexcept { return m_storage_; }
  std::size_t cb_bits() const noexcept { return n_total_ - k_ob_; }

  friend bool operator==(const SchemeParams&, const SchemeParams&) = default;

 private:
  friend SchemeParams make_scheme_params(std::size_t, std::size_t, std::size_t);
  SchemeParams(std::size_t n, std::size_t k, std::size_t m)
      : n_total_(n), k_ob_(k), phi_(std::size_t{1} << k), m_storage_(m) {}

  std::size_t n_total_;
  std::size_t k_ob_;
  std::size_t phi_;
  std::size_t m_storage_;
};

/// Validates and builds scheme parameters. Throws std::invalid_argument when
/// k_ob >= n_total, n_total == 0, m_storage == 0 or k_ob > kMaxObBits.
SchemeParams make_scheme_params(std::size_t n_total, std::size_t k_ob, std::size_t m_storage);

/// 1-based time-slot index within a round.
class SlotIndex {
 public:
  constexpr explicit SlotIndex(std::size_t value) noexcept : value_(value) {}
  constexpr std::size_t value() const noexcept { return value_; }
  friend constexpr auto operator<=>(SlotIndex, SlotIndex) = default;

 private:
  std::size_t value_;
};

class BitUnit {
 public:
  BitUnit() = default;
  /// Throws std::invalid_argument if any element is not 0 or 1.
  explicit BitUnit(Bits bits);

  const Bits& bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return bits_.size(); }

  friend auto operator<=>(const BitUnit&, const BitUnit&) = default;

 private:
  Bits bits_;
};

class ObPattern {
 public:
  ObPattern() = default;
  explicit ObPattern(Bits bits);

  const Bits& bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return bits_.size(); }

  friend auto operator<=>(const ObPattern&, const ObPattern&) = default;

 private:
  Bits bits_;
};

/// Slot content. Padding payloads are all-zero and flagged so the transmitter
/// can count them; on the wire they are indistinguishable from real data.
class CbPayload {
 public:
  CbPayload() = default;
  explicit CbPayload(Bits bits);

  static CbPayload padding(std::size_t length);

  const Bits& bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return bits_.size(); }
  bool is_padding() const noexcept { return is_padding_; }

  friend bool operator==(const CbPayload&, const CbPayload&) = default;

 private:
  Bits bits_;
  bool is_padding_ = false;
};

struct Segments {
  ObPattern ob;
  CbPayload cb;
};

/// Splits a BU into its leading OB bits and the remaining payload.
Segments segment(const BitUnit& bu, const SchemeParams& params);

/// Natural binary mapping: the pattern read big-endian, plus one.
SlotIndex ob_to_index(const ObPattern& ob);

ObPattern index_to_ob(SlotIndex index, const SchemeParams& params);

BitUnit reassemble(SlotIndex index, const CbPayload& cb, const SchemeParams& params);

/// Checks that `bits` only holds 0/1 values.
bool is_binary(std::span<const std::uint8_t> bits) noexcept;

}  // namespace obsim
