#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "obsim/bitunit.hpp"

namespace obsim {

/// Ordered supplier of bit-units. Returns std::nullopt once exhausted.
class BuSource {
 public:
  virtual ~BuSource() = default;
  virtual std::optional<BitUnit> next() = 0;
};

/// Replays a fixed list of BUs.
class VectorBuSource final : public BuSource {
 public:
  explicit VectorBuSource(std::vector<BitUnit> bus) : bus_(std::move(bus)) {}
  std::optional<BitUnit> next() override;
  std::size_t remaining() const noexcept { return bus_.size() - pos_; }

 private:
  std::vector<BitUnit> bus_;
  std::size_t pos_ = 0;
};

/// Equiprobable i.i.d. bits from a seeded mt19937_64. `limit` caps the
/// stream length; close() ends it early.
class RandomBuSource final : public BuSource {
 public:
  RandomBuSource(std::size_t n_total, std::uint64_t seed, std::optional<std::uint64_t> limit = std::nullopt)
      : n_total_(n_total), limit_(limit), engine_(seed) {}

  std::optional<BitUnit> next() override;
  void close() noexcept { closed_ = true; }
  std::uint64_t produced() const noexcept { return produced_; }

 private:
  std::size_t n_total_;
  std::optional<std::uint64_t> limit_;
  std::mt19937_64 engine_;
  std::uint64_t produced_ = 0;
  bool closed_ = false;
};

/// One injection round: exactly phi payloads in slot order TS_1..TS_phi.
/// `bu_ids[i]` is the drop sequence number (0-based, in load order) of the BU
/// whose payload occupies slot i+1, or nullopt for a padding slot.
struct Frame {
  std::vector<CbPayload> payloads;
  std::vector<std::optional<std::uint64_t>> bu_ids;
};

/// Transmit-side storage of the falling model: phi FIFO columns of payloads.
///
/// Payloads fall into the column selected by their OB and leave from the
/// bottom, one column per time slot, in ascending slot order. An empty column
/// at its turn injects an all-zero padding payload. After every genuine
/// injection one fresh BU is pulled from the source, so a live source keeps
/// the occupancy constant; padding slots do not trigger a refill.
class FallingStorage {
 public:
  explicit FallingStorage(SchemeParams params);

  const SchemeParams& params() const noexcept { return params_; }

  /// Segments `bu` and appends its payload to the top of its column.
  SlotIndex drop_cb(const BitUnit& bu);

  /// Loads up to m_storage BUs; returns how many were available.
  std::size_t accumulate(BuSource& source);

  Frame inject_round(BuSource& source);

  /// Injects rounds without refill until the storage is empty.
  std::vector<Frame> drain();

  std::size_t occupancy() const noexcept { return occupancy_; }
  std::size_t column_depth(SlotIndex column) const;
  bool column_empty(SlotIndex column) const { return column_depth(column) == 0; }

  std::uint64_t padding_count() const noexcept { return padding_count_; }
  std::uint64_t loaded_count() const noexcept { return loaded_count_; }
  std::uint64_t emitted_count() const noexcept { return emitted_count_; }
  std::uint64_t rounds_injected() const noexcept { return rounds_; }

  /// Sum and count of per-payload residency, in slots between drop and
  /// injection. A payload dropped and injected within one round of slots
  /// waits fewer than phi slots.
  std::uint64_t residency_slots_total() const noexcept { return residency_total_; }
  double mean_residency_rounds() const noexcept;

 private:
  struct Entry {
    CbPayload cb;
    std::uint64_t id;
    std::uint64_t dropped_at;
  };

  std::deque<Entry>& column(SlotIndex index);

  SchemeParams params_;
  std::vector<std::deque<Entry>> columns_;
  std::size_t occupancy_ = 0;
  std::uint64_t padding_count_ = 0;
  std::uint64_t loaded_count_ = 0;
  std::uint64_t emitted_count_ = 0;
  std::uint64_t rounds_ = 0;
  std::uint64_t tick_ = 0;
  std::uint64_t residency_total_ = 0;
};

}  // namespace obsim
