#include "obsim/falling_storage.hpp"

#include <stdexcept>
#include <string>

namespace obsim {

std::optional<BitUnit> VectorBuSource::next() {
  if (pos_ >= bus_.size()) return std::nullopt;
  return bus_[pos_++];
}

std::optional<BitUnit> RandomBuSource::next() {
  if (closed_ || (limit_ && produced_ >= *limit_)) return std::nullopt;
  Bits bits(n_total_);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n_total_; ++i) {
    if (i % 64 == 0) word = engine_();
    bits[i] = static_cast<std::uint8_t>(word >> 63);
    word <<= 1;
  }
  ++produced_;
  return BitUnit(std::move(bits));
}

FallingStorage::FallingStorage(SchemeParams params) : params_(params), columns_(params.phi()) {}

std::deque<FallingStorage::Entry>& FallingStorage::column(SlotIndex index) {
  if (index.value() < 1 || index.value() > columns_.size())
    throw std::out_of_range("column " + std::to_string(index.value()) + " does not exist");
  return columns_[index.value() - 1];
}

std::size_t FallingStorage::column_depth(SlotIndex index) const {
  if (index.value() < 1 || index.value() > columns_.size())
    throw std::out_of_range("column " + std::to_string(index.value()) + " does not exist");
  return columns_[index.value() - 1].size();
}

SlotIndex FallingStorage::drop_cb(const BitUnit& bu) {
  auto [ob, cb] = segment(bu, params_);
  const SlotIndex slot = ob_to_index(ob);
  column(slot).push_back(Entry{std::move(cb), loaded_count_, tick_});
  ++loaded_count_;
  ++occupancy_;
  return slot;
}

std::size_t FallingStorage::accumulate(BuSource& source) {
  std::size_t loaded = 0;
  while (loaded < params_.m_storage()) {
    auto bu = source.next();
    if (!bu) break;
    drop_cb(*bu);
    ++loaded;
  }
  return loaded;
}

Frame FallingStorage::inject_round(BuSource& source) {
  const std::size_t phi = params_.phi();
  Frame frame;
  frame.payloads.reserve(phi);
  frame.bu_ids.reserve(phi);
  for (std::size_t i = 0; i < phi; ++i) {
    auto& col = columns_[i];
    if (col.empty()) {
      frame.payloads.push_back(CbPayload::padding(params_.cb_bits()));
      frame.bu_ids.emplace_back(std::nullopt);
      ++padding_count_;
      ++tick_;
      continue;
    }
    Entry entry = std::move(col.front());
    col.pop_front();
    --occupancy_;
    ++emitted_count_;
    residency_total_ += tick_ - entry.dropped_at;
    ++tick_;
    frame.payloads.push_back(std::move(entry.cb));
    frame.bu_ids.emplace_back(entry.id);
    if (auto bu = source.next()) drop_cb(*bu);
  }
  ++rounds_;
  return frame;
}

std::vector<Frame> FallingStorage::drain() {
  VectorBuSource empty({});
  std::vector<Frame> frames;
  while (occupancy_ > 0) frames.push_back(inject_round(empty));
  return frames;
}

double FallingStorage::mean_residency_rounds() const noexcept {
  if (emitted_count_ == 0) return 0.0;
  return static_cast<double>(residency_total_) / static_cast<double>(emitted_count_) /
         static_cast<double>(params_.phi());
}

}  // namespace obsim
