#include "obsim/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <deque>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "obsim/falling_storage.hpp"
#include "obsim/random.hpp"
#include "obsim/receiver.hpp"

namespace obsim {

namespace {

constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kNoiseStream = 0x9015e;
constexpr std::uint64_t kUnloadStream = 0x0b10ad;

const LdpcChoice* ldpc_of(const CodeChoice& code) { return std::get_if<LdpcChoice>(&code); }

CodeRate rate_of(const CodeChoice& code) {
  if (const auto* l = ldpc_of(code)) return l->code->rate();
  return {};
}

std::uint64_t scheme_tag(Scheme s) { return s == Scheme::Proposed ? 1 : 2; }

std::size_t hamming(const Bits& a, const Bits& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Channel chain below the scheme layer: optional LDPC encode, BPSK, AWGN and
// hard or sum-product detection. Decoded information bits queue up in order.
class Link {
 public:
  Link(const CodeChoice& code, ChannelLevels levels, bool noiseless, std::uint64_t noise_seed)
      : ldpc_(ldpc_of(code)), levels_(levels), noiseless_(noiseless), noise_(noise_seed) {
    if (ldpc_) packer_.emplace(ldpc_->code->k_info());
  }

  void send(std::span<const std::uint8_t> bits) {
    if (!packer_) {
      transmit_uncoded(bits);
      return;
    }
    packer_->push(bits);
    for (const auto& block : packer_->take_blocks()) transmit_block(block);
  }

  /// Flushes the partial block; returns the number of pad bits appended.
  std::size_t finish() {
    if (!packer_) return 0;
    const std::size_t pad = packer_->finish();
    for (const auto& block : packer_->take_blocks()) transmit_block(block);
    return pad;
  }

  Bits take_decoded() { return std::exchange(decoded_, {}); }

  std::uint64_t symbols() const noexcept { return symbols_; }
  std::uint64_t blocks() const noexcept { return blocks_; }
  std::uint64_t converged() const noexcept { return converged_; }

 private:
  std::vector<double> channel(std::span<const std::uint8_t> bits) {
    SymbolBlock block = bpsk_modulate(bits, levels_.amplitude);
    if (!noiseless_) add_awgn(block.values, levels_.sigma, noise_);
    symbols_ += block.values.size();
    return std::move(block.values);
  }

  void transmit_uncoded(std::span<const std::uint8_t> bits) {
    const Bits decided = hard_decision(channel(bits));
    decoded_.insert(decoded_.end(), decided.begin(), decided.end());
  }

  void transmit_block(const Bits& info) {
    const Bits codeword = ldpc_->code->encode(info);
    const auto llr = soft_llr(channel(codeword), levels_.sigma, levels_.amplitude);
    const DecodeResult result = sum_product_decode(*ldpc_->code, llr, ldpc_->max_iters);
    decoded_.insert(decoded_.end(), result.bits.begin(), result.bits.end());
    ++blocks_;
    converged_ += result.converged ? 1 : 0;
  }

  const LdpcChoice* ldpc_;
  ChannelLevels levels_;
  bool noiseless_;
  GaussianStream noise_;
  std::optional<BlockPacker> packer_;
  Bits decoded_;
  std::uint64_t symbols_ = 0;
  std::uint64_t blocks_ = 0;
  std::uint64_t converged_ = 0;
};

// Hands out BUs from `inner` and remembers each one under its load order.
class LoggingSource final : public BuSource {
 public:
  explicit LoggingSource(BuSource& inner) : inner_(inner) {}

  std::optional<BitUnit> next() override {
    auto bu = inner_.next();
    if (bu) in_flight_.emplace(next_id_++, *bu);
    return bu;
  }

  BitUnit release(std::uint64_t id) {
    auto it = in_flight_.find(id);
    if (it == in_flight_.end()) throw std::logic_error("slot refers to an unknown BU");
    BitUnit bu = std::move(it->second);
    in_flight_.erase(it);
    return bu;
  }

  std::size_t in_flight() const noexcept { return in_flight_.size(); }

 private:
  BuSource& inner_;
  std::unordered_map<std::uint64_t, BitUnit> in_flight_;
  std::uint64_t next_id_ = 0;
};

BerPoint make_point(const ExperimentConfig& config, std::size_t index) {
  BerPoint p;
  p.snr = config.snr_grid[index];
  p.scheme = config.scheme;
  p.data_seed = derive_seed(config.master_seed, {kDataStream, index});
  p.noise_seed = derive_seed(config.master_seed,
                             {kNoiseStream, config.paired_noise ? 0 : scheme_tag(config.scheme), index, 0});
  return p;
}

void finalize(BerPoint& p, const ExperimentConfig& config, const Link& link) {
  p.channel_symbols = link.symbols();
  p.blocks = link.blocks();
  p.converged_blocks = link.converged();
  p.ber = p.bits_sent ? static_cast<double>(p.bit_errors) / static_cast<double>(p.bits_sent) : 0.0;
  p.ci = binomial_ci(p.bit_errors, p.bits_sent);
  p.low_confidence = p.bit_errors < config.min_errors;
}

BerPoint run_proposed_point(const ExperimentConfig& config, std::size_t index) {
  const auto start = std::chrono::steady_clock::now();
  const SchemeParams& params = config.params;
  BerPoint p = make_point(config, index);
  const ChannelLevels levels = noise_sigma(p.snr, params, rate_of(config.code), Scheme::Proposed);

  RandomBuSource source(params.n_total(), p.data_seed, config.n_bus);
  LoggingSource logged(source);
  FallingStorage storage(params);
  storage.accumulate(logged);

  Link link(config.code, levels, config.noiseless, p.noise_seed);
  StreamReceiver rx(params);
  std::deque<std::optional<std::uint64_t>> slot_log;

  auto settle = [&](const Bits& decoded) {
    rx.push(decoded);
    for (const auto& slot : rx.take_slots()) {
      const auto truth = slot_log.front();
      slot_log.pop_front();
      if (!truth) {
        ++p.phantom_bus;
        continue;
      }
      const BitUnit sent = logged.release(*truth);
      const std::size_t errors = hamming(rx.to_bit_unit(slot).bits(), sent.bits());
      ++p.bus_sent;
      p.bit_errors += errors;
      p.bu_errors += errors > 0 ? 1 : 0;
    }
  };

  while (storage.occupancy() > 0) {
    const Frame frame = storage.inject_round(logged);
    for (std::size_t i = 0; i < frame.payloads.size(); ++i) {
      slot_log.push_back(frame.bu_ids[i]);
      link.send(frame.payloads[i].bits());
    }
    settle(link.take_decoded());
    if (p.bit_errors >= config.min_errors) source.close();
  }
  const std::size_t pad = link.finish();
  Bits tail = link.take_decoded();
  tail.resize(tail.size() - pad);
  settle(tail);
  if (!slot_log.empty() || logged.in_flight() != 0) throw std::logic_error("transmit log not fully reconciled");

  p.padding_slots = storage.padding_count();
  p.bits_sent = p.bus_sent * params.n_total();
  p.channel_bits = p.bus_sent * params.cb_bits();
  p.mean_residency_rounds = storage.mean_residency_rounds();
  finalize(p, config, link);
  p.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return p;
}

BerPoint run_conventional_point(const ExperimentConfig& config, std::size_t index) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = config.params.n_total();
  BerPoint p = make_point(config, index);
  const ChannelLevels levels = noise_sigma(p.snr, config.params, rate_of(config.code), Scheme::Conventional);

  RandomBuSource source(n, p.data_seed, config.n_bus);
  Link link(config.code, levels, config.noiseless, p.noise_seed);
  std::deque<BitUnit> sent;
  Bits pending;

  auto settle = [&](const Bits& decoded) {
    pending.insert(pending.end(), decoded.begin(), decoded.end());
    std::size_t offset = 0;
    for (; pending.size() - offset >= n; offset += n) {
      const Bits& ref = sent.front().bits();
      std::size_t errors = 0;
      for (std::size_t i = 0; i < n; ++i) errors += pending[offset + i] != ref[i];
      sent.pop_front();
      ++p.bus_sent;
      p.bit_errors += errors;
      p.bu_errors += errors > 0 ? 1 : 0;
    }
    pending.erase(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(offset));
  };

  while (auto bu = source.next()) {
    link.send(bu->bits());
    sent.push_back(std::move(*bu));
    settle(link.take_decoded());
    if (p.bit_errors >= config.min_errors) source.close();
  }
  const std::size_t pad = link.finish();
  Bits tail = link.take_decoded();
  tail.resize(tail.size() - pad);
  settle(tail);
  if (!sent.empty() || !pending.empty()) throw std::logic_error("conventional stream not fully reconciled");

  p.bits_sent = p.bus_sent * n;
  p.channel_bits = p.bits_sent;
  finalize(p, config, link);
  p.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return p;
}

BerReport run_points(const ExperimentConfig& config, BerPoint (*point)(const ExperimentConfig&, std::size_t)) {
  validate(config);
  BerReport report;
  report.config = config;
  report.noise_algorithm = GaussianStream::kAlgorithm;
  for (std::size_t i = 0; i < config.snr_grid.size(); ++i) report.points.push_back(point(config, i));
  return report;
}

}  // namespace

LdpcChoice load_ldpc_choice(const std::filesystem::path& alist, std::size_t max_iters) {
  LdpcChoice choice;
  choice.alist = alist;
  choice.max_iters = max_iters;
  choice.code = std::make_shared<const LdpcCode>(derive_encoder(load_alist(alist)));
  return choice;
}

void validate(const ExperimentConfig& config) {
  if (config.snr_grid.empty()) throw std::invalid_argument("SNR grid is empty");
  if (config.n_bus == 0) throw std::invalid_argument("n_bus must be positive");
  if (config.scheme == Scheme::Proposed && config.n_bus < config.params.m_storage())
    throw std::invalid_argument("n_bus must be at least m_storage for the proposed scheme");
  if (const auto* l = ldpc_of(config.code)) {
    if (!l->code || !l->code->has_encoder()) throw std::invalid_argument("LDPC code not loaded");
    if (l->max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
  }
  const auto convention = config.snr_grid.front().convention;
  for (const auto& s : config.snr_grid)
    if (s.convention != convention) throw std::invalid_argument("SNR grid mixes conventions");
}

double BerPoint::converged_fraction() const noexcept {
  if (blocks == 0) return 1.0;
  return static_cast<double>(converged_blocks) / static_cast<double>(blocks);
}

BerReport run_proposed(const ExperimentConfig& config) {
  if (config.scheme != Scheme::Proposed) throw std::invalid_argument("run_proposed needs scheme=proposed");
  return run_points(config, &run_proposed_point);
}

BerReport run_conventional(const ExperimentConfig& config) {
  if (config.scheme != Scheme::Conventional)
    throw std::invalid_argument("run_conventional needs scheme=conventional");
  return run_points(config, &run_conventional_point);
}

BerReport run_ber(const ExperimentConfig& config) {
  return config.scheme == Scheme::Proposed ? run_proposed(config) : run_conventional(config);
}

double snr_at_ber(std::span<const double> snr_db, std::span<const double> ber, double target) {
  if (snr_db.size() != ber.size()) throw std::invalid_argument("curve lengths differ");
  if (!(target > 0.0)) throw std::invalid_argument("target BER must be positive");
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < ber.size(); ++i) {
    if (!(ber[i] > 0.0)) continue;
    if (prev && ber[*prev] >= target && ber[i] <= target) {
      const double y0 = std::log10(ber[*prev]), y1 = std::log10(ber[i]);
      const double x0 = snr_db[*prev], x1 = snr_db[i];
      if (y0 == y1) return x0;
      return x0 + (std::log10(target) - y0) * (x1 - x0) / (y1 - y0);
    }
    prev = i;
  }
  throw std::domain_error(fmt::format("target BER {:.3e} not bracketed by the curve", target));
}

double measure_snr_gap(const BerReport& reference, const BerReport& candidate, double target) {
  auto curve = [](const BerReport& r) {
    std::pair<std::vector<double>, std::vector<double>> c;
    for (const auto& p : r.points) {
      c.first.push_back(p.snr.value_db);
      c.second.push_back(p.ber);
    }
    return c;
  };
  if (reference.points.empty() || candidate.points.empty()) throw std::invalid_argument("empty report");
  if (reference.points.front().snr.convention != candidate.points.front().snr.convention)
    throw std::invalid_argument("reports use different SNR conventions");
  const auto a = curve(reference);
  const auto b = curve(candidate);
  return snr_at_ber(a.first, a.second, target) - snr_at_ber(b.first, b.second, target);
}

void write_ber_csv(std::ostream& out, std::span<const BerReport> reports) {
  out << kBerCsvHeader << '\n';
  for (const auto& report : reports)
    for (const auto& p : report.points)
      out << fmt::format("{:.3f},{},{},{},{:.6e},{:.6e},{:.6e},{},{},{:.6f}\n", p.snr.value_db,
                         to_string(p.scheme), p.bits_sent, p.bit_errors, p.ber, p.ci.lo, p.ci.hi, p.bu_errors,
                         p.padding_slots, p.converged_fraction());
}

std::vector<std::size_t> default_m_grid(std::size_t phi) {
  static constexpr std::size_t kBase[] = {1,  2,  3,  4,   6,   8,   12,  16,  24,   32,   48,  64,
                                          96, 128, 192, 256, 384, 512, 768, 1024, 1536, 2048, 3072};
  std::vector<std::size_t> grid;
  for (auto m : kBase)
    if (m <= 12 * phi) grid.push_back(m);
  if (grid.back() != 12 * phi) grid.push_back(12 * phi);
  return grid;
}

std::vector<UnloadSeries> run_unload_experiment(const UnloadConfig& config) {
  std::vector<UnloadSeries> out;
  for (std::size_t phi : config.phis) {
    if (phi == 0 || (phi & (phi - 1)) != 0) throw std::invalid_argument("phi must be a power of two");
    const auto k = static_cast<std::size_t>(std::countr_zero(phi));
    const auto grid = config.m_grid.empty() ? default_m_grid(phi) : config.m_grid;

    UnloadSeries s;
    s.phi = phi;
    s.analytic = unload_curve(phi, grid);
    s.empirical.label = "empirical_unload(phi=" + std::to_string(phi) + ")";
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const std::size_t m = grid[gi];
      const SchemeParams params = make_scheme_params(k + 1, k, m);
      RandomBuSource source(params.n_total(), derive_seed(config.seed, {kUnloadStream, phi, m}));
      std::uint64_t empty = 0;

      if (config.mode == SnapshotMode::Accumulation) {
        for (std::uint64_t t = 0; t < config.trials; ++t) {
          FallingStorage storage(params);
          storage.accumulate(source);
          empty += storage.column_empty(SlotIndex(1)) ? 1 : 0;
        }
      } else {
        FallingStorage storage(params);
        storage.accumulate(source);
        const std::uint64_t warmup = 50 + 20 * m;
        for (std::uint64_t r = 0; r < warmup; ++r) storage.inject_round(source);
        for (std::uint64_t t = 0; t < config.trials; ++t) {
          empty += storage.column_empty(SlotIndex(1)) ? 1 : 0;
          storage.inject_round(source);
        }
      }

      const double rho = unload_probability(phi, m);
      s.empirical.x.push_back(static_cast<double>(m));
      s.empirical.y.push_back(static_cast<double>(empty) / static_cast<double>(config.trials));
      s.empty_counts.push_back(empty);
      s.trials.push_back(config.trials);
      s.ci.push_back(binomial_ci(empty, config.trials));
      s.low_confidence.push_back(rho * static_cast<double>(config.trials) < static_cast<double>(config.min_events));
    }
    out.push_back(std::move(s));
  }
  return out;
}

RoundtripReport run_roundtrip(const SchemeParams& params, std::uint64_t n_bus, std::uint64_t seed,
                              const CodeChoice& code) {
  RandomBuSource inner(params.n_total(), derive_seed(seed, {kDataStream, 0}), n_bus);
  std::vector<BitUnit> transmitted;
  struct Recorder final : BuSource {
    BuSource& src;
    std::vector<BitUnit>& log;
    Recorder(BuSource& s, std::vector<BitUnit>& l) : src(s), log(l) {}
    std::optional<BitUnit> next() override {
      auto bu = src.next();
      if (bu) log.push_back(*bu);
      return bu;
    }
  } recorder(inner, transmitted);

  FallingStorage storage(params);
  storage.accumulate(recorder);
  std::vector<Frame> frames;
  while (storage.occupancy() > 0) frames.push_back(storage.inject_round(recorder));

  const auto* ldpc = ldpc_of(code);
  const std::size_t block_bits = ldpc ? ldpc->code->k_info() : params.cb_bits();
  const PackedStream packed = pack_frames_into_codewords(frames, block_bits);

  RoundtripReport r;
  Bits decoded;
  for (const auto& block : packed.blocks) {
    if (ldpc) {
      const SymbolBlock sym = bpsk_modulate(ldpc->code->encode(block), 1.0);
      const auto llr = soft_llr(sym.values, 0.5, 1.0);
      const auto result = sum_product_decode(*ldpc->code, llr, ldpc->max_iters);
      decoded.insert(decoded.end(), result.bits.begin(), result.bits.end());
      r.channel_symbols += sym.values.size();
    } else {
      const SymbolBlock sym = bpsk_modulate(rate1_passthrough(block), 1.0);
      const Bits bits = hard_decision(sym.values);
      decoded.insert(decoded.end(), bits.begin(), bits.end());
      r.channel_symbols += sym.values.size();
    }
  }
  const std::vector<BitUnit> recovered = receive_stream(decoded, params, packed.pad_bits);

  r.transmitted = transmitted.size();
  r.recovered = recovered.size();
  r.padding_slots = storage.padding_count();
  r.slots = frames.size() * params.phi();
  r.mean_residency_rounds = storage.mean_residency_rounds();

  std::map<BitUnit, std::int64_t> balance;
  for (const auto& bu : recovered) ++balance[bu];
  for (const auto& bu : transmitted) --balance[bu];
  auto zero_payload = [&](const BitUnit& bu) {
    return std::all_of(bu.bits().begin() + static_cast<std::ptrdiff_t>(params.k_ob()), bu.bits().end(),
                       [](std::uint8_t b) { return b == 0; });
  };
  r.phantoms_are_padding = true;
  for (const auto& [bu, count] : balance) {
    if (count > 0) {
      r.phantoms += static_cast<std::uint64_t>(count);
      r.phantoms_are_padding = r.phantoms_are_padding && zero_payload(bu);
    } else if (count < 0) {
      r.missing += static_cast<std::uint64_t>(-count);
    }
  }
  r.multiset_equal = r.missing == 0 && r.phantoms == r.padding_slots && r.phantoms_are_padding;

  // Order within each OB class, ignoring zero-payload units (phantoms and
  // their look-alikes).
  std::map<Bits, std::vector<const BitUnit*>> tx_class, rx_class;
  auto ob_of = [&](const BitUnit& bu) {
    return Bits(bu.bits().begin(), bu.bits().begin() + static_cast<std::ptrdiff_t>(params.k_ob()));
  };
  for (const auto& bu : transmitted)
    if (!zero_payload(bu)) tx_class[ob_of(bu)].push_back(&bu);
  for (const auto& bu : recovered)
    if (!zero_payload(bu)) rx_class[ob_of(bu)].push_back(&bu);
  r.class_order_preserved = tx_class.size() == rx_class.size();
  for (const auto& [ob, seq] : tx_class) {
    const auto it = rx_class.find(ob);
    if (it == rx_class.end() || it->second.size() != seq.size() ||
        !std::equal(seq.begin(), seq.end(), it->second.begin(),
                    [](const BitUnit* a, const BitUnit* b) { return *a == *b; })) {
      r.class_order_preserved = false;
      break;
    }
  }
  return r;
}

}  // namespace obsim
