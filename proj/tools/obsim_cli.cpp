// obsim: opportunistic-bit link simulator.
//
//   obsim ber        proposed + conventional BER sweep, CSV out
//   obsim unload     empty-column frequency vs ((phi-1)/phi)^M
//   obsim analytic   closed-form curves
//   obsim roundtrip  noiseless fidelity check
//
// Any flag can also be given in a key=value file passed with --config;
// command-line flags take precedence.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "obsim/analysis.hpp"
#include "obsim/harness.hpp"

namespace {

struct Options {
  std::size_t n_total = 36;
  std::size_t k_ob = 4;
  std::size_t m_storage = 256;
  double snr_start = 0.0;
  double snr_stop = 9.0;
  double snr_step = 1.0;
  std::string convention = "ebn0";
  std::string code = "rate1";
  std::string alist = OBSIM_DEFAULT_ALIST;
  std::size_t max_iters = 50;
  std::uint64_t seed = 1;
  std::uint64_t n_bus = 1000000;
  std::uint64_t min_errors = 100;
  std::string out;
  bool summary = false;
  bool paired_noise = false;
  std::vector<double> targets{1e-4};
  // unload
  std::vector<std::size_t> phis{8, 16, 32};
  std::uint64_t trials = 40000;
  std::string snapshot = "accumulation";
};

void add_scheme_flags(CLI::App* app, Options& o) {
  app->add_option("--n-total", o.n_total, "bits per BU")->capture_default_str();
  app->add_option("--k-ob", o.k_ob, "index-carried bits per BU")->capture_default_str();
  app->add_option("--m-storage", o.m_storage, "payloads accumulated before the first round")->capture_default_str();
  app->add_option("--seed", o.seed, "master seed")->capture_default_str();
  app->add_option("--out", o.out, "output file (default stdout)");
}

void add_code_flags(CLI::App* app, Options& o) {
  app->add_option("--code", o.code, "rate1 | ldpc")->check(CLI::IsMember({"rate1", "ldpc"}))->capture_default_str();
  app->add_option("--alist", o.alist, "parity-check matrix for --code ldpc")->capture_default_str();
  app->add_option("--max-iters", o.max_iters, "sum-product iteration cap")->capture_default_str();
}

std::vector<double> snr_grid(const Options& o) {
  if (!(o.snr_step > 0.0)) throw CLI::ValidationError("--snr-step", "must be positive");
  std::vector<double> grid;
  const auto count = static_cast<std::size_t>(std::floor((o.snr_stop - o.snr_start) / o.snr_step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) grid.push_back(o.snr_start + static_cast<double>(i) * o.snr_step);
  return grid;
}

obsim::CodeChoice code_choice(const Options& o) {
  if (o.code == "ldpc") return obsim::load_ldpc_choice(o.alist, o.max_iters);
  return obsim::Rate1Code{};
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_ber(const Options& o) {
  obsim::ExperimentConfig cfg;
  cfg.params = obsim::make_scheme_params(o.n_total, o.k_ob, o.m_storage);
  const auto convention = o.convention == "esn0" ? obsim::SnrConvention::EsN0 : obsim::SnrConvention::EbN0Info;
  for (double db : snr_grid(o)) cfg.snr_grid.push_back({db, convention});
  cfg.code = code_choice(o);
  cfg.n_bus = o.n_bus;
  cfg.master_seed = o.seed;
  cfg.min_errors = o.min_errors;
  cfg.paired_noise = o.paired_noise;

  std::vector<obsim::BerReport> reports;
  cfg.scheme = obsim::Scheme::Proposed;
  reports.push_back(obsim::run_ber(cfg));
  cfg.scheme = obsim::Scheme::Conventional;
  reports.push_back(obsim::run_ber(cfg));

  Output out(o.out);
  obsim::write_ber_csv(out.stream(), reports);
  if (o.summary) {
    for (double target : o.targets) {
      std::string gap;
      try {
        gap = fmt::format("{:.4f}", obsim::measure_snr_gap(reports[1], reports[0], target));
      } catch (const std::domain_error&) {
        gap = "not_bracketed";
      }
      out.stream() << fmt::format("# snr_gap convention={} target_ber={:.1e} gap_db={}\n", o.convention, target, gap);
    }
    out.stream() << fmt::format("# analytic_energy_gain_db={:.4f} noise={} llr_clamp={}\n",
                                obsim::snr_gain_db(o.n_total, o.k_ob), reports[0].noise_algorithm,
                                reports[0].llr_clamp);
  }
  return 0;
}

int cmd_unload(const Options& o) {
  obsim::UnloadConfig cfg;
  cfg.phis = o.phis;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.mode = o.snapshot == "steady" ? obsim::SnapshotMode::SteadyState : obsim::SnapshotMode::Accumulation;
  const auto series = obsim::run_unload_experiment(cfg);

  Output out(o.out);
  out.stream() << "phi,m,trials,empty,empirical,ci_lo,ci_hi,analytic,low_confidence\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.empirical.x.size(); ++i)
      out.stream() << fmt::format("{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{}\n", s.phi, s.empirical.x[i],
                                  s.trials[i], s.empty_counts[i], s.empirical.y[i], s.ci[i].lo, s.ci[i].hi,
                                  s.analytic.y[i], s.low_confidence[i] ? 1 : 0);
  return 0;
}

int cmd_analytic(const Options& o) {
  const auto params = obsim::make_scheme_params(o.n_total, o.k_ob, o.m_storage);
  const auto convention = o.convention == "esn0" ? obsim::SnrConvention::EsN0 : obsim::SnrConvention::EbN0Info;
  const auto grid = snr_grid(o);

  Output out(o.out);
  out.stream() << "curve,x,y\n";
  for (auto scheme : {obsim::Scheme::Proposed, obsim::Scheme::Conventional}) {
    const auto c = obsim::ber_curve(scheme, convention, params, grid);
    for (std::size_t i = 0; i < c.x.size(); ++i)
      out.stream() << fmt::format("ber_{}_{},{:.3f},{:.6e}\n", obsim::to_string(scheme), o.convention, c.x[i], c.y[i]);
  }
  for (auto phi : o.phis) {
    const auto m_grid = obsim::default_m_grid(phi);
    const auto c = obsim::unload_curve(phi, m_grid);
    for (std::size_t i = 0; i < c.x.size(); ++i)
      out.stream() << fmt::format("unload_phi{},{},{:.6e}\n", phi, c.x[i], c.y[i]);
  }
  const auto ds = obsim::delay_storage_report(params);
  out.stream() << fmt::format("spectral_gain,{},{:.6f}\n", o.k_ob, obsim::spectral_gain(o.n_total, o.k_ob));
  out.stream() << fmt::format("snr_gain_db,{},{:.6f}\n", o.k_ob, obsim::snr_gain_db(o.n_total, o.k_ob));
  out.stream() << fmt::format("storage_bits,{},{}\n", o.m_storage, ds.storage_bits);
  return 0;
}

int cmd_roundtrip(const Options& o) {
  const auto params = obsim::make_scheme_params(o.n_total, o.k_ob, o.m_storage);
  const auto r = obsim::run_roundtrip(params, o.n_bus, o.seed, code_choice(o));
  Output out(o.out);
  auto& s = out.stream();
  s << "transmitted," << r.transmitted << '\n'
    << "recovered," << r.recovered << '\n'
    << "padding_slots," << r.padding_slots << '\n'
    << "phantoms," << r.phantoms << '\n'
    << "missing," << r.missing << '\n'
    << "multiset_equal," << (r.multiset_equal ? 1 : 0) << '\n'
    << "class_order_preserved," << (r.class_order_preserved ? 1 : 0) << '\n'
    << "channel_symbols," << r.channel_symbols << '\n'
    << fmt::format("mean_residency_rounds,{:.4f}\n", r.mean_residency_rounds);
  return r.multiset_equal && r.class_order_preserved ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic-bit link-level simulator"};
  app.set_config("--config", "", "key=value file; keys mirror the long flag names");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;

  add_scheme_flags(&app, o);
  add_code_flags(&app, o);
  app.add_option("--snr-start", o.snr_start)->capture_default_str();
  app.add_option("--snr-stop", o.snr_stop)->capture_default_str();
  app.add_option("--snr-step", o.snr_step)->capture_default_str();
  app.add_option("--convention", o.convention, "ebn0 | esn0")
      ->check(CLI::IsMember({"ebn0", "esn0"}))
      ->capture_default_str();
  app.add_option("--n-bus", o.n_bus, "BU cap per SNR point (ber) or stream length (roundtrip)")
      ->capture_default_str();
  app.add_option("--min-errors", o.min_errors, "bit errors that end an SNR point")->capture_default_str();
  app.add_flag("--summary", o.summary, "append measured SNR gaps (ber)");
  app.add_option("--targets", o.targets, "BER targets for --summary")->capture_default_str();
  app.add_flag("--paired-noise", o.paired_noise, "reuse noise streams across schemes");
  app.add_option("--phi", o.phis, "slot counts, powers of two (unload, analytic)")->capture_default_str();
  app.add_option("--trials", o.trials, "snapshots per grid point (unload)")->capture_default_str();
  app.add_option("--snapshot", o.snapshot, "accumulation | steady (unload)")
      ->check(CLI::IsMember({"accumulation", "steady"}))
      ->capture_default_str();

  auto* ber = app.add_subcommand("ber", "BER sweep of the proposed and conventional schemes");
  auto* unload = app.add_subcommand("unload", "empty-column frequency experiment");
  auto* analytic = app.add_subcommand("analytic", "closed-form curves");
  auto* roundtrip = app.add_subcommand("roundtrip", "noiseless fidelity check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ber->parsed()) return cmd_ber(o);
    if (unload->parsed()) return cmd_unload(o);
    if (analytic->parsed()) return cmd_analytic(o);
    if (roundtrip->parsed()) return cmd_roundtrip(o);
  } catch (const std::exception& e) {
    std::cerr << "obsim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
