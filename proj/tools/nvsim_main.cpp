// Command-line front end: deterministic simulations and fits with CSV/JSON
// output. See README.md for the column contracts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "nvsim/config.hpp"
#include "nvsim/csv.hpp"
#include "nvsim/errors.hpp"
#include "nvsim/fits.hpp"
#include "nvsim/mapping.hpp"
#include "nvsim/photodynamics.hpp"
#include "nvsim/presets.hpp"
#include "nvsim/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nvsim;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::int64_t seed = -1;
  double bz = std::numeric_limits<double>::quiet_NaN();
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--site-preset", args.preset,
                  "parameter preset: I, IV or ambient");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "RNG seed (overrides config)");
  cmd->add_option("--bz", args.bz, "axial field in gauss (overrides config)");
}

RunConfig make_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = RunConfig::load_file(args.config_path);
  if (!args.preset.empty()) cfg.apply_preset(args.preset);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (!std::isnan(args.bz)) cfg.bz_G = args.bz;
  if (cfg.es_couplings == std::nullopt && cfg.es_model == std::nullopt &&
      cfg.preset_name.empty()) {
    throw SchemaError(
        "no excited-state couplings: give --site-preset, es_couplings or "
        "coupling_model.es");
  }
  return cfg;
}

std::string csv_header(const RunConfig& cfg) {
  return std::string("nvsim ") + kVersion + " config=" + cfg.hash();
}

fs::path prepare_outdir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  std::ofstream resolved(dir / "resolved_config.json");
  if (!resolved) throw IoError("cannot write resolved config");
  resolved << cfg.resolved_json().dump(2) << "\n";
  return dir;
}

GroundPair parse_pair(const std::string& name) {
  if (name == "zero_plus") return GroundPair::kZeroPlus;
  if (name == "zero_minus") return GroundPair::kZeroMinus;
  if (name == "plus_minus") return GroundPair::kPlusMinus;
  throw SchemaError("unknown resonance pair '" + name + "'");
}

struct Solutions {
  EigenSolution gs;
  EigenSolution es;
};

Solutions solve_at(const RunConfig& cfg, double bz) {
  Solutions s;
  s.gs = eigensolve(
      build(cfg.effective_gs_couplings(), bz, cfg.gamma_e_mhz_per_g));
  s.es = eigensolve(
      build(cfg.effective_es_couplings(), bz, cfg.gamma_e_mhz_per_g));
  return s;
}

// state labels: |4> is the bright state, |5>, |6> the rest in ascending energy
std::array<int, 3> label_order(const EigenSolution& sol) {
  const auto dark = sol.dark_indices();
  return {sol.bright_index(), dark[0], dark[1]};
}

int cmd_simulate_odmr(const RunConfig& cfg) {
  const fs::path dir = prepare_outdir(cfg);
  const Solutions sol = solve_at(cfg, cfg.bz_G);
  const OdmrSpectrum spec = odmr_spectrum(
      sol.gs, sol.es, cfg.photodynamics, cfg.mw_rate_mhz, cfg.mw_sweep.start_ghz,
      cfg.mw_sweep.stop_ghz, cfg.mw_sweep.points, cfg.linewidth_mhz);
  std::vector<std::vector<double>> rows;
  rows.reserve(spec.f_ghz.size());
  for (size_t i = 0; i < spec.f_ghz.size(); ++i)
    rows.push_back({spec.f_ghz[i], spec.contrast[i]});
  write_csv((dir / "odmr.csv").string(), csv_header(cfg),
            {"f_ghz", "contrast"}, rows);
  std::cout << "wrote " << (dir / "odmr.csv").string() << "\n";
  return 0;
}

int cmd_simulate_decay(const RunConfig& cfg) {
  const fs::path dir = prepare_outdir(cfg);
  const Solutions sol = solve_at(cfg, cfg.bz_G);

  std::array<double, 3> populations{};
  if (cfg.decay.initial == "thermal") {
    populations = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  } else {
    const SteadyStateResult ss = steady_state(sol.es, cfg.photodynamics);
    populations = ss.post_pulse_excited;
  }
  const auto tau =
      effective_lifetimes_ns(sol.es, cfg.photodynamics.lifetime_model());

  std::vector<double> grid;
  grid.reserve(cfg.decay.points);
  for (int i = 0; i < cfg.decay.points; ++i)
    grid.push_back(cfg.decay.t_max_ns * i / (cfg.decay.points - 1));
  const DecayCurve curve = decay_curve(populations, tau, grid);

  std::vector<double> counts = curve.intensity;
  if (cfg.decay.peak_counts > 0) {
    std::mt19937_64 rng(cfg.seed);
    counts = poisson_counts(curve, cfg.decay.peak_counts, rng);
  }
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < grid.size(); ++i)
    rows.push_back({grid[i], counts[i]});
  write_csv((dir / "decay.csv").string(), csv_header(cfg), {"t_ns", "counts"},
            rows);
  std::cout << "wrote " << (dir / "decay.csv").string() << "\n";
  return 0;
}

int cmd_simulate_pulses(const RunConfig& cfg) {
  const fs::path dir = prepare_outdir(cfg);
  const Solutions sol = solve_at(cfg, cfg.bz_G);
  const auto& rates = cfg.photodynamics;

  PopulationState state;
  if (cfg.pulses.initial == "thermal") {
    state = PopulationState::thermal_ground();
  } else if (cfg.pulses.initial == "zero") {
    state = PopulationState::ground_state(1.0, 0.0, 0.0);
  } else {
    state = steady_state(sol.es, rates).ground;
    if (cfg.pulses.initial == "swapped") {
      const GroundPair pair = parse_pair(cfg.pulses.swap_pair);
      int a = 1, b = 0;
      if (pair == GroundPair::kZeroMinus) b = 2;
      if (pair == GroundPair::kPlusMinus) a = 0, b = 2;
      std::swap(state.ground[a], state.ground[b]);
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const Eigen::Matrix3d w = sol.es.overlap_matrix();
  const int bright = sol.es.bright_index();

  std::vector<std::vector<double>> rows;
  for (int n = 0; n <= cfg.pulses.count; ++n) {
    const Eigen::Vector3d pg(state.ground[0], state.ground[1],
                             state.ground[2]);
    double p4 = (w * pg)[bright];
    if (cfg.pulses.p4_noise > 0) p4 += cfg.pulses.p4_noise * noise(rng);
    rows.push_back({static_cast<double>(n), state.ground_zero(),
                    state.ground_plus(), state.ground_minus(), p4});
    if (n < cfg.pulses.count) state = pulse_step(state, sol.es, rates);
  }
  write_csv((dir / "pulses.csv").string(), csv_header(cfg),
            {"pulse_index", "p0", "p_plus", "p_minus", "p4"}, rows);
  std::cout << "wrote " << (dir / "pulses.csv").string() << "\n";
  return 0;
}

int cmd_simulate_sweep(const RunConfig& cfg) {
  const fs::path dir = prepare_outdir(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<std::vector<double>> eigen_rows, freq_rows, tau_rows;
  for (int i = 0; i < cfg.sweep.steps; ++i) {
    const double bz = cfg.sweep.start_G +
                      (cfg.sweep.stop_G - cfg.sweep.start_G) * i /
                          (cfg.sweep.steps - 1);
    const EigenSolution es = eigensolve(
        build(cfg.effective_es_couplings(), bz, cfg.gamma_e_mhz_per_g));
    const auto tau =
        effective_lifetimes_ns(es, cfg.photodynamics.lifetime_model());
    const auto order = label_order(es);

    eigen_rows.push_back({bz,
                          es.energies_ghz[order[0]], es.energies_ghz[order[1]],
                          es.energies_ghz[order[2]], es.mixing[order[0]],
                          es.mixing[order[1]], es.mixing[order[2]],
                          tau[order[0]], tau[order[1]], tau[order[2]]});

    const double fsig = cfg.sweep.freq_noise_ghz;
    for (int k = 1; k <= 2; ++k) {
      double f = std::abs(es.energies_ghz[order[k]] - es.energies_ghz[order[0]]);
      if (fsig > 0) f += fsig * noise(rng);
      freq_rows.push_back({bz, f, fsig});
    }

    std::vector<double> row{bz};
    for (int k = 0; k < 3; ++k) {
      double t = tau[order[k]];
      const double tsig = cfg.sweep.tau_rel_noise * t;
      if (tsig > 0) t += tsig * noise(rng);
      row.push_back(t);
    }
    for (int k = 0; k < 3; ++k)
      row.push_back(cfg.sweep.tau_rel_noise * tau[order[k]]);
    tau_rows.push_back(row);
  }

  write_csv((dir / "eigen_sweep.csv").string(), csv_header(cfg),
            {"bz_G", "e4_ghz", "e5_ghz", "e6_ghz", "m4", "m5", "m6", "tau4_ns",
             "tau5_ns", "tau6_ns"},
            eigen_rows);
  write_csv((dir / "es_freqs.csv").string(), csv_header(cfg),
            {"bz_G", "f_ghz", "f_err_ghz"}, freq_rows);
  write_csv((dir / "lifetimes.csv").string(), csv_header(cfg),
            {"bz_G", "tau4_ns", "tau5_ns", "tau6_ns", "tau4_err_ns",
             "tau5_err_ns", "tau6_err_ns"},
            tau_rows);
  std::cout << "wrote " << (dir / "eigen_sweep.csv").string() << " and friends\n";
  return 0;
}

int cmd_simulate_map(const RunConfig& cfg) {
  if (!cfg.es_model)
    throw SchemaError(
        "simulate map needs coupling_model.es (stress -> coupling map)");
  const fs::path dir = prepare_outdir(cfg);
  const auto& m = cfg.map;
  const StressTensor baseline{m.baseline_gpa[0], m.baseline_gpa[1],
                              m.baseline_gpa[2], m.baseline_gpa[3],
                              m.baseline_gpa[4], m.baseline_gpa[5]};
  const StressTensor delta{m.delta_gpa[0], m.delta_gpa[1], m.delta_gpa[2],
                           m.delta_gpa[3], m.delta_gpa[4], m.delta_gpa[5]};
  const StrainProfile profile = StrainProfile::logistic_ramp(
      m.x_start_um, m.x_stop_um, m.points, m.x0_um, m.width_um, baseline,
      delta);
  const CouplingProfile couplings = profile_couplings(profile, *cfg.es_model);
  const ContrastProfile contrast = profile_contrast(
      profile, *cfg.es_model, cfg.photodynamics, cfg.bz_G, cfg.mw_rate_mhz,
      parse_pair(m.resonance_pair), m.psf_fwhm_um);

  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < profile.x_um.size(); ++i) {
    rows.push_back({profile.x_um[i], couplings.d_ghz[i],
                    couplings.e1_abs_ghz[i], couplings.e2_abs_ghz[i],
                    contrast.raw[i], contrast.convolved[i]});
  }
  write_csv((dir / "map.csv").string(), csv_header(cfg),
            {"x_um", "d_ghz", "e1_ghz", "e2_ghz", "contrast_raw",
             "contrast_psf"},
            rows);
  std::cout << "wrote " << (dir / "map.csv").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

json fit_report_base(const RunConfig& cfg, const std::string& command,
                     const FitResult& fr) {
  json j;
  j["tool"] = "nvsim";
  j["version"] = kVersion;
  j["command"] = command;
  j["config_hash"] = cfg.hash();
  j["converged"] = fr.converged;
  j["iterations"] = fr.iterations;
  j["residual_norm"] = fr.residual_norm;
  j["flags"] = fr.flags;
  j["config"] = cfg.resolved_json();
  return j;
}

void write_report(const RunConfig& cfg, const json& report) {
  const fs::path dir = prepare_outdir(cfg);
  std::ofstream out(dir / "fit_report.json");
  if (!out) throw IoError("cannot write fit report");
  out << report.dump(2) << "\n";
  std::cout << "wrote " << (dir / "fit_report.json").string() << "\n";
}

int cmd_fit_decay(const RunConfig& cfg, const std::string& data_path) {
  const CsvTable table = read_csv(data_path);
  require_columns(table, {"t_ns", "counts"});
  const auto t = table.column("t_ns");
  const auto counts = table.column("counts");

  std::array<double, 3> tau{};
  if (cfg.fit.fixed_tau_ns) {
    tau = *cfg.fit.fixed_tau_ns;
  } else if (!cfg.preset_name.empty()) {
    const SitePreset& p = site_preset(cfg.preset_name);
    tau = {p.tau_bright_ns, p.tau_dark_ns, p.tau_dark_ns};
  } else {
    throw SchemaError("fit decay needs fit.fixed_tau_ns or a preset");
  }

  const DecayFitResult r = fit_decay(t, counts, tau);
  json report;
  report["tool"] = "nvsim";
  report["version"] = kVersion;
  report["command"] = "fit decay";
  report["config_hash"] = cfg.hash();
  report["condition_number"] = r.condition_number;
  report["flags"] = r.flags;
  report["parameters"] = {
      {"p4", {{"value", r.populations[0]}, {"std_error", r.population_errors[0]}}},
      {"p5", {{"value", r.populations[1]}, {"std_error", r.population_errors[1]}}},
      {"p6", {{"value", r.populations[2]}, {"std_error", r.population_errors[2]}}},
      {"amplitude", {{"value", r.amplitude}}}};
  report["data"] = {{"rows", table.row_count()}, {"path", data_path}};
  report["config"] = cfg.resolved_json();
  write_report(cfg, report);
  return 0;
}

int cmd_fit_thermal(const RunConfig& cfg, const std::string& data_path) {
  const CsvTable table = read_csv(data_path);
  require_columns(table, {"t_ns", "counts"});
  const ThermalLifetimeResult r =
      fit_thermal_lifetimes(table.column("t_ns"), table.column("counts"));
  json report = fit_report_base(cfg, "fit thermal", r.detail);
  report["parameters"] = {
      {"tau_bright_ns",
       {{"value", r.tau_bright_ns}, {"std_error", r.detail.std_errors[1]}}},
      {"tau_dark_ns",
       {{"value", r.tau_dark_ns}, {"std_error", r.detail.std_errors[2]}}},
      {"amplitude", {{"value", r.amplitude}}}};
  report["data"] = {{"rows", table.row_count()}, {"path", data_path}};
  if (!r.detail.converged) {
    write_report(cfg, report);
    throw NumericalError("fit thermal did not converge");
  }
  write_report(cfg, report);
  return 0;
}

int cmd_fit_joint(const RunConfig& cfg, const std::string& odmr_path,
                  const std::string& tau_path) {
  const CsvTable odmr = read_csv(odmr_path);
  require_columns(odmr, {"bz_G", "f_ghz", "f_err_ghz"});
  const CsvTable taus = read_csv(tau_path);
  require_columns(taus, {"bz_G", "tau4_ns", "tau5_ns", "tau6_ns",
                         "tau4_err_ns", "tau5_err_ns", "tau6_err_ns"});

  JointEsData data;
  data.freq_bz_G = odmr.column("bz_G");
  data.freq_ghz = odmr.column("f_ghz");
  data.freq_err_ghz = odmr.column("f_err_ghz");
  const bool f_weighted =
      std::any_of(data.freq_err_ghz.begin(), data.freq_err_ghz.end(),
                  [](double v) { return v > 0; });
  if (!f_weighted) data.freq_err_ghz.clear();

  data.tau_bz_G = taus.column("bz_G");
  const auto t4 = taus.column("tau4_ns"), t5 = taus.column("tau5_ns"),
             t6 = taus.column("tau6_ns");
  const auto e4 = taus.column("tau4_err_ns"), e5 = taus.column("tau5_err_ns"),
             e6 = taus.column("tau6_err_ns");
  bool t_weighted = false;
  for (size_t i = 0; i < t4.size(); ++i) {
    data.tau_ns.push_back({t4[i], t5[i], t6[i]});
    data.tau_err_ns.push_back({e4[i], e5[i], e6[i]});
    t_weighted = t_weighted || e4[i] > 0 || e5[i] > 0 || e6[i] > 0;
  }
  if (!t_weighted) data.tau_err_ns.clear();

  JointEsOptions options;
  options.rates = cfg.photodynamics.lifetime_model();
  options.gamma_e_mhz_per_g = cfg.gamma_e_mhz_per_g;
  if (cfg.fit.joint_initial) options.initial = cfg.fit.joint_initial;

  const JointEsResult r = fit_joint_es(data, options);
  json report = fit_report_base(cfg, "fit joint-es", r.detail);
  report["parameters"] = {
      {"d_ghz", {{"value", r.d_ghz}, {"std_error", r.d_err}}},
      {"e1_ghz", {{"value", r.e1_ghz}, {"std_error", r.e1_err}}},
      {"e2_ghz", {{"value", r.e2_ghz}, {"std_error", r.e2_err}}}};
  report["data"] = {{"odmr_rows", odmr.row_count()},
                    {"lifetime_rows", taus.row_count()}};
  if (!r.detail.converged) {
    write_report(cfg, report);
    throw NumericalError("fit joint-es did not converge");
  }
  write_report(cfg, report);
  return 0;
}

int cmd_fit_pulses(const RunConfig& cfg,
                   const std::vector<std::string>& data_paths,
                   const std::vector<std::string>& inits) {
  if (data_paths.size() < 2)
    throw SchemaError("fit pulse-dynamics needs at least two --data files");

  std::vector<PulseTrajectory> trajectories;
  for (size_t i = 0; i < data_paths.size(); ++i) {
    const CsvTable table = read_csv(data_paths[i]);
    table.require_column("pulse_index");
    table.require_column("p4");
    PulseTrajectory tr;
    for (double v : table.column("pulse_index"))
      tr.pulse_index.push_back(static_cast<int>(v));
    tr.p4 = table.column("p4");
    if (table.column_index("p4_err") >= 0) {
      tr.p4_err = table.column("p4_err");
      if (std::all_of(tr.p4_err.begin(), tr.p4_err.end(),
                      [](double v) { return v <= 0; }))
        tr.p4_err.clear();
    }
    std::string kind = i < inits.size() ? inits[i]
                       : (i == 0 ? "steady" : "swapped");
    if (kind == "steady")
      tr.init = PulseTrajectory::Init::kSteadyState;
    else if (kind == "swapped")
      tr.init = PulseTrajectory::Init::kPiSwapped;
    else
      throw SchemaError("unknown trajectory init '" + kind + "'");
    tr.swap_pair = parse_pair(cfg.pulses.swap_pair);
    trajectories.push_back(std::move(tr));
  }

  PulseDynOptions options;
  options.sol = eigensolve(
      build(cfg.effective_es_couplings(), cfg.bz_G, cfg.gamma_e_mhz_per_g));
  options.eta = cfg.photodynamics.eta;
  options.pulse_spacing_ns = cfg.photodynamics.pulse_spacing_ns;
  options.tau_singlet_ns = cfg.photodynamics.tau_singlet_ns;
  if (cfg.fit.pulse_initial) options.initial = cfg.fit.pulse_initial;
  if (cfg.fit.use_tau_constraint && !cfg.preset_name.empty()) {
    const SitePreset& p = site_preset(cfg.preset_name);
    options.tau_targets_ns = {{p.tau_bright_ns, p.tau_dark_ns}};
    options.tau_target_errs_ns = {
        {p.tau_bright_err > 0 ? p.tau_bright_err : 0.05,
         p.tau_dark_err > 0 ? p.tau_dark_err : 0.05}};
  }

  const PulseDynResult r = fit_pulse_dynamics(trajectories, options);
  json report = fit_report_base(cfg, "fit pulse-dynamics", r.detail);
  report["parameters"] = {
      {"k_r_mhz", {{"value", r.k_r_mhz}, {"std_error", r.errors[0]}}},
      {"k_isc0_mhz", {{"value", r.k_isc0_mhz}, {"std_error", r.errors[1]}}},
      {"k_isc1_mhz", {{"value", r.k_isc1_mhz}, {"std_error", r.errors[2]}}},
      {"q0", {{"value", r.q0}, {"std_error", r.errors[3]}}}};
  report["data"] = {{"trajectories", trajectories.size()}};
  if (!r.detail.converged) {
    write_report(cfg, report);
    throw NumericalError("fit pulse-dynamics did not converge");
  }
  write_report(cfg, report);
  return 0;
}

int cmd_presets() {
  std::cout << "built-in parameter presets\n";
  for (const auto& p : all_presets()) {
    std::cout << "\n[" << p.name << "]\n";
    std::cout << "  ground-state splitting      gs_d_ghz  = " << p.gs_d_ghz
              << "\n";
    std::cout << "  excited-state couplings (joint ODMR-lifetime fit):\n";
    std::cout << "    |D|  = " << p.es_d_ghz << " +- " << p.es_d_err
              << " GHz\n";
    std::cout << "    |E1| = " << p.es_e1_ghz << " +- " << p.es_e1_err
              << " GHz\n";
    std::cout << "    |E2| = " << p.es_e2_ghz << " +- " << p.es_e2_err
              << " GHz\n";
    std::cout << "  lifetimes (thermal decay measurement, high field):\n";
    std::cout << "    tau_bright = " << p.tau_bright_ns << " +- "
              << p.tau_bright_err << " ns\n";
    std::cout << "    tau_dark   = " << p.tau_dark_ns << " +- "
              << p.tau_dark_err << " ns\n";
    std::cout << "  optical cycle (multi-pulse polarization fit):\n";
    std::cout << "    k_r     = " << p.k_r_mhz << " +- " << p.k_r_err
              << " MHz\n";
    std::cout << "    k_isc0  = " << p.k_isc0_mhz << " +- " << p.k_isc0_err
              << " MHz\n";
    std::cout << "    k_isc1  = " << p.k_isc1_mhz << " +- " << p.k_isc1_err
              << " MHz\n";
    std::cout << "    q0      = " << p.q0 << " +- " << p.q0_err << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strain-coupled spin-1 emitter simulation and fitting"};
  app.require_subcommand(1);

  auto* presets_cmd = app.add_subcommand("presets", "list built-in presets");
  auto* schema_cmd =
      app.add_subcommand("config-schema", "print the config schema");

  auto* sim = app.add_subcommand("simulate", "forward simulations");
  sim->require_subcommand(1);
  CommonArgs sim_args;
  int pulses_override = -1;
  auto* sim_odmr = sim->add_subcommand("odmr", "ODMR spectrum");
  auto* sim_decay = sim->add_subcommand("decay", "fluorescence decay curve");
  auto* sim_pulses = sim->add_subcommand("pulses", "multi-pulse trajectory");
  auto* sim_sweep = sim->add_subcommand("sweep-bz", "field sweep");
  auto* sim_map = sim->add_subcommand("map", "spatial strain profile");
  for (auto* cmd : {sim_odmr, sim_decay, sim_pulses, sim_sweep, sim_map})
    add_common(cmd, sim_args);
  sim_pulses->add_option("--pulses", pulses_override, "number of pulses");

  auto* fit = app.add_subcommand("fit", "parameter extraction");
  fit->require_subcommand(1);
  CommonArgs fit_args;
  std::vector<std::string> data_paths, inits;
  std::string odmr_path, tau_path;
  auto* fit_decay_cmd = fit->add_subcommand("decay", "populations from decay");
  fit_decay_cmd->add_option("--data", data_paths, "decay CSV (t_ns, counts)")
      ->required();
  auto* fit_thermal_cmd =
      fit->add_subcommand("thermal", "lifetimes from a thermalized decay");
  fit_thermal_cmd->add_option("--data", data_paths, "decay CSV")->required();
  auto* fit_joint_cmd =
      fit->add_subcommand("joint-es", "couplings from ODMR + lifetimes");
  fit_joint_cmd->add_option("--odmr", odmr_path, "branch CSV")->required();
  fit_joint_cmd->add_option("--lifetimes", tau_path, "lifetime CSV")
      ->required();
  auto* fit_pulses_cmd =
      fit->add_subcommand("pulse-dynamics", "rates from pulse trajectories");
  fit_pulses_cmd->add_option("--data", data_paths, "trajectory CSVs")
      ->required();
  fit_pulses_cmd->add_option("--inits", inits,
                             "per-file initial state: steady|swapped");
  for (auto* cmd :
       {fit_decay_cmd, fit_thermal_cmd, fit_joint_cmd, fit_pulses_cmd})
    add_common(cmd, fit_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets_cmd->parsed()) return cmd_presets();
    if (schema_cmd->parsed()) {
      std::cout << config_schema_json() << "\n";
      return 0;
    }
    if (sim->parsed()) {
      RunConfig cfg = make_config(sim_args);
      if (sim_pulses->parsed() && pulses_override >= 0)
        cfg.pulses.count = pulses_override;
      if (sim_odmr->parsed()) return cmd_simulate_odmr(cfg);
      if (sim_decay->parsed()) return cmd_simulate_decay(cfg);
      if (sim_pulses->parsed()) return cmd_simulate_pulses(cfg);
      if (sim_sweep->parsed()) return cmd_simulate_sweep(cfg);
      if (sim_map->parsed()) return cmd_simulate_map(cfg);
    }
    if (fit->parsed()) {
      RunConfig cfg = make_config(fit_args);
      if (fit_decay_cmd->parsed()) return cmd_fit_decay(cfg, data_paths.at(0));
      if (fit_thermal_cmd->parsed())
        return cmd_fit_thermal(cfg, data_paths.at(0));
      if (fit_joint_cmd->parsed())
        return cmd_fit_joint(cfg, odmr_path, tau_path);
      if (fit_pulses_cmd->parsed())
        return cmd_fit_pulses(cfg, data_paths, inits);
    }
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateDynamicsError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const NoReversalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const IllConditionedError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
