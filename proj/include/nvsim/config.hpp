#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "nvsim/photodynamics.hpp"
#include "nvsim/stress.hpp"

namespace nvsim {

struct SweepConfig {
  double start_G = 0.0;
  double stop_G = 800.0;
  int steps = 81;
  double freq_noise_ghz = 0.0;  // gaussian sigma added to exported branches
  double tau_rel_noise = 0.0;   // relative sigma on exported lifetimes
};

struct MwSweepConfig {
  double start_ghz = 2.5;
  double stop_ghz = 4.5;
  int points = 401;
};

struct PulsesConfig {
  int count = 40;
  std::string initial = "steady";  // steady | swapped | thermal | zero
  std::string swap_pair = "zero_plus";
  double p4_noise = 0.0;  // gaussian sigma on the exported p4 column
};

struct DecayConfig {
  double t_max_ns = 40.0;
  int points = 400;
  double peak_counts = 0.0;        // 0 = noiseless, unit amplitude
  std::string initial = "steady";  // steady | thermal
};

struct MapConfig {
  double x_start_um = 7.1;
  double x_stop_um = 8.0;
  int points = 601;
  double x0_um = 7.55;
  double width_um = 0.03;
  std::array<double, 6> baseline_gpa{};  // xx yy zz xy xz yz
  std::array<double, 6> delta_gpa{};
  double psf_fwhm_um = 0.55;
  std::string resonance_pair = "zero_plus";
};

struct FitConfig {
  int max_iterations = 500;
  double objective_tol = 1e-10;
  double step_tol = 1e-12;
  std::optional<std::array<double, 3>> fixed_tau_ns;       // fit decay
  std::optional<std::array<double, 3>> joint_initial;      // (D, E1, E2)
  std::optional<std::array<double, 4>> pulse_initial;      // rates + q0
  bool use_tau_constraint = true;  // pulse-dynamics soft penalty
};

// Fully resolved run configuration. Every run writes the resolved form next
// to its outputs so results are reproducible from the artifact alone.
struct RunConfig {
  std::optional<CouplingModel> gs_model;
  std::optional<CouplingModel> es_model;
  std::optional<HamiltonianCouplings> es_couplings;  // direct, overrides model
  double gs_d_ghz = 2.87;
  std::array<double, 6> stress_gpa{};
  std::string stress_frame = "nv";  // nv | lab

  double bz_G = 0.0;
  double gamma_e_mhz_per_g = kGyromagneticMHzPerG;

  PhotoRateParams photodynamics;
  double mw_rate_mhz = 5.0;
  double linewidth_mhz = 10.0;

  SweepConfig sweep;
  MwSweepConfig mw_sweep;
  PulsesConfig pulses;
  DecayConfig decay;
  MapConfig map;
  FitConfig fit;

  std::string output_dir = "out";
  std::uint64_t seed = 1;
  std::string preset_name;  // empty when fully explicit

  // Effective excited-state couplings: direct values if given, otherwise
  // couple(stress, es_model). Throws SchemaError when neither is available.
  HamiltonianCouplings effective_es_couplings() const;
  HamiltonianCouplings effective_gs_couplings() const;

  nlohmann::json resolved_json() const;
  std::string hash() const;  // FNV-1a of the resolved dump

  // Strict parse: unknown keys anywhere are a SchemaError.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load_file(const std::string& path);
  void apply_preset(const std::string& name);
};

std::uint64_t fnv1a64(std::string_view s);

// The machine-readable schema shipped with the tool (also used by the
// validator). Top-level sections and every key with its expected type.
const char* config_schema_json();

}  // namespace nvsim
