#pragma once

#include <array>
#include <optional>
#include <vector>

#include "nvsim/hamiltonian.hpp"
#include "nvsim/inference.hpp"
#include "nvsim/photodynamics.hpp"

namespace nvsim {

// ---------------------------------------------------------------------------
// Decay-curve fits

struct DecayFitResult {
  std::array<double, 3> populations{};  // normalized, sum 1
  std::array<double, 3> population_errors{};
  double amplitude = 0.0;
  double condition_number = 0.0;
  std::vector<std::string> flags;
};

// Linear least squares in the amplitudes A*P_j with fixed lifetimes, followed
// by normalization. Non-negativity is enforced exactly (active-set
// enumeration over the three amplitudes). Lifetimes equal to within 1e-9
// relative are collapsed to one column and their population split evenly
// (flag "tied_lifetimes"). Throws IllConditionedError when the design matrix
// condition number exceeds 1e8.
DecayFitResult fit_decay(const std::vector<double>& time_ns,
                         const std::vector<double>& counts,
                         const std::array<double, 3>& lifetimes_ns,
                         const std::vector<double>* sigma = nullptr);

struct ThermalLifetimeResult {
  double tau_bright_ns = 0.0;
  double tau_dark_ns = 0.0;
  double amplitude = 0.0;
  FitResult detail;
};

// Fit of I(t) = A/3 (exp(-t/tau_b) + 2 exp(-t/tau_d)) for a thermalized
// initial state (equal populations, dark lifetimes tied). Flags
// "degenerate_lifetimes" when tau_b and tau_d are not distinguishable.
ThermalLifetimeResult fit_thermal_lifetimes(
    const std::vector<double>& time_ns, const std::vector<double>& counts,
    const std::vector<double>* sigma = nullptr);

// ---------------------------------------------------------------------------
// Joint fit of ES transition frequencies and lifetimes vs axial field

struct JointEsData {
  // ODMR branch rows: one (bz, f) pair per row, two rows per field for the
  // two bright->dark transitions.
  std::vector<double> freq_bz_G;
  std::vector<double> freq_ghz;
  std::vector<double> freq_err_ghz;  // empty = unweighted

  // Lifetime rows: tau[0] is the bright state, tau[1], tau[2] the remaining
  // states in ascending energy order.
  std::vector<double> tau_bz_G;
  std::vector<std::array<double, 3>> tau_ns;
  std::vector<std::array<double, 3>> tau_err_ns;  // empty = unweighted
};

struct JointEsOptions {
  LifetimeModel rates;  // fixed during the fit (only the sums k_r + k_isc
                        // matter)
  double gamma_e_mhz_per_g = kGyromagneticMHzPerG;
  std::optional<std::array<double, 3>> initial;  // (D, E1, E2); default:
                                                 // data-driven candidates
};

struct JointEsResult {
  double d_ghz = 0.0, e1_ghz = 0.0, e2_ghz = 0.0;  // moduli
  double d_err = 0.0, e1_err = 0.0, e2_err = 0.0;
  FitResult detail;
};

// Model frequencies for one field point: the two |bright -> other| transition
// energies sorted ascending. Exposed for synthetic-data generation.
std::array<double, 2> es_branch_frequencies(const HamiltonianCouplings& c,
                                            double bz_G, double gamma_e);

// Lifetimes in label order (bright first, then ascending energy).
std::array<double, 3> es_labeled_lifetimes(const HamiltonianCouplings& c,
                                           double bz_G, double gamma_e,
                                           const LifetimeModel& lm);

JointEsResult fit_joint_es(const JointEsData& data,
                           const JointEsOptions& options);

// ---------------------------------------------------------------------------
// Multi-pulse polarization dynamics fit

struct PulseTrajectory {
  enum class Init { kSteadyState, kPiSwapped };
  std::vector<int> pulse_index;
  std::vector<double> p4;
  std::vector<double> p4_err;  // empty = unweighted
  Init init = Init::kSteadyState;
  GroundPair swap_pair = GroundPair::kZeroPlus;
  double bz_G = 0.0;  // trajectories may come from several field points
};

struct PulseDynOptions {
  // excited-state couplings, fixed during the fit (typically the joint-fit
  // output); the per-trajectory field sets the mixing
  HamiltonianCouplings es;
  double gamma_e_mhz_per_g = kGyromagneticMHzPerG;
  double eta = 0.9;
  double pulse_spacing_ns = 2000.0;
  double tau_singlet_ns = 250.0;
  // Optional soft consistency constraints k_r + k_isc0 = 1000/tau_bright and
  // k_r + k_isc1 = 1000/tau_dark, weighted by the propagated rate error.
  std::optional<std::array<double, 2>> tau_targets_ns;  // (bright, dark)
  std::optional<std::array<double, 2>> tau_target_errs_ns;
  std::optional<std::array<double, 4>> initial;  // (k_r, k_isc0, k_isc1, q0)
};

struct PulseDynResult {
  double k_r_mhz = 0.0, k_isc0_mhz = 0.0, k_isc1_mhz = 0.0, q0 = 0.0;
  std::array<double, 4> errors{};
  FitResult detail;
};

// Forward model used by the fit and by synthetic generation: p4 along a
// trajectory of `n` pulses starting from the model steady state (optionally
// pi-swapped).
std::vector<double> pulse_trajectory_model(const EigenSolution& sol,
                                           const PhotoRateParams& rates,
                                           PulseTrajectory::Init init,
                                           GroundPair swap_pair, int n);

PulseDynResult fit_pulse_dynamics(const std::vector<PulseTrajectory>& data,
                                  const PulseDynOptions& options);

}  // namespace nvsim
