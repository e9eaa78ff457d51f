#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>
#include <Eigen/Dense>

#include "nvsim/hamiltonian.hpp"

namespace nvsim {

// Parameters of the seven-level optical cycle: ground triplet, excited
// triplet, metastable singlet.
struct PhotoRateParams {
  double eta = 0.9;             // per-pulse excitation probability
  double k_r_mhz = 0.0;         // spontaneous emission rate
  double k_isc0_mhz = 0.0;      // up-ISC from pure |0> excited state
  double k_isc1_mhz = 0.0;      // up-ISC from pure |+-1> excited states
  double q0 = 0.5;              // singlet -> |0> branching; (1-q0)/2 to each |+-1>
  double tau_singlet_ns = 250.0;
  double pulse_spacing_ns = 2000.0;

  LifetimeModel lifetime_model() const {
    return {k_r_mhz, k_isc0_mhz, k_isc1_mhz};
  }
  // Throws std::invalid_argument when out of range.
  void validate() const;
};

// Populations of the seven levels. Ground entries follow the spin basis
// (+1, 0, -1); excited entries follow the EigenSolution state order.
struct PopulationState {
  std::array<double, 3> ground{};   // (+1, 0, -1)
  std::array<double, 3> excited{};  // eigenstate order
  double singlet = 0.0;

  double ground_plus() const { return ground[0]; }
  double ground_zero() const { return ground[1]; }
  double ground_minus() const { return ground[2]; }

  double total() const;
  bool ground_manifold_only(double tol = 1e-12) const;

  static PopulationState ground_state(double p_zero, double p_plus,
                                      double p_minus);
  static PopulationState thermal_ground() {
    return ground_state(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  }
};

// Instantaneous spin-conserving excitation: with probability eta each ground
// population is promoted, distributed over excited eigenstates by
// |<g|psi_j>|^2. Throws std::invalid_argument unless the input is a pure
// ground-manifold state.
PopulationState excite_pulse(const PopulationState& ground,
                             const EigenSolution& sol, double eta);

// Propagates the rate equations to completion: every excited eigenstate
// decays radiatively (spin-conserving projection back to the ground basis)
// or via ISC into the singlet, and the singlet empties as q0 -> |0>,
// (1-q0)/2 -> each |+-1>. The returned state is ground-manifold only.
PopulationState relax(const PopulationState& state, const EigenSolution& sol,
                      const PhotoRateParams& rates);

// relax(excite_pulse(.)): one full pulse cycle on the ground manifold.
PopulationState pulse_step(const PopulationState& ground,
                           const EigenSolution& sol,
                           const PhotoRateParams& rates);

// The 3x3 column-stochastic matrix representing pulse_step on the ground
// populations (basis order +1, 0, -1).
Eigen::Matrix3d pulse_map_matrix(const EigenSolution& sol,
                                 const PhotoRateParams& rates);

struct SteadyStateResult {
  PopulationState ground;    // fixed point of the pulse map
  double post_pulse_p4 = 0;  // bright-state share of the excited manifold
                             // right after a pulse from the fixed point
  std::array<double, 3> post_pulse_excited{};  // eigenstate order, sums to 1
};

// Fixed point of the pulse map. Requires eta > 0; throws
// DegenerateDynamicsError when the stationary distribution is not unique.
SteadyStateResult steady_state(const EigenSolution& sol,
                               const PhotoRateParams& rates);

struct DecayCurve {
  std::vector<double> time_ns;
  std::vector<double> intensity;
  std::array<double, 3> populations{};
  std::array<double, 3> lifetimes_ns{};
};

// I(t) = A sum_j P_j exp(-t / tau_j). P must sum to 1 and all tau_j > 0.
DecayCurve decay_curve(const std::array<double, 3>& populations,
                       const std::array<double, 3>& lifetimes_ns,
                       const std::vector<double>& time_grid_ns,
                       double amplitude = 1.0);

// Scales the curve so its t=0 value equals peak_counts and replaces every
// sample with a Poisson draw. Used for synthetic data generation.
std::vector<double> poisson_counts(const DecayCurve& curve, double peak_counts,
                                   std::mt19937_64& rng);

// Microwave-driven ground pair, named by the dominant spin character of the
// two states being exchanged.
enum class GroundPair { kZeroPlus, kZeroMinus, kPlusMinus };

// Continuous-wave ODMR contrast (I_on - I_off)/I_off from the steady state of
// the full 7-level rate equations. The optical pumping rate is
// eta / pulse_spacing; the microwave drive is an incoherent exchange at
// mw_rate between the two ground states of `pair`. Polarization into |0>
// gives negative contrast.
double cw_contrast(const EigenSolution& sol_es, const PhotoRateParams& rates,
                   double mw_rate_mhz, GroundPair pair);

// Same, with the pair given as eigenstate indices of the ground-state
// solution; each index is mapped to its dominant spin component.
double cw_contrast(const EigenSolution& sol_gs, const EigenSolution& sol_es,
                   const PhotoRateParams& rates, double mw_rate_mhz,
                   int gs_state_a, int gs_state_b);

struct OdmrSpectrum {
  std::vector<double> f_ghz;
  std::vector<double> contrast;
};

// Lorentzian lines at the ground-state transition frequencies with
// amplitudes from cw_contrast. linewidth is the FWHM in MHz.
OdmrSpectrum odmr_spectrum(const EigenSolution& sol_gs,
                           const EigenSolution& sol_es,
                           const PhotoRateParams& rates, double mw_rate_mhz,
                           double f_start_ghz, double f_stop_ghz, int points,
                           double linewidth_mhz);

}  // namespace nvsim
