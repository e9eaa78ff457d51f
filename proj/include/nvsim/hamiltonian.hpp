#pragma once

#include <array>
#include <Eigen/Dense>

#include "nvsim/stress.hpp"

namespace nvsim {

inline constexpr double kGyromagneticMHzPerG = 2.8025;

// Spin-1 Hamiltonian in the basis (|+1>, |0>, |-1>), energies in GHz:
//
//       [ D + gB    E1      E2    ]
//   H = [ E1*       0      -E1    ]
//       [ E2*      -E1*   D - gB  ]
//
// with gB = gamma_e * Bz converted from MHz to GHz. Hermitian by
// construction; trace is exactly 2D.
struct SpinHamiltonian {
  HamiltonianCouplings couplings;
  double bz_gauss = 0.0;
  double gamma_e_mhz_per_g = kGyromagneticMHzPerG;

  Eigen::Matrix3cd matrix() const;
};

SpinHamiltonian build(const HamiltonianCouplings& couplings, double bz_gauss,
                      double gamma_e_mhz_per_g = kGyromagneticMHzPerG);

// Eigen-solution of the spin Hamiltonian. States are sorted by ascending
// energy; exact degeneracies are ordered by descending mixing fraction so the
// |0>-like state gets a stable position. mixing[j] = |<0|psi_j>|^2.
struct EigenSolution {
  std::array<double, 3> energies_ghz{};
  Eigen::Matrix3cd vectors;  // columns are eigenvectors in (|+1>,|0>,|-1>)
  std::array<double, 3> mixing{};

  // |<g|psi_j>|^2 with g indexing the basis (+1, 0, -1).
  double overlap(int state, int basis) const {
    return std::norm(vectors(basis, state));
  }
  // W(j, g) = |<g|psi_j>|^2; doubly stochastic.
  Eigen::Matrix3d overlap_matrix() const;

  // Index of the state with the largest |0> character (the bright state).
  int bright_index() const;
  // The remaining two states in ascending energy order.
  std::array<int, 2> dark_indices() const;
};

EigenSolution eigensolve(const SpinHamiltonian& h);

struct TransitionFrequency {
  double f_ghz = 0.0;
  int lower = 0;  // eigenstate indices into the EigenSolution
  int upper = 0;
};

// All three pairwise eigenvalue differences, f >= 0, ordered (0,1),(0,2),(1,2).
std::array<TransitionFrequency, 3> transition_frequencies(
    const EigenSolution& sol);

// Energy gap between the two non-bright states. At zero field this is the
// strain-split pair; equals 2|E2| when E1 = 0.
double upper_pair_splitting_ghz(const EigenSolution& sol);

// Radiative rate plus the two intersystem-crossing rates from the pure spin
// states, MHz.
struct LifetimeModel {
  double k_r_mhz = 0.0;
  double k_isc0_mhz = 0.0;
  double k_isc1_mhz = 0.0;
};

// Gamma_j = k_r + m_j k_isc0 + (1 - m_j) k_isc1, tau_j = 1000 / Gamma_j (ns),
// indexed like the EigenSolution states. Throws std::invalid_argument if all
// rates are zero.
std::array<double, 3> effective_lifetimes_ns(const EigenSolution& sol,
                                             const LifetimeModel& lm);

}  // namespace nvsim
