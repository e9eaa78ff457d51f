#include "nvsim/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nvsim {

Eigen::Matrix3cd SpinHamiltonian::matrix() const {
  const double gb = gamma_e_mhz_per_g * bz_gauss * 1e-3;  // GHz
  const double d = couplings.d_ghz;
  const std::complex<double> e1 = couplings.e1_ghz;
  const std::complex<double> e2 = couplings.e2_ghz;
  Eigen::Matrix3cd h;
  h << std::complex<double>(d + gb, 0.0), e1, e2,
       std::conj(e1), std::complex<double>(0.0, 0.0), -e1,
       std::conj(e2), -std::conj(e1), std::complex<double>(d - gb, 0.0);
  return h;
}

SpinHamiltonian build(const HamiltonianCouplings& couplings, double bz_gauss,
                      double gamma_e_mhz_per_g) {
  if (!std::isfinite(couplings.d_ghz) || !std::isfinite(bz_gauss) ||
      !std::isfinite(couplings.e1_ghz.real()) ||
      !std::isfinite(couplings.e1_ghz.imag()) ||
      !std::isfinite(couplings.e2_ghz.real()) ||
      !std::isfinite(couplings.e2_ghz.imag()) ||
      !std::isfinite(gamma_e_mhz_per_g)) {
    throw std::invalid_argument("build: non-finite Hamiltonian input");
  }
  return {couplings, bz_gauss, gamma_e_mhz_per_g};
}

Eigen::Matrix3d EigenSolution::overlap_matrix() const {
  Eigen::Matrix3d w;
  for (int j = 0; j < 3; ++j)
    for (int g = 0; g < 3; ++g) w(j, g) = std::norm(vectors(g, j));
  return w;
}

int EigenSolution::bright_index() const {
  int b = 0;
  for (int j = 1; j < 3; ++j)
    if (mixing[j] > mixing[b]) b = j;
  return b;
}

std::array<int, 2> EigenSolution::dark_indices() const {
  const int b = bright_index();
  std::array<int, 2> out{};
  int k = 0;
  for (int j = 0; j < 3; ++j)
    if (j != b) out[k++] = j;
  return out;
}

EigenSolution eigensolve(const SpinHamiltonian& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigensolve: solver failed");
  }
  EigenSolution sol;
  std::array<int, 3> order{0, 1, 2};
  const auto& ev = solver.eigenvalues();
  // ascending energies; exact degeneracies ordered by descending |<0|psi>|^2
  const double scale = std::max({1.0, std::abs(ev[0]), std::abs(ev[2])});
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(ev[a] - ev[b]) > 1e-12 * scale) return ev[a] < ev[b];
    return std::norm(solver.eigenvectors()(1, a)) >
           std::norm(solver.eigenvectors()(1, b));
  });
  for (int j = 0; j < 3; ++j) {
    sol.energies_ghz[j] = ev[order[j]];
    sol.vectors.col(j) = solver.eigenvectors().col(order[j]);
    sol.mixing[j] = std::norm(sol.vectors(1, j));
  }
  return sol;
}

std::array<TransitionFrequency, 3> transition_frequencies(
    const EigenSolution& sol) {
  std::array<TransitionFrequency, 3> out{};
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      out[k++] = {std::abs(sol.energies_ghz[j] - sol.energies_ghz[i]), i, j};
    }
  }
  return out;
}

double upper_pair_splitting_ghz(const EigenSolution& sol) {
  const auto dark = sol.dark_indices();
  return std::abs(sol.energies_ghz[dark[1]] - sol.energies_ghz[dark[0]]);
}

std::array<double, 3> effective_lifetimes_ns(const EigenSolution& sol,
                                             const LifetimeModel& lm) {
  if (lm.k_r_mhz < 0 || lm.k_isc0_mhz < 0 || lm.k_isc1_mhz < 0) {
    throw std::invalid_argument("effective_lifetimes: negative rate");
  }
  if (lm.k_r_mhz == 0 && lm.k_isc0_mhz == 0 && lm.k_isc1_mhz == 0) {
    throw std::invalid_argument(
        "effective_lifetimes: all rates zero (infinite lifetime)");
  }
  std::array<double, 3> tau{};
  for (int j = 0; j < 3; ++j) {
    const double gamma = lm.k_r_mhz + sol.mixing[j] * lm.k_isc0_mhz +
                         (1.0 - sol.mixing[j]) * lm.k_isc1_mhz;
    tau[j] = 1000.0 / gamma;
  }
  return tau;
}

}  // namespace nvsim
