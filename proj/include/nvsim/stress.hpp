#pragma once

#include <Eigen/Dense>
#include <complex>

namespace nvsim {

// Symmetric 3x3 stress tensor in the NV frame (z along the symmetry axis),
// units GPa. Only the six independent components are stored, so sigma_ij =
// sigma_ji holds by construction.
struct StressTensor {
  double xx = 0.0;
  double yy = 0.0;
  double zz = 0.0;
  double xy = 0.0;
  double xz = 0.0;
  double yz = 0.0;

  // In-plane mean normal stress sigma_m = (sxx + syy)/2.
  double mean_inplane() const { return 0.5 * (xx + yy); }
  // In-plane deviatoric normal stress sigma_d = (sxx - syy)/2.
  double deviatoric_inplane() const { return 0.5 * (xx - yy); }

  Eigen::Matrix3d matrix() const;
  // Requires m symmetric to within `tol` (relative to its norm).
  static StressTensor from_matrix(const Eigen::Matrix3d& m, double tol = 1e-9);

  bool is_finite() const;

  StressTensor operator+(const StressTensor& o) const;
  StressTensor operator-(const StressTensor& o) const;
  StressTensor operator*(double s) const;
};

// Split of a stress tensor into the part that keeps the threefold symmetry of
// the defect (diag(sigma_m, sigma_m, sigma_zz)) and the remainder (in-plane
// deviatoric plus shear).
struct StressDecomposition {
  StressTensor preserving;
  StressTensor breaking;
};

// Spin-stress coupling constants in MHz/GPa plus the zero-field splitting of
// the manifold being modeled (GHz). Separate instances are used for the
// ground and excited state.
struct CouplingModel {
  double g41 = 0.0;
  double g43 = 0.0;
  double g15 = 0.0;
  double g16 = 0.0;
  double g25 = 0.0;
  double g26 = 0.0;
  double d0_ghz = 0.0;
};

// The three couplings entering the spin-1 Hamiltonian, GHz.
// At zero stress D = D0 and E1 = E2 = 0.
struct HamiltonianCouplings {
  double d_ghz = 0.0;
  std::complex<double> e1_ghz{0.0, 0.0};
  std::complex<double> e2_ghz{0.0, 0.0};
};

// Throws std::invalid_argument on non-finite input.
StressDecomposition decompose(const StressTensor& sigma);

// D  = D0 + g41*sigma_m + g43*sigma_zz
// E1 = (g26*sigma_zx - g25*sigma_d) - i*(g26*sigma_yz + g25*sigma_xy)
// E2 = (g16*sigma_zx - g15*sigma_d) - i*(g16*sigma_yz + g15*sigma_xy)
// with the MHz/GPa products converted to GHz.
HamiltonianCouplings couple(const StressTensor& sigma,
                            const CouplingModel& model);

// Similarity transform from the crystal cubic frame into the NV frame with
// z || [111], x || [-110], y || [-1-12].
StressTensor rotate_to_nv_frame(const StressTensor& sigma_lab);

// The fixed rotation used by rotate_to_nv_frame (rows are the NV axes).
Eigen::Matrix3d nv_frame_rotation();

}  // namespace nvsim
