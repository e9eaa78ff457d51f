#pragma once

#include <vector>

#include "nvsim/photodynamics.hpp"
#include "nvsim/stress.hpp"

namespace nvsim {

// Stress tensors along a 1D spatial line, positions in micrometers and
// strictly increasing.
struct StrainProfile {
  std::vector<double> x_um;
  std::vector<StressTensor> stress;

  // baseline + logistic((x - x0)/w) * delta on a uniform grid.
  static StrainProfile logistic_ramp(double x_start_um, double x_stop_um,
                                     int points, double x0_um, double width_um,
                                     const StressTensor& baseline,
                                     const StressTensor& delta);
  void validate() const;
};

struct CouplingProfile {
  std::vector<double> x_um;
  std::vector<double> d_ghz;       // |D|
  std::vector<double> e1_abs_ghz;  // |E1|
  std::vector<double> e2_abs_ghz;  // |E2|
};

CouplingProfile profile_couplings(const StrainProfile& profile,
                                  const CouplingModel& model);

struct ContrastProfile {
  std::vector<double> x_um;
  std::vector<double> raw;
  std::vector<double> convolved;
  double psf_fwhm_um = 0.0;
};

// Gaussian smoothing with the kernel renormalized at the edges (zero-flux
// boundaries). fwhm = 0 returns the input unchanged. Grid may be non-uniform.
std::vector<double> gaussian_convolve(const std::vector<double>& x,
                                      const std::vector<double>& values,
                                      double fwhm);

// Pointwise CW contrast along the profile followed by PSF convolution. The
// excited-state couplings are evaluated from the local stress; the driven
// ground pair is fixed along the line.
ContrastProfile profile_contrast(const StrainProfile& profile,
                                 const CouplingModel& es_model,
                                 const PhotoRateParams& rates, double bz_gauss,
                                 double mw_rate_mhz, GroundPair pair,
                                 double psf_fwhm_um);

struct ReversalPoint {
  double x_um = 0.0;     // interpolated zero crossing
  double width_um = 0.0; // distance between the -+50%-of-plateau points
};

struct ReversalResult {
  std::vector<ReversalPoint> crossings;
  bool ambiguous = false;  // more than one sign change
};

// Locates sign changes of the contrast. The transition width is measured
// between the positions where the contrast reaches half of the adjacent
// plateau values, the plateaus being the medians of the outer 20% of each
// side. Throws NoReversalError when there is no sign change.
ReversalResult find_reversal(const std::vector<double>& x_um,
                             const std::vector<double>& contrast);

inline ReversalResult find_reversal(const ContrastProfile& cp,
                                    bool use_convolved = true) {
  return find_reversal(cp.x_um, use_convolved ? cp.convolved : cp.raw);
}

}  // namespace nvsim
