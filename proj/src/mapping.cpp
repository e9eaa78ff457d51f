#include "nvsim/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nvsim/errors.hpp"

namespace nvsim {

void StrainProfile::validate() const {
  if (x_um.size() != stress.size() || x_um.size() < 2)
    throw std::invalid_argument("StrainProfile: bad sizes");
  for (size_t i = 1; i < x_um.size(); ++i)
    if (!(x_um[i] > x_um[i - 1]))
      throw std::invalid_argument("StrainProfile: positions must increase");
  for (const auto& s : stress)
    if (!s.is_finite())
      throw std::invalid_argument("StrainProfile: non-finite stress");
}

StrainProfile StrainProfile::logistic_ramp(double x_start_um, double x_stop_um,
                                           int points, double x0_um,
                                           double width_um,
                                           const StressTensor& baseline,
                                           const StressTensor& delta) {
  if (points < 2) throw std::invalid_argument("logistic_ramp: points < 2");
  if (!(width_um > 0)) throw std::invalid_argument("logistic_ramp: width <= 0");
  StrainProfile profile;
  profile.x_um.reserve(points);
  profile.stress.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double x =
        x_start_um + (x_stop_um - x_start_um) * i / (points - 1);
    const double s = 1.0 / (1.0 + std::exp(-(x - x0_um) / width_um));
    profile.x_um.push_back(x);
    profile.stress.push_back(baseline + delta * s);
  }
  profile.validate();
  return profile;
}

CouplingProfile profile_couplings(const StrainProfile& profile,
                                  const CouplingModel& model) {
  profile.validate();
  CouplingProfile out;
  out.x_um = profile.x_um;
  out.d_ghz.reserve(profile.stress.size());
  for (const auto& sigma : profile.stress) {
    const HamiltonianCouplings c = couple(sigma, model);
    out.d_ghz.push_back(std::abs(c.d_ghz));
    out.e1_abs_ghz.push_back(std::abs(c.e1_ghz));
    out.e2_abs_ghz.push_back(std::abs(c.e2_ghz));
  }
  return out;
}

std::vector<double> gaussian_convolve(const std::vector<double>& x,
                                      const std::vector<double>& values,
                                      double fwhm) {
  if (x.size() != values.size())
    throw std::invalid_argument("gaussian_convolve: size mismatch");
  if (fwhm < 0) throw std::invalid_argument("gaussian_convolve: fwhm < 0");
  if (fwhm == 0.0 || x.size() < 2) return values;

  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double cutoff = 5.0 * sigma;
  const size_t n = x.size();

  // trapezoid sample weights handle non-uniform grids
  std::vector<double> dx(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? x[i] - x[i - 1] : 0.0;
    const double right = i + 1 < n ? x[i + 1] - x[i] : 0.0;
    dx[i] = 0.5 * (left + right);
  }

  std::vector<double> out(n);
  size_t lo = 0;
  for (size_t i = 0; i < n; ++i) {
    while (lo < n && x[i] - x[lo] > cutoff) ++lo;
    double acc = 0.0, norm = 0.0;
    for (size_t k = lo; k < n && x[k] - x[i] <= cutoff; ++k) {
      const double u = (x[k] - x[i]) / sigma;
      const double w = std::exp(-0.5 * u * u) * dx[k];
      acc += w * values[k];
      norm += w;
    }
    out[i] = acc / norm;  // renormalized kernel: zero-flux edges
  }
  return out;
}

ContrastProfile profile_contrast(const StrainProfile& profile,
                                 const CouplingModel& es_model,
                                 const PhotoRateParams& rates, double bz_gauss,
                                 double mw_rate_mhz, GroundPair pair,
                                 double psf_fwhm_um) {
  profile.validate();
  if (psf_fwhm_um < 0)
    throw std::invalid_argument("profile_contrast: psf_fwhm < 0");
  ContrastProfile out;
  out.x_um = profile.x_um;
  out.psf_fwhm_um = psf_fwhm_um;
  out.raw.reserve(profile.stress.size());
  for (const auto& sigma : profile.stress) {
    const EigenSolution sol_es =
        eigensolve(build(couple(sigma, es_model), bz_gauss));
    out.raw.push_back(cw_contrast(sol_es, rates, mw_rate_mhz, pair));
  }
  out.convolved = gaussian_convolve(out.x_um, out.raw, psf_fwhm_um);
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// linear interpolation of the position where the series crosses `target`
// between samples i and i+1
double interp_crossing(const std::vector<double>& x,
                       const std::vector<double>& y, size_t i, double target) {
  const double denom = y[i + 1] - y[i];
  if (denom == 0.0) return x[i];
  return x[i] + (target - y[i]) / denom * (x[i + 1] - x[i]);
}

}  // namespace

ReversalResult find_reversal(const std::vector<double>& x_um,
                             const std::vector<double>& contrast) {
  const size_t n = x_um.size();
  if (contrast.size() != n || n < 5)
    throw std::invalid_argument("find_reversal: bad input sizes");

  // sign changes located between the last nonzero sample and the next one
  // with the opposite sign, so exact zero samples are crossed correctly
  struct Interval {
    size_t lo, hi;
  };
  std::vector<Interval> crossings;
  int last_sign = 0;
  size_t last_idx = 0;
  for (size_t i = 0; i < n; ++i) {
    const int s = contrast[i] > 0.0 ? 1 : (contrast[i] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) crossings.push_back({last_idx, i});
    last_sign = s;
    last_idx = i;
  }
  if (crossings.empty())
    throw NoReversalError("find_reversal: contrast has no sign change");

  const size_t edge = std::max<size_t>(1, n / 5);
  const double plateau_left =
      median({contrast.begin(), contrast.begin() + edge});
  const double plateau_right = median({contrast.end() - edge, contrast.end()});

  ReversalResult result;
  result.ambiguous = crossings.size() > 1;
  for (const auto& iv : crossings) {
    ReversalPoint point;
    const double y_lo = contrast[iv.lo], y_hi = contrast[iv.hi];
    point.x_um = x_um[iv.lo] -
                 y_lo * (x_um[iv.hi] - x_um[iv.lo]) / (y_hi - y_lo);

    // walk outwards to the half-plateau levels
    const double target_left = 0.5 * plateau_left;
    const double target_right = 0.5 * plateau_right;
    double x_left = x_um.front();
    for (size_t k = iv.lo + 1; k-- > 0;) {
      const bool reached = (plateau_left < 0.0) ? contrast[k] <= target_left
                                                : contrast[k] >= target_left;
      if (reached) {
        x_left = interp_crossing(x_um, contrast, k, target_left);
        break;
      }
    }
    double x_right = x_um.back();
    for (size_t k = iv.hi; k < n; ++k) {
      const bool reached = (plateau_right < 0.0) ? contrast[k] <= target_right
                                                 : contrast[k] >= target_right;
      if (reached) {
        x_right = k > 0 ? interp_crossing(x_um, contrast, k - 1, target_right)
                        : x_um.front();
        break;
      }
    }
    point.width_um = x_right - x_left;
    result.crossings.push_back(point);
  }
  return result;
}

}  // namespace nvsim
