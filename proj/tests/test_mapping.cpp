#include <random>

#include "doctest.h"
#include "nvsim/errors.hpp"
#include "nvsim/mapping.hpp"
#include "nvsim/presets.hpp"

using namespace nvsim;

namespace {

// couplings that ramp the strongly strained site's E terms with shear:
// sigma_xz = 100 GPa maps to (E1, E2) = (0.25, 1.19) GHz
CouplingModel shear_model() {
  CouplingModel m;
  m.d0_ghz = 0.80;
  m.g26 = 2.5;
  m.g16 = 11.9;
  return m;
}

StressTensor shear_stress(double scale) {
  StressTensor s;
  s.xz = 100.0 * scale;
  return s;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("profile_couplings: uniform hydrostatic line is flat") {
  CouplingModel m;
  m.d0_ghz = 2.87;
  m.g41 = 10.0;
  m.g43 = 4.0;
  StrainProfile profile;
  profile.x_um = linspace(0, 10, 21);
  profile.stress.assign(21, StressTensor{2, 2, 2, 0, 0, 0});
  const auto cp = profile_couplings(profile, m);
  for (size_t i = 0; i < cp.x_um.size(); ++i) {
    CHECK(cp.d_ghz[i] == doctest::Approx(2.87 + 1e-3 * (10.0 * 2 + 4.0 * 2)));
    CHECK(cp.e1_abs_ghz[i] == 0.0);
    CHECK(cp.e2_abs_ghz[i] == 0.0);
  }
}

TEST_CASE("profile_couplings: a shear step moves E1/E2 but not D") {
  const CouplingModel m = shear_model();
  StrainProfile profile;
  profile.x_um = linspace(0, 10, 40);
  for (int i = 0; i < 40; ++i)
    profile.stress.push_back(shear_stress(i < 20 ? 0.0 : 1.0));
  const auto cp = profile_couplings(profile, m);
  CHECK(cp.e2_abs_ghz[0] == 0.0);
  CHECK(cp.e2_abs_ghz[39] == doctest::Approx(1.19));
  CHECK(cp.e1_abs_ghz[39] == doctest::Approx(0.25));
  for (int i = 0; i < 40; ++i) CHECK(cp.d_ghz[i] == doctest::Approx(0.80));
}

TEST_CASE("profile_couplings: logistic ramp rises sharply near its center") {
  const CouplingModel m = shear_model();
  const auto profile = StrainProfile::logistic_ramp(
      7.0, 8.2, 241, 7.6, 0.03, shear_stress(0.2), shear_stress(0.8));
  const auto cp = profile_couplings(profile, m);
  // |E2| climbs from the baseline to the top within a few widths of 7.6
  const double lo = cp.e2_abs_ghz.front(), hi = cp.e2_abs_ghz.back();
  CHECK(lo == doctest::Approx(0.2 * 1.19).epsilon(0.01));
  CHECK(hi == doctest::Approx(1.0 * 1.19).epsilon(0.01));
  int steepest = 0;
  double best = 0.0;
  for (size_t i = 1; i < cp.x_um.size(); ++i) {
    const double slope = cp.e2_abs_ghz[i] - cp.e2_abs_ghz[i - 1];
    if (slope > best) {
      best = slope;
      steepest = static_cast<int>(i);
    }
  }
  CHECK(cp.x_um[steepest] == doctest::Approx(7.6).epsilon(0.01));
}

TEST_CASE("couplings commute with the symmetry decomposition") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-3, 3);
  CouplingModel m{1.0, -2.0, 3.0, 0.5, -1.5, 2.5, 2.87};
  for (int i = 0; i < 100; ++i) {
    const StressTensor s{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    const auto whole = couple(s, m);
    const auto d = decompose(s);
    const auto pres = couple(d.preserving, m);
    const auto brk = couple(d.breaking, m);
    CHECK(whole.d_ghz ==
          doctest::Approx(pres.d_ghz + brk.d_ghz - m.d0_ghz).epsilon(1e-12));
    CHECK(std::abs(whole.e1_ghz - (pres.e1_ghz + brk.e1_ghz)) < 1e-15);
    CHECK(std::abs(whole.e2_ghz - (pres.e2_ghz + brk.e2_ghz)) < 1e-15);
  }
}

TEST_CASE("gaussian_convolve: zero width is the identity") {
  const auto x = linspace(0, 1, 50);
  std::vector<double> y(50);
  for (int i = 0; i < 50; ++i) y[i] = std::sin(0.3 * i);
  CHECK(gaussian_convolve(x, y, 0.0) == y);
}

TEST_CASE("gaussian_convolve: output bounded by the input range") {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto x = linspace(0, 4, 200);
  std::vector<double> y(200);
  for (auto& v : y) v = u(rng);
  const auto smooth = gaussian_convolve(x, y, 0.3);
  const double lo = *std::min_element(y.begin(), y.end());
  const double hi = *std::max_element(y.begin(), y.end());
  for (double v : smooth) {
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }
}

TEST_CASE("gaussian_convolve: constant input is preserved at the edges") {
  const auto x = linspace(0, 2, 80);
  const std::vector<double> y(80, 3.5);
  const auto smooth = gaussian_convolve(x, y, 0.5);
  for (double v : smooth) CHECK(v == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("profile_contrast: zero PSF leaves the raw profile") {
  const auto profile = StrainProfile::logistic_ramp(
      7.3, 7.8, 41, 7.55, 0.03, shear_stress(0.35), shear_stress(0.2));
  const auto rates = site_preset("IV").rates();
  const auto cp = profile_contrast(profile, shear_model(), rates, 0.0, 5.0,
                                   GroundPair::kZeroPlus, 0.0);
  CHECK(cp.raw == cp.convolved);
}

TEST_CASE("profile_contrast: uniform mild strain stays uniformly negative") {
  StrainProfile profile;
  profile.x_um = linspace(0, 5, 15);
  profile.stress.assign(15, shear_stress(0.1));
  const auto rates = site_preset("IV").rates();
  const auto cp = profile_contrast(profile, shear_model(), rates, 0.0, 5.0,
                                   GroundPair::kZeroPlus, 0.4);
  for (double v : cp.raw) CHECK(v < 0.0);
  for (double v : cp.convolved) CHECK(v < 0.0);
}

TEST_CASE("profile_contrast: ramp across the threshold changes sign") {
  const auto profile = StrainProfile::logistic_ramp(
      7.0, 8.1, 221, 7.55, 0.03, shear_stress(0.35), shear_stress(0.2));
  const auto rates = site_preset("IV").rates();
  const auto cp = profile_contrast(profile, shear_model(), rates, 0.0, 5.0,
                                   GroundPair::kZeroPlus, 0.0);
  CHECK(cp.raw.front() < 0.0);
  CHECK(cp.raw.back() > 0.0);
  const auto rev = find_reversal(cp, false);
  CHECK(rev.crossings.size() == 1);
  CHECK(rev.crossings[0].x_um == doctest::Approx(7.55).epsilon(0.01));
}

TEST_CASE("find_reversal: constant-sign profile reports no reversal") {
  const auto x = linspace(0, 1, 30);
  const std::vector<double> y(30, 0.2);
  CHECK_THROWS_AS(find_reversal(x, y), NoReversalError);
}

TEST_CASE("find_reversal: ideal linear ramp has a closed-form answer") {
  // contrast = x - 7.55 on [7.05, 8.05]: plateaus are the outer medians,
  // half-plateau points are at the midpoints of each side
  const auto x = linspace(7.05, 8.05, 1001);
  std::vector<double> y;
  y.reserve(x.size());
  for (double xv : x) y.push_back(xv - 7.55);
  const auto rev = find_reversal(x, y);
  REQUIRE(rev.crossings.size() == 1);
  CHECK_FALSE(rev.ambiguous);
  CHECK(rev.crossings[0].x_um == doctest::Approx(7.55).epsilon(1e-9));
  // plateaus are the medians of the outer 20%: the midpoints of the outer
  // segments of the ramp, y = +-(0.5 - 0.0995); the half-plateau points then
  // sit at the quarter marks of those values on the ramp
  const double plateau = 0.5 * (y[99] + y[100]);
  const double expected_width = 2.0 * std::abs(0.5 * plateau);
  CHECK(rev.crossings[0].width_um ==
        doctest::Approx(expected_width).epsilon(1e-9));
}

TEST_CASE("find_reversal: multiple crossings are returned and flagged") {
  const auto x = linspace(0, 1, 101);
  std::vector<double> y;
  for (double xv : x) y.push_back(std::sin(4.0 * M_PI * xv) + 0.1);
  const auto rev = find_reversal(x, y);
  CHECK(rev.ambiguous);
  CHECK(rev.crossings.size() > 1);
}

TEST_CASE("find_reversal: crossing is stable against small perturbations") {
  const auto x = linspace(7.0, 8.0, 2001);
  std::vector<double> base;
  for (double xv : x) base.push_back(2.0 * (xv - 7.5));  // slope 2 per um
  const auto r0 = find_reversal(x, base);
  const double eps = 1e-3;
  std::vector<double> shifted = base;
  for (auto& v : shifted) v += eps;
  const auto r1 = find_reversal(x, shifted);
  CHECK(std::abs(r1.crossings[0].x_um - r0.crossings[0].x_um) <=
        eps / 2.0 + 1e-9);
}

TEST_CASE("transition width grows with the PSF width") {
  const auto profile = StrainProfile::logistic_ramp(
      6.8, 8.3, 751, 7.55, 0.03, shear_stress(0.35), shear_stress(0.2));
  const auto rates = site_preset("IV").rates();
  double previous = 0.0;
  for (double fwhm : {0.0, 0.2, 0.55}) {
    const auto cp = profile_contrast(profile, shear_model(), rates, 0.0, 5.0,
                                     GroundPair::kZeroPlus, fwhm);
    const auto rev = find_reversal(cp, true);
    REQUIRE(!rev.crossings.empty());
    CHECK(rev.crossings[0].width_um >= previous - 1e-9);
    previous = rev.crossings[0].width_um;
  }
}

TEST_CASE("symmetric profile keeps its crossing under convolution") {
  const auto x = linspace(7.0, 8.1, 1101);
  std::vector<double> y;
  const double c = 0.02;
  for (double xv : x) y.push_back(c * std::tanh((xv - 7.55) / 0.03));
  const auto before = find_reversal(x, y);
  const auto smooth = gaussian_convolve(x, y, 0.55);
  const auto after = find_reversal(x, smooth);
  CHECK(std::abs(after.crossings[0].x_um - before.crossings[0].x_um) <
        0.010);  // ten nanometres
}
