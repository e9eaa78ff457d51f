#include "nvsim/photodynamics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nvsim/errors.hpp"

namespace nvsim {

namespace {

// singlet branching vector in the ground basis (+1, 0, -1)
std::array<double, 3> singlet_branching(double q0) {
  return {0.5 * (1.0 - q0), q0, 0.5 * (1.0 - q0)};
}

// per-state ISC rate Gamma_isc,j = m_j k_isc0 + (1 - m_j) k_isc1
double isc_rate(const EigenSolution& sol, const PhotoRateParams& r, int j) {
  return sol.mixing[j] * r.k_isc0_mhz + (1.0 - sol.mixing[j]) * r.k_isc1_mhz;
}

std::pair<int, int> bare_pair(GroundPair pair) {
  switch (pair) {
    case GroundPair::kZeroPlus: return {1, 0};
    case GroundPair::kZeroMinus: return {1, 2};
    case GroundPair::kPlusMinus: return {0, 2};
  }
  throw std::invalid_argument("unknown ground pair");
}

int dominant_component(const EigenSolution& sol, int state) {
  int g = 0;
  for (int k = 1; k < 3; ++k)
    if (sol.overlap(state, k) > sol.overlap(state, g)) g = k;
  return g;
}

}  // namespace

void PhotoRateParams::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("eta must be in [0,1]");
  if (!(q0 >= 0.0 && q0 <= 1.0))
    throw std::invalid_argument("q0 must be in [0,1]");
  if (k_r_mhz < 0 || k_isc0_mhz < 0 || k_isc1_mhz < 0)
    throw std::invalid_argument("rates must be non-negative");
  if (!(tau_singlet_ns > 0))
    throw std::invalid_argument("tau_singlet must be positive");
  if (!(pulse_spacing_ns > 0))
    throw std::invalid_argument("pulse_spacing must be positive");
}

double PopulationState::total() const {
  return ground[0] + ground[1] + ground[2] + excited[0] + excited[1] +
         excited[2] + singlet;
}

bool PopulationState::ground_manifold_only(double tol) const {
  return std::abs(excited[0]) <= tol && std::abs(excited[1]) <= tol &&
         std::abs(excited[2]) <= tol && std::abs(singlet) <= tol;
}

PopulationState PopulationState::ground_state(double p_zero, double p_plus,
                                              double p_minus) {
  PopulationState s;
  s.ground = {p_plus, p_zero, p_minus};
  return s;
}

PopulationState excite_pulse(const PopulationState& state,
                             const EigenSolution& sol, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("excite_pulse: eta out of range");
  if (!state.ground_manifold_only())
    throw std::invalid_argument(
        "excite_pulse: initial excited or singlet population must be zero");
  PopulationState out = state;
  for (int g = 0; g < 3; ++g) out.ground[g] = (1.0 - eta) * state.ground[g];
  for (int j = 0; j < 3; ++j) {
    double p = 0.0;
    for (int g = 0; g < 3; ++g) p += state.ground[g] * sol.overlap(j, g);
    out.excited[j] = eta * p;
  }
  return out;
}

PopulationState relax(const PopulationState& state, const EigenSolution& sol,
                      const PhotoRateParams& rates) {
  rates.validate();
  const auto s = singlet_branching(rates.q0);
  PopulationState out;
  out.ground = state.ground;
  double into_singlet = state.singlet;
  for (int j = 0; j < 3; ++j) {
    const double p = state.excited[j];
    if (p == 0.0) continue;
    const double gisc = isc_rate(sol, rates, j);
    const double gamma = rates.k_r_mhz + gisc;
    if (gamma <= 0.0)
      throw std::invalid_argument("relax: excited state with zero total rate");
    const double radiative = p * rates.k_r_mhz / gamma;
    for (int g = 0; g < 3; ++g) out.ground[g] += radiative * sol.overlap(j, g);
    into_singlet += p * gisc / gamma;
  }
  for (int g = 0; g < 3; ++g) out.ground[g] += into_singlet * s[g];
  return out;
}

PopulationState pulse_step(const PopulationState& ground,
                           const EigenSolution& sol,
                           const PhotoRateParams& rates) {
  return relax(excite_pulse(ground, sol, rates.eta), sol, rates);
}

Eigen::Matrix3d pulse_map_matrix(const EigenSolution& sol,
                                 const PhotoRateParams& rates) {
  Eigen::Matrix3d m;
  for (int g = 0; g < 3; ++g) {
    PopulationState unit;
    unit.ground[g] = 1.0;
    const PopulationState mapped = pulse_step(unit, sol, rates);
    for (int gp = 0; gp < 3; ++gp) m(gp, g) = mapped.ground[gp];
  }
  return m;
}

SteadyStateResult steady_state(const EigenSolution& sol,
                               const PhotoRateParams& rates) {
  if (!(rates.eta > 0.0))
    throw std::invalid_argument("steady_state: eta must be positive");
  const Eigen::Matrix3d m = pulse_map_matrix(sol, rates);
  Eigen::Matrix3d a = m - Eigen::Matrix3d::Identity();

  Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
  lu.setThreshold(1e-10);
  if (lu.rank() < 2) {
    throw DegenerateDynamicsError(
        "steady_state: pulse map has a non-unique stationary distribution");
  }
  // columns of (M - I) sum to zero, so any row may carry the normalization
  a.row(2) = Eigen::RowVector3d::Ones();
  const Eigen::Vector3d p = a.fullPivLu().solve(Eigen::Vector3d(0.0, 0.0, 1.0));
  for (int g = 0; g < 3; ++g) {
    if (p[g] < -1e-9)
      throw DegenerateDynamicsError("steady_state: negative fixed point");
  }

  SteadyStateResult out;
  out.ground.ground = {std::max(p[0], 0.0), std::max(p[1], 0.0),
                       std::max(p[2], 0.0)};
  const double tot =
      out.ground.ground[0] + out.ground.ground[1] + out.ground.ground[2];
  for (auto& v : out.ground.ground) v /= tot;

  const Eigen::Matrix3d w = sol.overlap_matrix();
  const Eigen::Vector3d pg(out.ground.ground[0], out.ground.ground[1],
                           out.ground.ground[2]);
  const Eigen::Vector3d exc = w * pg;  // normalized: W is doubly stochastic
  out.post_pulse_excited = {exc[0], exc[1], exc[2]};
  out.post_pulse_p4 = exc[sol.bright_index()];
  return out;
}

DecayCurve decay_curve(const std::array<double, 3>& populations,
                       const std::array<double, 3>& lifetimes_ns,
                       const std::vector<double>& time_grid_ns,
                       double amplitude) {
  const double total = populations[0] + populations[1] + populations[2];
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("decay_curve: populations must sum to 1");
  for (double p : populations)
    if (p < -1e-12) throw std::invalid_argument("decay_curve: negative population");
  for (double tau : lifetimes_ns)
    if (!(tau > 0)) throw std::invalid_argument("decay_curve: lifetimes must be positive");
  if (!(amplitude > 0))
    throw std::invalid_argument("decay_curve: amplitude must be positive");

  DecayCurve curve;
  curve.populations = populations;
  curve.lifetimes_ns = lifetimes_ns;
  curve.time_ns = time_grid_ns;
  curve.intensity.reserve(time_grid_ns.size());
  for (double t : time_grid_ns) {
    double v = 0.0;
    for (int j = 0; j < 3; ++j)
      v += populations[j] * std::exp(-t / lifetimes_ns[j]);
    curve.intensity.push_back(amplitude * v);
  }
  return curve;
}

std::vector<double> poisson_counts(const DecayCurve& curve, double peak_counts,
                                   std::mt19937_64& rng) {
  if (!(peak_counts > 0))
    throw std::invalid_argument("poisson_counts: peak_counts must be positive");
  const double i0 = curve.intensity.empty() ? 1.0 : curve.intensity.front();
  std::vector<double> out;
  out.reserve(curve.intensity.size());
  for (double v : curve.intensity) {
    std::poisson_distribution<long> draw(peak_counts * v / i0);
    out.push_back(static_cast<double>(draw(rng)));
  }
  return out;
}

double cw_contrast(const EigenSolution& sol_es, const PhotoRateParams& rates,
                   double mw_rate_mhz, GroundPair pair) {
  rates.validate();
  if (mw_rate_mhz < 0)
    throw std::invalid_argument("cw_contrast: mw_rate must be >= 0");

  const double k_pump = rates.eta * 1000.0 / rates.pulse_spacing_ns;  // MHz
  const double k_singlet = 1000.0 / rates.tau_singlet_ns;
  const auto s = singlet_branching(rates.q0);
  const Eigen::Matrix3d w = sol_es.overlap_matrix();

  // levels: 0..2 ground (+1,0,-1), 3..5 excited eigenstates, 6 singlet
  const auto generator = [&](double mw, std::pair<int, int> ab) {
    Eigen::Matrix<double, 7, 7> l = Eigen::Matrix<double, 7, 7>::Zero();
    for (int g = 0; g < 3; ++g) {
      for (int j = 0; j < 3; ++j) l(3 + j, g) += k_pump * w(j, g);
      l(g, g) -= k_pump;
    }
    for (int j = 0; j < 3; ++j) {
      const double gisc = isc_rate(sol_es, rates, j);
      for (int g = 0; g < 3; ++g) l(g, 3 + j) += rates.k_r_mhz * w(j, g);
      l(6, 3 + j) += gisc;
      l(3 + j, 3 + j) -= rates.k_r_mhz + gisc;
    }
    for (int g = 0; g < 3; ++g) l(g, 6) += s[g] * k_singlet;
    l(6, 6) -= k_singlet;
    if (mw > 0) {
      const auto [a, b] = ab;
      l(a, b) += mw;
      l(b, a) += mw;
      l(a, a) -= mw;
      l(b, b) -= mw;
    }
    return l;
  };

  const auto steady = [&](const Eigen::Matrix<double, 7, 7>& l) {
    Eigen::Matrix<double, 7, 7> a = l;
    a.row(6) = Eigen::Matrix<double, 1, 7>::Ones();
    Eigen::Matrix<double, 7, 1> rhs = Eigen::Matrix<double, 7, 1>::Zero();
    rhs(6) = 1.0;
    Eigen::FullPivLU<Eigen::Matrix<double, 7, 7>> lu(a);
    if (!lu.isInvertible())
      throw NumericalError("cw_contrast: singular steady-state system");
    return Eigen::Matrix<double, 7, 1>(lu.solve(rhs));
  };

  const auto intensity = [&](const Eigen::Matrix<double, 7, 1>& p) {
    return rates.k_r_mhz * (p(3) + p(4) + p(5));
  };

  const double i_off = intensity(steady(generator(0.0, {0, 0})));
  if (!(i_off > 0))
    throw NumericalError("cw_contrast: zero off-resonance intensity");
  const double i_on =
      intensity(steady(generator(mw_rate_mhz, bare_pair(pair))));
  return (i_on - i_off) / i_off;
}

double cw_contrast(const EigenSolution& sol_gs, const EigenSolution& sol_es,
                   const PhotoRateParams& rates, double mw_rate_mhz,
                   int gs_state_a, int gs_state_b) {
  if (gs_state_a == gs_state_b || gs_state_a < 0 || gs_state_a > 2 ||
      gs_state_b < 0 || gs_state_b > 2)
    throw std::invalid_argument("cw_contrast: invalid ground-state pair");
  const int a = dominant_component(sol_gs, gs_state_a);
  const int b = dominant_component(sol_gs, gs_state_b);
  if (a == b) {
    // both driven eigenstates share a dominant spin character; the exchange
    // cannot be expressed on bare populations
    throw NumericalError(
        "cw_contrast: ground pair has no distinct spin character");
  }
  GroundPair pair;
  const int lo = std::min(a, b), hi = std::max(a, b);
  if (lo == 0 && hi == 1) pair = GroundPair::kZeroPlus;
  else if (lo == 1 && hi == 2) pair = GroundPair::kZeroMinus;
  else pair = GroundPair::kPlusMinus;
  return cw_contrast(sol_es, rates, mw_rate_mhz, pair);
}

OdmrSpectrum odmr_spectrum(const EigenSolution& sol_gs,
                           const EigenSolution& sol_es,
                           const PhotoRateParams& rates, double mw_rate_mhz,
                           double f_start_ghz, double f_stop_ghz, int points,
                           double linewidth_mhz) {
  if (points < 2) throw std::invalid_argument("odmr_spectrum: points < 2");
  if (!(linewidth_mhz > 0))
    throw std::invalid_argument("odmr_spectrum: linewidth must be positive");
  if (!std::isfinite(f_start_ghz) || !std::isfinite(f_stop_ghz))
    throw std::invalid_argument("odmr_spectrum: sweep range must be finite");

  struct Line {
    double f_ghz;
    double contrast;
  };
  std::vector<Line> lines;
  for (const auto& tr : transition_frequencies(sol_gs)) {
    double c = 0.0;
    try {
      c = cw_contrast(sol_gs, sol_es, rates, mw_rate_mhz, tr.lower, tr.upper);
    } catch (const NumericalError&) {
      continue;  // degenerate pair without distinct spin character
    }
    lines.push_back({tr.f_ghz, c});
  }

  const double hw = 0.5 * linewidth_mhz * 1e-3;  // half width, GHz
  OdmrSpectrum spec;
  spec.f_ghz.reserve(points);
  spec.contrast.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double f =
        f_start_ghz + (f_stop_ghz - f_start_ghz) * i / (points - 1);
    double c = 0.0;
    for (const auto& line : lines) {
      const double d = f - line.f_ghz;
      c += line.contrast * hw * hw / (d * d + hw * hw);
    }
    spec.f_ghz.push_back(f);
    spec.contrast.push_back(c);
  }
  return spec;
}

}  // namespace nvsim
