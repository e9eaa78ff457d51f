#include "nvsim/fits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "nvsim/errors.hpp"

namespace nvsim {

// ---------------------------------------------------------------------------
// fit_decay

DecayFitResult fit_decay(const std::vector<double>& time_ns,
                         const std::vector<double>& counts,
                         const std::array<double, 3>& lifetimes_ns,
                         const std::vector<double>* sigma) {
  const size_t n = time_ns.size();
  if (counts.size() != n)
    throw std::invalid_argument("fit_decay: time/counts size mismatch");
  if (sigma && sigma->size() != n)
    throw std::invalid_argument("fit_decay: sigma size mismatch");
  for (double tau : lifetimes_ns)
    if (!(tau > 0))
      throw std::invalid_argument("fit_decay: lifetimes must be positive");
  const double tmax = *std::max_element(time_ns.begin(), time_ns.end());
  const double taumax =
      *std::max_element(lifetimes_ns.begin(), lifetimes_ns.end());
  if (n < 10 || tmax < 3.0 * taumax)
    throw std::invalid_argument(
        "fit_decay: need >= 10 points spanning >= 3x the longest lifetime");

  DecayFitResult result;

  // collapse lifetimes equal to within 1e-9 relative into one column
  std::array<int, 3> group{0, 1, 2};
  std::vector<double> unique_tau;
  for (int j = 0; j < 3; ++j) {
    int found = -1;
    for (size_t u = 0; u < unique_tau.size(); ++u) {
      if (std::abs(lifetimes_ns[j] - unique_tau[u]) <=
          1e-9 * std::max(lifetimes_ns[j], unique_tau[u]))
        found = static_cast<int>(u);
    }
    if (found < 0) {
      unique_tau.push_back(lifetimes_ns[j]);
      found = static_cast<int>(unique_tau.size()) - 1;
    }
    group[j] = found;
  }
  const int k = static_cast<int>(unique_tau.size());
  if (k < 3) result.flags.push_back("tied_lifetimes");

  Eigen::MatrixXd x(n, k);
  Eigen::VectorXd y(n);
  for (size_t i = 0; i < n; ++i) {
    const double wi = sigma ? 1.0 / std::max((*sigma)[i], 1e-300) : 1.0;
    for (int u = 0; u < k; ++u)
      x(i, u) = wi * std::exp(-time_ns[i] / unique_tau[u]);
    y(i) = wi * counts[i];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const double cond =
      svd.singularValues()(0) / svd.singularValues()(k - 1);
  result.condition_number = cond;
  if (!(cond < 1e8)) {
    throw IllConditionedError(
        "fit_decay: design matrix condition number " + std::to_string(cond) +
            " (lifetimes too close)",
        cond);
  }

  // exact non-negative least squares by support enumeration (k <= 3)
  Eigen::VectorXd best_a = Eigen::VectorXd::Zero(k);
  double best_rss = y.squaredNorm();
  std::vector<int> best_support;
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> support;
    for (int u = 0; u < k; ++u)
      if (mask & (1 << u)) support.push_back(u);
    Eigen::MatrixXd xs(n, support.size());
    for (size_t c = 0; c < support.size(); ++c) xs.col(c) = x.col(support[c]);
    const Eigen::VectorXd a =
        xs.colPivHouseholderQr().solve(y);
    if ((a.array() < 0.0).any()) continue;
    const double rss = (y - xs * a).squaredNorm();
    if (rss < best_rss - 1e-12 * best_rss ||
        (best_support.empty() && rss <= best_rss)) {
      best_rss = rss;
      best_a.setZero();
      for (size_t c = 0; c < support.size(); ++c) best_a[support[c]] = a[c];
      best_support = support;
    }
  }

  const double total = best_a.sum();
  if (!(total > 0))
    throw NumericalError("fit_decay: fitted amplitude is zero");

  // covariance of the full-support linear problem, then delta method for the
  // normalized populations
  const Eigen::MatrixXd xtx = x.transpose() * x;
  const double dof = static_cast<double>(n > static_cast<size_t>(k) ? n - k : 1);
  const double s2 = best_rss / dof;
  const Eigen::MatrixXd cov = xtx.ldlt().solve(
      Eigen::MatrixXd::Identity(k, k)) * s2;

  std::array<double, 3> pops{}, perr{};
  for (int j = 0; j < 3; ++j) {
    int share = 0;
    for (int jj = 0; jj < 3; ++jj)
      if (group[jj] == group[j]) ++share;
    pops[j] = best_a[group[j]] / share / total;
    // dP_j/da_u = (delta_{u,g}/share - P_j)/total
    Eigen::VectorXd grad(k);
    for (int u = 0; u < k; ++u)
      grad[u] = ((u == group[j] ? 1.0 / share : 0.0) - pops[j]) / total;
    perr[j] = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
  }
  result.populations = pops;
  result.population_errors = perr;
  result.amplitude = total;
  return result;
}

// ---------------------------------------------------------------------------
// fit_thermal_lifetimes

ThermalLifetimeResult fit_thermal_lifetimes(const std::vector<double>& time_ns,
                                            const std::vector<double>& counts,
                                            const std::vector<double>* sigma) {
  const size_t n = time_ns.size();
  if (counts.size() != n || n < 6)
    throw std::invalid_argument("fit_thermal_lifetimes: bad input sizes");
  if (sigma && sigma->size() != n)
    throw std::invalid_argument("fit_thermal_lifetimes: sigma size mismatch");

  const auto model = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    const double a = p[0], tb = std::abs(p[1]), td = std::abs(p[2]);
    for (size_t i = 0; i < n; ++i) {
      const double v = a / 3.0 *
                       (std::exp(-time_ns[i] / tb) +
                        2.0 * std::exp(-time_ns[i] / td));
      const double w = sigma ? 1.0 / std::max((*sigma)[i], 1e-300) : 1.0;
      r[i] = w * (v - counts[i]);
    }
    return r;
  };

  // slope-based starting values: late tail for the long lifetime, early
  // decade for the short one
  const double i0 = std::max(counts.front(), 1e-12);
  auto slope_tau = [&](size_t lo, size_t hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = lo; i < hi; ++i) {
      if (counts[i] <= 0) continue;
      sx += time_ns[i];
      sy += std::log(counts[i]);
      sxx += time_ns[i] * time_ns[i];
      sxy += time_ns[i] * std::log(counts[i]);
      ++m;
    }
    if (m < 2) return 0.0;
    const double denom = m * sxx - sx * sx;
    if (denom == 0) return 0.0;
    const double slope = (m * sxy - sx * sy) / denom;
    return slope < 0 ? -1.0 / slope : 0.0;
  };
  double tb0 = slope_tau(3 * n / 4, n);
  double td0 = slope_tau(0, n / 4);
  const double tmax = time_ns.back();
  if (!(tb0 > 0)) tb0 = tmax / 3.0;
  if (!(td0 > 0) || td0 >= tb0) td0 = tb0 / 3.0;

  FitProblem problem;
  problem.residuals = model;
  problem.initial = Eigen::Vector3d(i0, tb0, td0);
  FitResult fr = fit_least_squares(problem);

  ThermalLifetimeResult out;
  out.amplitude = fr.parameters[0];
  out.tau_bright_ns = std::abs(fr.parameters[1]);
  out.tau_dark_ns = std::abs(fr.parameters[2]);
  if (std::abs(out.tau_bright_ns - out.tau_dark_ns) <
      1e-3 * std::max(out.tau_bright_ns, out.tau_dark_ns)) {
    fr.flags.push_back("degenerate_lifetimes");
  }
  out.detail = std::move(fr);
  return out;
}

// ---------------------------------------------------------------------------
// joint ES fit

std::array<double, 2> es_branch_frequencies(const HamiltonianCouplings& c,
                                            double bz_G, double gamma_e) {
  HamiltonianCouplings folded{c.d_ghz, std::abs(c.e1_ghz), std::abs(c.e2_ghz)};
  const EigenSolution sol = eigensolve(build(folded, bz_G, gamma_e));
  const int b = sol.bright_index();
  const auto dark = sol.dark_indices();
  double f1 = std::abs(sol.energies_ghz[dark[0]] - sol.energies_ghz[b]);
  double f2 = std::abs(sol.energies_ghz[dark[1]] - sol.energies_ghz[b]);
  if (f1 > f2) std::swap(f1, f2);
  return {f1, f2};
}

std::array<double, 3> es_labeled_lifetimes(const HamiltonianCouplings& c,
                                           double bz_G, double gamma_e,
                                           const LifetimeModel& lm) {
  HamiltonianCouplings folded{c.d_ghz, std::abs(c.e1_ghz), std::abs(c.e2_ghz)};
  const EigenSolution sol = eigensolve(build(folded, bz_G, gamma_e));
  const auto tau = effective_lifetimes_ns(sol, lm);
  const int b = sol.bright_index();
  const auto dark = sol.dark_indices();
  return {tau[b], tau[dark[0]], tau[dark[1]]};
}

namespace {

struct FreqGroup {
  double bz = 0.0;
  std::vector<double> f;      // ascending
  std::vector<double> sigma;  // matching order
};

std::vector<FreqGroup> group_frequencies(const JointEsData& data) {
  std::map<double, FreqGroup> by_bz;
  const bool has_err = !data.freq_err_ghz.empty();
  for (size_t i = 0; i < data.freq_bz_G.size(); ++i) {
    auto& g = by_bz[data.freq_bz_G[i]];
    g.bz = data.freq_bz_G[i];
    g.f.push_back(data.freq_ghz[i]);
    g.sigma.push_back(has_err ? data.freq_err_ghz[i] : 0.0);
  }
  std::vector<FreqGroup> out;
  for (auto& [bz, g] : by_bz) {
    if (g.f.size() > 2)
      throw SchemaError("fit_joint_es: more than two branch rows at bz=" +
                        std::to_string(bz));
    std::vector<size_t> idx(g.f.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](size_t a, size_t b) { return g.f[a] < g.f[b]; });
    FreqGroup sorted;
    sorted.bz = g.bz;
    for (size_t i : idx) {
      sorted.f.push_back(g.f[i]);
      sorted.sigma.push_back(g.sigma[i]);
    }
    out.push_back(std::move(sorted));
  }
  return out;
}

}  // namespace

JointEsResult fit_joint_es(const JointEsData& data,
                           const JointEsOptions& options) {
  if (data.freq_bz_G.size() != data.freq_ghz.size())
    throw std::invalid_argument("fit_joint_es: frequency arrays mismatched");
  if (!data.freq_err_ghz.empty() &&
      data.freq_err_ghz.size() != data.freq_ghz.size())
    throw std::invalid_argument("fit_joint_es: frequency error size mismatch");
  if (data.tau_bz_G.size() != data.tau_ns.size())
    throw std::invalid_argument("fit_joint_es: lifetime arrays mismatched");
  if (!data.tau_err_ns.empty() && data.tau_err_ns.size() != data.tau_ns.size())
    throw std::invalid_argument("fit_joint_es: lifetime error size mismatch");

  const auto groups = group_frequencies(data);
  size_t n_field_points = groups.size();
  if (n_field_points + data.tau_bz_G.size() < 3)
    throw std::invalid_argument("fit_joint_es: need at least 3 field points");

  const bool f_err = !data.freq_err_ghz.empty();
  const bool t_err = !data.tau_err_ns.empty();

  // without measurement errors, balance the two datasets by their own RMS
  double f_scale = 1.0, t_scale = 1.0;
  if (!f_err && !data.freq_ghz.empty()) {
    double ss = 0;
    for (double f : data.freq_ghz) ss += f * f;
    f_scale = std::sqrt(ss / data.freq_ghz.size());
  }
  if (!t_err && !data.tau_ns.empty()) {
    double ss = 0;
    int m = 0;
    for (const auto& t : data.tau_ns)
      for (double v : t) ss += v * v, ++m;
    t_scale = std::sqrt(ss / m);
  }

  const double gamma = options.gamma_e_mhz_per_g;
  const LifetimeModel lm = options.rates;

  const auto residuals = [&](const Eigen::VectorXd& p) {
    const HamiltonianCouplings c{p[0], {p[1], 0.0}, {p[2], 0.0}};
    std::vector<double> r;
    for (const auto& g : groups) {
      const auto branches = es_branch_frequencies(c, g.bz, gamma);
      if (g.f.size() == 2) {
        for (int k = 0; k < 2; ++k) {
          const double s = f_err ? std::max(g.sigma[k], 1e-12) : f_scale;
          r.push_back((branches[k] - g.f[k]) / s);
        }
      } else {
        const double d0 = std::abs(branches[0] - g.f[0]);
        const double d1 = std::abs(branches[1] - g.f[0]);
        const double model = d0 <= d1 ? branches[0] : branches[1];
        const double s = f_err ? std::max(g.sigma[0], 1e-12) : f_scale;
        r.push_back((model - g.f[0]) / s);
      }
    }
    for (size_t i = 0; i < data.tau_bz_G.size(); ++i) {
      const auto model = es_labeled_lifetimes(c, data.tau_bz_G[i], gamma, lm);
      for (int k = 0; k < 3; ++k) {
        const double s =
            t_err ? std::max(data.tau_err_ns[i][k], 1e-12) : t_scale;
        r.push_back((model[k] - data.tau_ns[i][k]) / s);
      }
    }
    return Eigen::Map<Eigen::VectorXd>(r.data(), r.size()).eval();
  };

  // data-driven starting candidates from the widest and narrowest field rows
  std::vector<Eigen::Vector3d> candidates;
  if (options.initial) {
    const auto& ini = *options.initial;
    candidates.emplace_back(ini[0], ini[1], ini[2]);
  } else {
    const FreqGroup* top = nullptr;
    const FreqGroup* zero = nullptr;
    for (const auto& g : groups) {
      if (g.f.size() != 2) continue;
      if (!top || std::abs(g.bz) > std::abs(top->bz)) top = &g;
      if (!zero || std::abs(g.bz) < std::abs(zero->bz)) zero = &g;
    }
    if (top && zero) {
      const std::array<double, 2> d_cand{0.5 * (top->f[0] + top->f[1]),
                                         0.5 * std::abs(top->f[1] - top->f[0])};
      const std::array<double, 2> e2_cand{0.5 * std::abs(zero->f[1] - zero->f[0]),
                                          0.5 * (zero->f[0] + zero->f[1])};
      for (double d : d_cand)
        for (double e2 : e2_cand)
          candidates.emplace_back(std::max(d, 0.05), 0.1, std::max(e2, 0.05));
    } else {
      candidates.emplace_back(1.0, 0.1, 0.5);
    }
  }

  Eigen::Vector3d best = candidates.front();
  double best_obj = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    const double obj = 0.5 * residuals(c).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best = c;
    }
  }

  FitProblem problem;
  problem.residuals = residuals;
  problem.initial = best;
  FitResult fr = fit_least_squares(problem);

  JointEsResult out;
  out.d_ghz = std::abs(fr.parameters[0]);
  out.e1_ghz = std::abs(fr.parameters[1]);
  out.e2_ghz = std::abs(fr.parameters[2]);
  out.d_err = fr.std_errors[0];
  out.e1_err = fr.std_errors[1];
  out.e2_err = fr.std_errors[2];
  out.detail = std::move(fr);
  return out;
}

// ---------------------------------------------------------------------------
// multi-pulse dynamics fit

namespace {

PopulationState swapped(const PopulationState& state, GroundPair pair) {
  PopulationState out = state;
  int a = 1, b = 0;  // bare indices (+1,0,-1): zero<->plus
  if (pair == GroundPair::kZeroMinus) a = 1, b = 2;
  if (pair == GroundPair::kPlusMinus) a = 0, b = 2;
  std::swap(out.ground[a], out.ground[b]);
  return out;
}

}  // namespace

std::vector<double> pulse_trajectory_model(const EigenSolution& sol,
                                           const PhotoRateParams& rates,
                                           PulseTrajectory::Init init,
                                           GroundPair swap_pair, int n) {
  const SteadyStateResult ss = steady_state(sol, rates);
  PopulationState p = ss.ground;
  if (init == PulseTrajectory::Init::kPiSwapped) p = swapped(p, swap_pair);
  const Eigen::Matrix3d w = sol.overlap_matrix();
  const Eigen::Matrix3d m = pulse_map_matrix(sol, rates);
  const int bright = sol.bright_index();
  std::vector<double> out;
  out.reserve(n);
  Eigen::Vector3d v(p.ground[0], p.ground[1], p.ground[2]);
  for (int i = 0; i < n; ++i) {
    out.push_back((w * v)[bright]);
    v = m * v;
  }
  return out;
}

PulseDynResult fit_pulse_dynamics(const std::vector<PulseTrajectory>& data,
                                  const PulseDynOptions& options) {
  if (data.size() < 2)
    throw std::invalid_argument(
        "fit_pulse_dynamics: need at least two trajectories with distinct "
        "initial states");
  int max_index = 0;
  for (const auto& tr : data) {
    if (tr.pulse_index.size() != tr.p4.size())
      throw std::invalid_argument("fit_pulse_dynamics: index/p4 mismatch");
    if (!tr.p4_err.empty() && tr.p4_err.size() != tr.p4.size())
      throw std::invalid_argument("fit_pulse_dynamics: p4_err size mismatch");
    for (int idx : tr.pulse_index) {
      if (idx < 0) throw std::invalid_argument("fit_pulse_dynamics: negative index");
      max_index = std::max(max_index, idx);
    }
  }

  const auto residuals = [&](const Eigen::VectorXd& p) {
    PhotoRateParams rates;
    rates.eta = options.eta;
    rates.pulse_spacing_ns = options.pulse_spacing_ns;
    rates.tau_singlet_ns = options.tau_singlet_ns;
    rates.k_r_mhz = std::max(p[0], 0.0);
    rates.k_isc0_mhz = std::max(p[1], 0.0);
    rates.k_isc1_mhz = std::max(p[2], 0.0);
    rates.q0 = std::clamp(p[3], 0.0, 1.0);

    size_t total = 0;
    for (const auto& tr : data) total += tr.p4.size();
    if (options.tau_targets_ns) total += 2;
    Eigen::VectorXd r(total);

    size_t at = 0;
    try {
      for (const auto& tr : data) {
        const auto model = pulse_trajectory_model(
            options.sol, rates, tr.init, tr.swap_pair, max_index + 1);
        for (size_t i = 0; i < tr.p4.size(); ++i) {
          const double s =
              tr.p4_err.empty() ? 1.0 : std::max(tr.p4_err[i], 1e-12);
          r[at++] = (model[tr.pulse_index[i]] - tr.p4[i]) / s;
        }
      }
    } catch (const DegenerateDynamicsError&) {
      r.setConstant(1e6);
      return r;
    }
    if (options.tau_targets_ns) {
      const auto targets = *options.tau_targets_ns;
      std::array<double, 2> errs{0.05, 0.05};
      if (options.tau_target_errs_ns) errs = *options.tau_target_errs_ns;
      // propagate lifetime error to a rate error: d(1000/tau) = 1000 dtau/tau^2
      const double sb =
          std::max(1000.0 * errs[0] / (targets[0] * targets[0]), 1e-9);
      const double sd =
          std::max(1000.0 * errs[1] / (targets[1] * targets[1]), 1e-9);
      r[at++] = (rates.k_r_mhz + rates.k_isc0_mhz - 1000.0 / targets[0]) / sb;
      r[at++] = (rates.k_r_mhz + rates.k_isc1_mhz - 1000.0 / targets[1]) / sd;
    }
    return r;
  };

  FitProblem problem;
  problem.residuals = residuals;
  std::array<double, 4> ini{100.0, 20.0, 200.0, 0.4};
  if (options.initial) ini = *options.initial;
  problem.initial =
      (Eigen::VectorXd(4) << ini[0], ini[1], ini[2], ini[3]).finished();
  problem.lower = (Eigen::VectorXd(4) << 0.0, 0.0, 0.0, 0.0).finished();
  problem.upper = (Eigen::VectorXd(4) << 1e6, 1e6, 1e6, 1.0).finished();
  FitResult fr = fit_least_squares(problem);

  // identifiability check on the Jacobian at the solution
  const Eigen::MatrixXd j =
      finite_difference_jacobian(residuals, fr.parameters);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  if (svd.singularValues()(0) <= 0.0 ||
      svd.singularValues()(3) < 1e-8 * svd.singularValues()(0)) {
    fr.flags.push_back("unidentifiable");
  }

  PulseDynResult out;
  out.k_r_mhz = fr.parameters[0];
  out.k_isc0_mhz = fr.parameters[1];
  out.k_isc1_mhz = fr.parameters[2];
  out.q0 = fr.parameters[3];
  out.errors = {fr.std_errors[0], fr.std_errors[1], fr.std_errors[2],
                fr.std_errors[3]};
  out.detail = std::move(fr);
  return out;
}

}  // namespace nvsim
