// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are fixed here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nvsim/fits.hpp"
#include "nvsim/hamiltonian.hpp"
#include "nvsim/mapping.hpp"
#include "nvsim/photodynamics.hpp"
#include "nvsim/presets.hpp"
#include "nvsim/stress.hpp"
#include "oracles.hpp"

using namespace nvsim;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void expect(Outcome& o, bool ok, const std::string& what) {
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += (ok ? "" : "FAILED: ") + what;
  o.pass = o.pass && ok;
}

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

EigenSolution pure_solution() {
  return eigensolve(build({2.87, {0, 0}, {0, 0}}, 0.0));
}

EigenSolution site_solution(const char* name, double bz = 0.0) {
  return eigensolve(build(site_preset(name).es_couplings(), bz));
}

// --------------------------------------------------------------------------
// 1. tabulated lifetimes reproduced by the rate sums

Outcome criterion1() {
  Outcome o;
  struct Row {
    const char* site;
    double tol;
  };
  const auto sol = pure_solution();
  for (const Row& row : {Row{"I", 0.015}, Row{"IV", 0.015},
                         Row{"ambient", 0.025}}) {
    const SitePreset& p = site_preset(row.site);
    const auto tau = effective_lifetimes_ns(sol, p.rates().lifetime_model());
    const double bright = tau[sol.bright_index()];
    const double dark = tau[sol.dark_indices()[0]];
    const double rb = std::abs(bright - p.tau_bright_ns) / p.tau_bright_ns;
    const double rd = std::abs(dark - p.tau_dark_ns) / p.tau_dark_ns;
    expect(o, rb <= row.tol,
           std::string(row.site) + ": bright " + fmt(bright) + " vs " +
               fmt(p.tau_bright_ns) + " (" + fmt(100 * rb, 2) + "%)");
    expect(o, rd <= row.tol,
           std::string(row.site) + ": dark " + fmt(dark) + " vs " +
               fmt(p.tau_dark_ns) + " (" + fmt(100 * rd, 2) + "%)");
  }
  return o;
}

// --------------------------------------------------------------------------
// 2. zero-field pair splitting under the strong-E2 couplings

Outcome criterion2() {
  Outcome o;
  const SitePreset& p = site_preset("IV");
  for (double s1 : {1.0, -1.0}) {
    for (double s2 : {1.0, -1.0}) {
      const HamiltonianCouplings c{p.es_d_ghz,
                                   {s1 * p.es_e1_ghz, 0.0},
                                   {s2 * p.es_e2_ghz, 0.0}};
      const double split = upper_pair_splitting_ghz(eigensolve(build(c, 0.0)));
      expect(o, split >= 2.38 && split <= 2.65,
             "splitting(" + fmt(s1 * p.es_e1_ghz, 3) + "," +
                 fmt(s2 * p.es_e2_ghz, 3) + ") = " + fmt(split));
    }
  }
  return o;
}

// --------------------------------------------------------------------------
// 3. polarization reversal between the two strain environments

Outcome criterion3() {
  Outcome o;
  const auto ss1 = steady_state(site_solution("I"), site_preset("I").rates());
  expect(o, ss1.post_pulse_p4 > 0.5 &&
                std::abs(ss1.post_pulse_p4 - 0.69) <= 0.10,
         "site I post-pulse P4 = " + fmt(ss1.post_pulse_p4) +
             " (want > 0.5 and 0.69 +- 0.10)");
  const auto ss4 =
      steady_state(site_solution("IV"), site_preset("IV").rates());
  expect(o, ss4.post_pulse_p4 < 0.5 &&
                std::abs(ss4.post_pulse_p4 - 0.31) <= 0.10,
         "site IV post-pulse P4 = " + fmt(ss4.post_pulse_p4) +
             " (want < 0.5 and 0.31 +- 0.10)");
  return o;
}

// --------------------------------------------------------------------------
// 4. contrast sign map

Outcome criterion4() {
  Outcome o;
  const double c1 = cw_contrast(site_solution("I", 0.0),
                                site_preset("I").rates(), 5.0,
                                GroundPair::kZeroPlus);
  expect(o, c1 < 0.0, "site I at 0 G: " + fmt(c1));
  const double c4a = cw_contrast(site_solution("IV", 0.0),
                                 site_preset("IV").rates(), 5.0,
                                 GroundPair::kZeroPlus);
  expect(o, c4a > 0.0, "site IV at 0 G: " + fmt(c4a));
  const double c4b = cw_contrast(site_solution("IV", 152.0),
                                 site_preset("IV").rates(), 5.0,
                                 GroundPair::kZeroPlus);
  expect(o, c4b < 0.0, "site IV at 152 G: " + fmt(c4b));
  return o;
}

// --------------------------------------------------------------------------
// 5. magnetic purification along a 0..800 G sweep

Outcome criterion5() {
  Outcome o;
  const SitePreset& p = site_preset("IV");
  const LifetimeModel lm = p.rates().lifetime_model();
  const double tau_bright_pure = 1000.0 / (p.k_r_mhz + p.k_isc0_mhz);
  const double tau_dark_pure = 1000.0 / (p.k_r_mhz + p.k_isc1_mhz);

  double m4_first = 0.0, m4_last = 0.0;
  bool monotone = true;
  double previous = -1.0;
  std::array<double, 3> tau_top{};
  EigenSolution sol_top;
  for (double bz : linspace(0, 800, 81)) {
    const auto sol = site_solution("IV", bz);
    const double m4 = sol.mixing[sol.bright_index()];
    if (previous < 0) m4_first = m4;
    if (m4 + 1e-12 < previous) monotone = false;
    previous = m4;
    m4_last = m4;
    if (bz == 800.0) {
      sol_top = sol;
      tau_top = effective_lifetimes_ns(sol, lm);
    }
  }
  const double rb = std::abs(tau_top[sol_top.bright_index()] -
                             tau_bright_pure) / tau_bright_pure;
  expect(o, rb <= 0.01,
         "tau_bright(800 G) = " + fmt(tau_top[sol_top.bright_index()]) +
             " vs asymptote " + fmt(tau_bright_pure) + " (" +
             fmt(100 * rb, 3) + "%)");
  for (int dark : sol_top.dark_indices()) {
    const double rd = std::abs(tau_top[dark] - tau_dark_pure) / tau_dark_pure;
    expect(o, rd <= 0.01,
           "tau_dark(800 G) = " + fmt(tau_top[dark]) + " vs asymptote " +
               fmt(tau_dark_pure) + " (" + fmt(100 * rd, 3) + "%)");
  }
  expect(o, monotone && m4_last > m4_first,
         "m4 rises monotonically " + fmt(m4_first) + " -> " + fmt(m4_last));
  return o;
}

// --------------------------------------------------------------------------
// 6. reversal-point localization on a synthetic ramp

Outcome criterion6() {
  Outcome o;
  // shear-coupled model: sigma_xz = 100 GPa -> (E1, E2) = (0.25, 1.19) GHz
  CouplingModel model;
  model.d0_ghz = 0.80;
  model.g26 = 2.5;
  model.g16 = 11.9;
  const auto rates = site_preset("IV").rates();
  const auto contrast_at = [&](double scale) {
    StressTensor s;
    s.xz = 100.0 * scale;
    return cw_contrast(eigensolve(build(couple(s, model), 0.0)), rates, 5.0,
                       GroundPair::kZeroPlus);
  };

  // bracket the contrast reversal threshold in the strain scale
  double lo = 0.3, hi = 1.0;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (contrast_at(mid) < 0 ? lo : hi) = mid;
  }
  const double s_star = 0.5 * (lo + hi);

  // logistic ramp crossing the threshold exactly at its center
  StressTensor baseline, delta;
  baseline.xz = 100.0 * (s_star - 0.1);
  delta.xz = 100.0 * 0.2;
  const auto profile = StrainProfile::logistic_ramp(7.1, 8.0, 901, 7.55, 0.03,
                                                    baseline, delta);
  const auto cp = profile_contrast(profile, model, rates, 0.0, 5.0,
                                   GroundPair::kZeroPlus, 0.0);
  const auto rev = find_reversal(cp, false);
  if (rev.crossings.size() != 1) {
    expect(o, false, "expected a single crossing, got " +
                         std::to_string(rev.crossings.size()));
    return o;
  }
  const double x_rev = rev.crossings[0].x_um;
  const double width = rev.crossings[0].width_um;
  expect(o, x_rev >= 7.49 && x_rev <= 7.61,
         "crossing at " + fmt(x_rev, 5) + " um");
  expect(o, width <= 0.12, "pre-PSF width = " + fmt(width, 3) + " um");

  // symmetric profile: the 0.55 um PSF may not move the crossing
  const auto x = linspace(7.0, 8.1, 1101);
  std::vector<double> sym;
  sym.reserve(x.size());
  for (double xv : x) sym.push_back(0.02 * std::tanh((xv - 7.55) / 0.03));
  const auto before = find_reversal(x, sym);
  const auto after = find_reversal(x, gaussian_convolve(x, sym, 0.55));
  const double shift =
      std::abs(after.crossings[0].x_um - before.crossings[0].x_um);
  expect(o, shift < 0.010,
         "symmetric-profile PSF shift = " + fmt(1000 * shift, 3) + " nm");
  return o;
}

// --------------------------------------------------------------------------
// 7. inference round trips

JointEsData synthesize_joint(const HamiltonianCouplings& truth,
                             const LifetimeModel& lm,
                             const std::vector<double>& bzs, double rel_noise,
                             std::mt19937_64* rng) {
  JointEsData data;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double bz : bzs) {
    const auto f = es_branch_frequencies(truth, bz, kGyromagneticMHzPerG);
    for (double fk : f) {
      const double sigma = rel_noise * fk;
      double value = fk;
      if (rng && sigma > 0) value += sigma * gauss(*rng);
      data.freq_bz_G.push_back(bz);
      data.freq_ghz.push_back(value);
      if (rel_noise > 0) data.freq_err_ghz.push_back(sigma);
    }
    const auto tau = es_labeled_lifetimes(truth, bz, kGyromagneticMHzPerG, lm);
    std::array<double, 3> tval{}, terr{};
    for (int k = 0; k < 3; ++k) {
      terr[k] = rel_noise * tau[k];
      tval[k] = tau[k] + (rng && terr[k] > 0 ? terr[k] * gauss(*rng) : 0.0);
    }
    data.tau_bz_G.push_back(bz);
    data.tau_ns.push_back(tval);
    if (rel_noise > 0) data.tau_err_ns.push_back(terr);
  }
  return data;
}

Outcome criterion7() {
  Outcome o;
  const auto bzs = linspace(0, 800, 17);
  struct Site {
    const char* name;
    std::array<double, 3> truth;
    std::array<double, 3> table_err;
    LifetimeModel lm;
  };
  const std::vector<Site> sites{
      {"I", {0.85, 0.09, 0.16}, {0.01, 0.01, 0.02}, {132, 32, 357}},
      {"IV", {0.80, 0.25, 1.19}, {0.06, 0.04, 0.03}, {150, 2, 282}}};

  // noiseless recovery to 1e-4 relative
  for (const auto& site : sites) {
    const HamiltonianCouplings truth{site.truth[0],
                                     {site.truth[1], 0},
                                     {site.truth[2], 0}};
    const auto data = synthesize_joint(truth, site.lm, bzs, 0.0, nullptr);
    const auto r = fit_joint_es(data, {site.lm, kGyromagneticMHzPerG, {}});
    const double rel =
        std::max({std::abs(r.d_ghz - site.truth[0]) / site.truth[0],
                  std::abs(r.e1_ghz - site.truth[1]) / site.truth[1],
                  std::abs(r.e2_ghz - site.truth[2]) / site.truth[2]});
    expect(o, rel <= 1e-4, std::string("site ") + site.name +
                               " noiseless max rel err = " + fmt(rel, 2));
  }

  // 100 noisy trials per site: 3-sigma coverage of the fit's own errors and
  // agreement with the tabulated uncertainties
  std::mt19937_64 rng(2024);
  for (const auto& site : sites) {
    const HamiltonianCouplings truth{site.truth[0],
                                     {site.truth[1], 0},
                                     {site.truth[2], 0}};
    int cover_self = 0, cover_table = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto data = synthesize_joint(truth, site.lm, bzs, 0.01, &rng);
      const auto r = fit_joint_es(data, {site.lm, kGyromagneticMHzPerG, {}});
      const std::array<double, 3> fit{r.d_ghz, r.e1_ghz, r.e2_ghz};
      const std::array<double, 3> err{r.d_err, r.e1_err, r.e2_err};
      bool in_self = true, in_table = true;
      for (int k = 0; k < 3; ++k) {
        in_self = in_self && std::abs(fit[k] - site.truth[k]) <= 3 * err[k];
        in_table = in_table &&
                   std::abs(fit[k] - site.truth[k]) <= 3 * site.table_err[k];
      }
      cover_self += in_self;
      cover_table += in_table;
    }
    expect(o, cover_self >= 90,
           std::string("site ") + site.name + " 3-sigma self coverage " +
               std::to_string(cover_self) + "/100");
    expect(o, cover_table >= 90,
           std::string("site ") + site.name + " within 3x table errors " +
               std::to_string(cover_table) + "/100");
  }

  // pulse-dynamics recovery within 5% under 2% trajectory noise
  {
    const SitePreset& p = site_preset("I");
    const auto sol = site_solution("I");
    const auto rates = p.rates();
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<PulseTrajectory> data;
    for (auto init : {PulseTrajectory::Init::kSteadyState,
                      PulseTrajectory::Init::kPiSwapped}) {
      const auto model =
          pulse_trajectory_model(sol, rates, init, GroundPair::kZeroPlus, 40);
      PulseTrajectory tr;
      tr.init = init;
      for (int n = 0; n < 40; ++n) {
        tr.pulse_index.push_back(n);
        tr.p4.push_back(model[n] + 0.02 * gauss(rng));
        tr.p4_err.push_back(0.02);
      }
      data.push_back(std::move(tr));
    }
    PulseDynOptions options;
    options.sol = sol;
    options.eta = rates.eta;
    options.tau_targets_ns = {{p.tau_bright_ns, p.tau_dark_ns}};
    options.tau_target_errs_ns = {{p.tau_bright_err, p.tau_dark_err}};
    const auto r = fit_pulse_dynamics(data, options);
    const std::array<double, 4> truth{132, 32, 357, 0.39};
    const std::array<double, 4> fit{r.k_r_mhz, r.k_isc0_mhz, r.k_isc1_mhz,
                                    r.q0};
    double rel = 0.0;
    for (int k = 0; k < 4; ++k)
      rel = std::max(rel, std::abs(fit[k] - truth[k]) / truth[k]);
    expect(o, rel <= 0.05,
           "pulse-dynamics max rel err = " + fmt(rel, 3) + " (k_r " +
               fmt(fit[0]) + ", k_isc0 " + fmt(fit[1]) + ", k_isc1 " +
               fmt(fit[2]) + ", q0 " + fmt(fit[3]) + ")");
  }
  return o;
}

// --------------------------------------------------------------------------
// 8. conservation and oracle suite

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> uc(-3.0, 3.0);
  std::uniform_real_distribution<double> ub(0.0, 800.0);

  double worst_total = 0.0;
  for (int block = 0; block < 100; ++block) {
    // fresh physics every hundred applications
    const HamiltonianCouplings c{uc(rng), {uc(rng), uc(rng)},
                                 {uc(rng), uc(rng)}};
    const EigenSolution sol = eigensolve(build(c, ub(rng)));
    PhotoRateParams rates;
    rates.eta = 0.05 + 0.95 * u(rng);
    rates.k_r_mhz = 20 + 300 * u(rng);
    rates.k_isc0_mhz = 400 * u(rng);
    rates.k_isc1_mhz = 400 * u(rng);
    rates.q0 = u(rng);

    double a = u(rng) + 1e-3, b = u(rng), cc = u(rng);
    const double t = a + b + cc;
    PopulationState state =
        PopulationState::ground_state(a / t, b / t, cc / t);
    for (int k = 0; k < 100; ++k) {
      state = pulse_step(state, sol, rates);
      worst_total = std::max(worst_total, std::abs(state.total() - 1.0));
    }
  }
  expect(o, worst_total <= 1e-12,
         "population drift after 1e4 pulse steps = " + fmt(worst_total, 2));

  double worst_eig = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const HamiltonianCouplings c{uc(rng), {uc(rng), uc(rng)},
                                 {uc(rng), uc(rng)}};
    const auto h = build(c, ub(rng));
    const auto sol = eigensolve(h);
    const auto roots = oracles::charpoly_eigenvalues(h.matrix());
    for (int k = 0; k < 3; ++k)
      worst_eig =
          std::max(worst_eig, std::abs(roots[k] - sol.energies_ghz[k]));
  }
  expect(o, worst_eig <= 1e-9,
         "max |eigensolver - charpoly oracle| = " + fmt(worst_eig, 2) +
             " GHz over 1000 matrices");

  double worst_stress = 0.0;
  std::uniform_real_distribution<double> us(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const StressTensor sigma{us(rng), us(rng), us(rng),
                             us(rng), us(rng), us(rng)};
    const auto d = decompose(sigma);
    const StressTensor sum = d.preserving + d.breaking;
    worst_stress = std::max(
        worst_stress, (sum.matrix() - sigma.matrix()).cwiseAbs().maxCoeff());
  }
  expect(o, worst_stress <= 1e-14,
         "max reassembly error over 1000 tensors = " + fmt(worst_stress, 2) +
             " GPa");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "tabulated lifetimes from rate sums", 1.0, criterion1},
      {2, "zero-field pair splitting in [2.38, 2.65] GHz", 1.0, criterion2},
      {3, "post-pulse polarization P4 per site", 5.0, criterion3},
      {4, "contrast sign map (0 G, 0 G, 152 G)", 5.0, criterion4},
      {5, "magnetic purification along 0..800 G", 5.0, criterion5},
      {6, "reversal-point localization", 5.0, criterion6},
      {7, "inference round trips", 60.0, criterion7},
      {8, "conservation and oracle suite", 10.0, criterion8},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (seconds > criterion.limit_seconds) {
      outcome.pass = false;
      outcome.detail += "; runtime " + fmt(seconds, 3) + " s over the " +
                        fmt(criterion.limit_seconds, 2) + " s limit";
    }
    std::printf("[%s] criterion %d (%.2f s): %s - %s\n",
                outcome.pass ? "PASS" : "FAIL", criterion.id, seconds,
                criterion.name, outcome.detail.c_str());
    failures += outcome.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
