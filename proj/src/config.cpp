#include "nvsim/config.hpp"

#include <fstream>
#include <set>

#include "nvsim/errors.hpp"
#include "nvsim/presets.hpp"

namespace nvsim {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw SchemaError(path + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw SchemaError(path + ": unknown key '" + key + "'");
  }
}

double num(const json& obj, const std::string& path, const char* key,
           double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw SchemaError(path + "." + key + ": expected number");
  return v.get<double>();
}

int integer(const json& obj, const std::string& path, const char* key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer())
    throw SchemaError(path + "." + key + ": expected integer");
  return v.get<int>();
}

std::string str(const json& obj, const std::string& path, const char* key,
                const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw SchemaError(path + "." + key + ": expected string");
  return v.get<std::string>();
}

template <size_t N>
std::array<double, N> fixed_array(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != N)
    throw SchemaError(where + ": expected array of " + std::to_string(N) +
                      " numbers");
  std::array<double, N> out{};
  for (size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw SchemaError(where + ": expected numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

std::complex<double> complex_value(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw SchemaError(where + ": expected number or [re, im]");
}

CouplingModel coupling_model_from(const json& obj, const std::string& path) {
  check_keys(obj, path, {"g41", "g43", "g15", "g16", "g25", "g26", "d0_ghz"});
  CouplingModel m;
  m.g41 = num(obj, path, "g41", 0.0);
  m.g43 = num(obj, path, "g43", 0.0);
  m.g15 = num(obj, path, "g15", 0.0);
  m.g16 = num(obj, path, "g16", 0.0);
  m.g25 = num(obj, path, "g25", 0.0);
  m.g26 = num(obj, path, "g26", 0.0);
  m.d0_ghz = num(obj, path, "d0_ghz", 0.0);
  return m;
}

json coupling_model_json(const CouplingModel& m) {
  return {{"g41", m.g41}, {"g43", m.g43}, {"g15", m.g15}, {"g16", m.g16},
          {"g25", m.g25}, {"g26", m.g26}, {"d0_ghz", m.d0_ghz}};
}

json complex_json(const std::complex<double>& c) {
  if (c.imag() == 0.0) return c.real();
  return json::array({c.real(), c.imag()});
}

}  // namespace

HamiltonianCouplings RunConfig::effective_es_couplings() const {
  if (es_couplings) return *es_couplings;
  if (es_model) {
    StressTensor sigma{stress_gpa[0], stress_gpa[1], stress_gpa[2],
                       stress_gpa[3], stress_gpa[4], stress_gpa[5]};
    if (stress_frame == "lab") sigma = rotate_to_nv_frame(sigma);
    return couple(sigma, *es_model);
  }
  throw SchemaError(
      "config: need either es_couplings or coupling_model.es (or a preset)");
}

HamiltonianCouplings RunConfig::effective_gs_couplings() const {
  if (gs_model) {
    StressTensor sigma{stress_gpa[0], stress_gpa[1], stress_gpa[2],
                       stress_gpa[3], stress_gpa[4], stress_gpa[5]};
    if (stress_frame == "lab") sigma = rotate_to_nv_frame(sigma);
    return couple(sigma, *gs_model);
  }
  return {gs_d_ghz, {0.0, 0.0}, {0.0, 0.0}};
}

void RunConfig::apply_preset(const std::string& name) {
  const SitePreset& p = site_preset(name);
  preset_name = p.name;
  gs_d_ghz = p.gs_d_ghz;
  es_couplings = p.es_couplings();
  photodynamics.k_r_mhz = p.k_r_mhz;
  photodynamics.k_isc0_mhz = p.k_isc0_mhz;
  photodynamics.k_isc1_mhz = p.k_isc1_mhz;
  photodynamics.q0 = p.q0;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  check_keys(j, "config",
             {"preset", "coupling_model", "es_couplings", "gs_d_ghz", "stress",
              "hamiltonian", "photodynamics", "sweep", "mw_sweep", "pulses",
              "decay", "map", "fit", "output", "seed"});

  if (j.contains("preset")) {
    if (!j.at("preset").is_string())
      throw SchemaError("config.preset: expected string");
    c.apply_preset(j.at("preset").get<std::string>());
  }

  if (j.contains("coupling_model")) {
    const auto& cm = j.at("coupling_model");
    check_keys(cm, "coupling_model", {"gs", "es"});
    if (cm.contains("gs"))
      c.gs_model = coupling_model_from(cm.at("gs"), "coupling_model.gs");
    if (cm.contains("es"))
      c.es_model = coupling_model_from(cm.at("es"), "coupling_model.es");
  }

  if (j.contains("es_couplings")) {
    const auto& ec = j.at("es_couplings");
    check_keys(ec, "es_couplings", {"d_ghz", "e1_ghz", "e2_ghz"});
    HamiltonianCouplings hc;
    hc.d_ghz = num(ec, "es_couplings", "d_ghz", 0.0);
    if (ec.contains("e1_ghz"))
      hc.e1_ghz = complex_value(ec.at("e1_ghz"), "es_couplings.e1_ghz");
    if (ec.contains("e2_ghz"))
      hc.e2_ghz = complex_value(ec.at("e2_ghz"), "es_couplings.e2_ghz");
    c.es_couplings = hc;
  }

  c.gs_d_ghz = num(j, "config", "gs_d_ghz", c.gs_d_ghz);

  if (j.contains("stress")) {
    const auto& st = j.at("stress");
    check_keys(st, "stress", {"tensor_gpa", "frame"});
    if (st.contains("tensor_gpa"))
      c.stress_gpa = fixed_array<6>(st.at("tensor_gpa"), "stress.tensor_gpa");
    c.stress_frame = str(st, "stress", "frame", "nv");
    if (c.stress_frame != "nv" && c.stress_frame != "lab")
      throw SchemaError("stress.frame: expected 'nv' or 'lab'");
  }

  if (j.contains("hamiltonian")) {
    const auto& h = j.at("hamiltonian");
    check_keys(h, "hamiltonian", {"bz_G", "gamma_e_mhz_per_g"});
    c.bz_G = num(h, "hamiltonian", "bz_G", c.bz_G);
    c.gamma_e_mhz_per_g =
        num(h, "hamiltonian", "gamma_e_mhz_per_g", c.gamma_e_mhz_per_g);
  }

  if (j.contains("photodynamics")) {
    const auto& p = j.at("photodynamics");
    check_keys(p, "photodynamics",
               {"eta", "k_r_mhz", "k_isc0_mhz", "k_isc1_mhz", "q0",
                "tau_singlet_ns", "pulse_spacing_ns", "mw_rate_mhz",
                "linewidth_mhz"});
    auto& ph = c.photodynamics;
    ph.eta = num(p, "photodynamics", "eta", ph.eta);
    ph.k_r_mhz = num(p, "photodynamics", "k_r_mhz", ph.k_r_mhz);
    ph.k_isc0_mhz = num(p, "photodynamics", "k_isc0_mhz", ph.k_isc0_mhz);
    ph.k_isc1_mhz = num(p, "photodynamics", "k_isc1_mhz", ph.k_isc1_mhz);
    ph.q0 = num(p, "photodynamics", "q0", ph.q0);
    ph.tau_singlet_ns =
        num(p, "photodynamics", "tau_singlet_ns", ph.tau_singlet_ns);
    ph.pulse_spacing_ns =
        num(p, "photodynamics", "pulse_spacing_ns", ph.pulse_spacing_ns);
    c.mw_rate_mhz = num(p, "photodynamics", "mw_rate_mhz", c.mw_rate_mhz);
    c.linewidth_mhz = num(p, "photodynamics", "linewidth_mhz", c.linewidth_mhz);
    ph.validate();
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, "sweep",
               {"start_G", "stop_G", "steps", "freq_noise_ghz", "tau_rel_noise"});
    c.sweep.start_G = num(s, "sweep", "start_G", c.sweep.start_G);
    c.sweep.stop_G = num(s, "sweep", "stop_G", c.sweep.stop_G);
    c.sweep.steps = integer(s, "sweep", "steps", c.sweep.steps);
    c.sweep.freq_noise_ghz =
        num(s, "sweep", "freq_noise_ghz", c.sweep.freq_noise_ghz);
    c.sweep.tau_rel_noise =
        num(s, "sweep", "tau_rel_noise", c.sweep.tau_rel_noise);
    if (c.sweep.steps < 2) throw SchemaError("sweep.steps: need >= 2");
  }

  if (j.contains("mw_sweep")) {
    const auto& s = j.at("mw_sweep");
    check_keys(s, "mw_sweep", {"start_ghz", "stop_ghz", "points"});
    c.mw_sweep.start_ghz = num(s, "mw_sweep", "start_ghz", c.mw_sweep.start_ghz);
    c.mw_sweep.stop_ghz = num(s, "mw_sweep", "stop_ghz", c.mw_sweep.stop_ghz);
    c.mw_sweep.points = integer(s, "mw_sweep", "points", c.mw_sweep.points);
    if (c.mw_sweep.points < 2) throw SchemaError("mw_sweep.points: need >= 2");
  }

  if (j.contains("pulses")) {
    const auto& s = j.at("pulses");
    check_keys(s, "pulses", {"count", "initial", "swap_pair", "p4_noise"});
    c.pulses.count = integer(s, "pulses", "count", c.pulses.count);
    c.pulses.initial = str(s, "pulses", "initial", c.pulses.initial);
    c.pulses.swap_pair = str(s, "pulses", "swap_pair", c.pulses.swap_pair);
    c.pulses.p4_noise = num(s, "pulses", "p4_noise", c.pulses.p4_noise);
    if (c.pulses.count < 0) throw SchemaError("pulses.count: need >= 0");
    const std::set<std::string> kinds{"steady", "swapped", "thermal", "zero"};
    if (!kinds.count(c.pulses.initial))
      throw SchemaError("pulses.initial: expected steady|swapped|thermal|zero");
  }

  if (j.contains("decay")) {
    const auto& s = j.at("decay");
    check_keys(s, "decay", {"t_max_ns", "points", "peak_counts", "initial"});
    c.decay.t_max_ns = num(s, "decay", "t_max_ns", c.decay.t_max_ns);
    c.decay.points = integer(s, "decay", "points", c.decay.points);
    c.decay.peak_counts = num(s, "decay", "peak_counts", c.decay.peak_counts);
    c.decay.initial = str(s, "decay", "initial", c.decay.initial);
    if (c.decay.points < 2) throw SchemaError("decay.points: need >= 2");
    if (c.decay.initial != "steady" && c.decay.initial != "thermal")
      throw SchemaError("decay.initial: expected steady|thermal");
  }

  if (j.contains("map")) {
    const auto& s = j.at("map");
    check_keys(s, "map",
               {"x_start_um", "x_stop_um", "points", "x0_um", "width_um",
                "baseline_gpa", "delta_gpa", "psf_fwhm_um", "resonance_pair"});
    c.map.x_start_um = num(s, "map", "x_start_um", c.map.x_start_um);
    c.map.x_stop_um = num(s, "map", "x_stop_um", c.map.x_stop_um);
    c.map.points = integer(s, "map", "points", c.map.points);
    c.map.x0_um = num(s, "map", "x0_um", c.map.x0_um);
    c.map.width_um = num(s, "map", "width_um", c.map.width_um);
    if (s.contains("baseline_gpa"))
      c.map.baseline_gpa = fixed_array<6>(s.at("baseline_gpa"), "map.baseline_gpa");
    if (s.contains("delta_gpa"))
      c.map.delta_gpa = fixed_array<6>(s.at("delta_gpa"), "map.delta_gpa");
    c.map.psf_fwhm_um = num(s, "map", "psf_fwhm_um", c.map.psf_fwhm_um);
    c.map.resonance_pair =
        str(s, "map", "resonance_pair", c.map.resonance_pair);
    if (c.map.points < 2) throw SchemaError("map.points: need >= 2");
  }

  if (j.contains("fit")) {
    const auto& s = j.at("fit");
    check_keys(s, "fit",
               {"max_iterations", "objective_tol", "step_tol", "fixed_tau_ns",
                "joint_initial", "pulse_initial", "use_tau_constraint"});
    c.fit.max_iterations =
        integer(s, "fit", "max_iterations", c.fit.max_iterations);
    c.fit.objective_tol = num(s, "fit", "objective_tol", c.fit.objective_tol);
    c.fit.step_tol = num(s, "fit", "step_tol", c.fit.step_tol);
    if (s.contains("fixed_tau_ns"))
      c.fit.fixed_tau_ns = fixed_array<3>(s.at("fixed_tau_ns"), "fit.fixed_tau_ns");
    if (s.contains("joint_initial"))
      c.fit.joint_initial =
          fixed_array<3>(s.at("joint_initial"), "fit.joint_initial");
    if (s.contains("pulse_initial"))
      c.fit.pulse_initial =
          fixed_array<4>(s.at("pulse_initial"), "fit.pulse_initial");
    if (s.contains("use_tau_constraint")) {
      if (!s.at("use_tau_constraint").is_boolean())
        throw SchemaError("fit.use_tau_constraint: expected boolean");
      c.fit.use_tau_constraint = s.at("use_tau_constraint").get<bool>();
    }
  }

  if (j.contains("output")) {
    const auto& s = j.at("output");
    check_keys(s, "output", {"directory"});
    c.output_dir = str(s, "output", "directory", c.output_dir);
  }

  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      throw SchemaError("config.seed: expected integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }

  return c;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError("config parse error in '" + path + "': " + e.what());
  }
  return from_json(j);
}

json RunConfig::resolved_json() const {
  json j;
  if (!preset_name.empty()) j["preset"] = preset_name;
  if (gs_model || es_model) {
    json cm;
    if (gs_model) cm["gs"] = coupling_model_json(*gs_model);
    if (es_model) cm["es"] = coupling_model_json(*es_model);
    j["coupling_model"] = cm;
  }
  if (es_couplings) {
    j["es_couplings"] = {{"d_ghz", es_couplings->d_ghz},
                         {"e1_ghz", complex_json(es_couplings->e1_ghz)},
                         {"e2_ghz", complex_json(es_couplings->e2_ghz)}};
  }
  j["gs_d_ghz"] = gs_d_ghz;
  j["stress"] = {{"tensor_gpa", stress_gpa}, {"frame", stress_frame}};
  j["hamiltonian"] = {{"bz_G", bz_G}, {"gamma_e_mhz_per_g", gamma_e_mhz_per_g}};
  j["photodynamics"] = {{"eta", photodynamics.eta},
                        {"k_r_mhz", photodynamics.k_r_mhz},
                        {"k_isc0_mhz", photodynamics.k_isc0_mhz},
                        {"k_isc1_mhz", photodynamics.k_isc1_mhz},
                        {"q0", photodynamics.q0},
                        {"tau_singlet_ns", photodynamics.tau_singlet_ns},
                        {"pulse_spacing_ns", photodynamics.pulse_spacing_ns},
                        {"mw_rate_mhz", mw_rate_mhz},
                        {"linewidth_mhz", linewidth_mhz}};
  j["sweep"] = {{"start_G", sweep.start_G},
                {"stop_G", sweep.stop_G},
                {"steps", sweep.steps},
                {"freq_noise_ghz", sweep.freq_noise_ghz},
                {"tau_rel_noise", sweep.tau_rel_noise}};
  j["mw_sweep"] = {{"start_ghz", mw_sweep.start_ghz},
                   {"stop_ghz", mw_sweep.stop_ghz},
                   {"points", mw_sweep.points}};
  j["pulses"] = {{"count", pulses.count},
                 {"initial", pulses.initial},
                 {"swap_pair", pulses.swap_pair},
                 {"p4_noise", pulses.p4_noise}};
  j["decay"] = {{"t_max_ns", decay.t_max_ns},
                {"points", decay.points},
                {"peak_counts", decay.peak_counts},
                {"initial", decay.initial}};
  j["map"] = {{"x_start_um", map.x_start_um}, {"x_stop_um", map.x_stop_um},
              {"points", map.points},         {"x0_um", map.x0_um},
              {"width_um", map.width_um},     {"baseline_gpa", map.baseline_gpa},
              {"delta_gpa", map.delta_gpa},   {"psf_fwhm_um", map.psf_fwhm_um},
              {"resonance_pair", map.resonance_pair}};
  json fitj = {{"max_iterations", fit.max_iterations},
               {"objective_tol", fit.objective_tol},
               {"step_tol", fit.step_tol},
               {"use_tau_constraint", fit.use_tau_constraint}};
  if (fit.fixed_tau_ns) fitj["fixed_tau_ns"] = *fit.fixed_tau_ns;
  if (fit.joint_initial) fitj["joint_initial"] = *fit.joint_initial;
  if (fit.pulse_initial) fitj["pulse_initial"] = *fit.pulse_initial;
  j["fit"] = fitj;
  j["output"] = {{"directory", output_dir}};
  j["seed"] = seed;
  return j;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::hash() const {
  const std::uint64_t h = fnv1a64(resolved_json().dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

const char* config_schema_json() {
  return R"JSON({
  "preset": "string: I | IV | ambient",
  "coupling_model": {
    "gs": {"g41": "number MHz/GPa", "g43": "number", "g15": "number",
            "g16": "number", "g25": "number", "g26": "number",
            "d0_ghz": "number"},
    "es": {"g41": "number MHz/GPa", "g43": "number", "g15": "number",
            "g16": "number", "g25": "number", "g26": "number",
            "d0_ghz": "number"}
  },
  "es_couplings": {"d_ghz": "number", "e1_ghz": "number | [re, im]",
                    "e2_ghz": "number | [re, im]"},
  "gs_d_ghz": "number",
  "stress": {"tensor_gpa": "[xx, yy, zz, xy, xz, yz]", "frame": "nv | lab"},
  "hamiltonian": {"bz_G": "number", "gamma_e_mhz_per_g": "number"},
  "photodynamics": {"eta": "number in [0,1]", "k_r_mhz": "number",
                     "k_isc0_mhz": "number", "k_isc1_mhz": "number",
                     "q0": "number in [0,1]", "tau_singlet_ns": "number",
                     "pulse_spacing_ns": "number", "mw_rate_mhz": "number",
                     "linewidth_mhz": "number"},
  "sweep": {"start_G": "number", "stop_G": "number", "steps": "integer",
             "freq_noise_ghz": "number", "tau_rel_noise": "number"},
  "mw_sweep": {"start_ghz": "number", "stop_ghz": "number", "points": "integer"},
  "pulses": {"count": "integer", "initial": "steady | swapped | thermal | zero",
              "swap_pair": "zero_plus | zero_minus | plus_minus",
              "p4_noise": "number"},
  "decay": {"t_max_ns": "number", "points": "integer", "peak_counts": "number",
             "initial": "steady | thermal"},
  "map": {"x_start_um": "number", "x_stop_um": "number", "points": "integer",
           "x0_um": "number", "width_um": "number",
           "baseline_gpa": "[6 numbers]", "delta_gpa": "[6 numbers]",
           "psf_fwhm_um": "number", "resonance_pair": "string"},
  "fit": {"max_iterations": "integer", "objective_tol": "number",
           "step_tol": "number", "fixed_tau_ns": "[3 numbers]",
           "joint_initial": "[3 numbers]", "pulse_initial": "[4 numbers]",
           "use_tau_constraint": "boolean"},
  "output": {"directory": "string"},
  "seed": "integer"
})JSON";
}

}  // namespace nvsim
