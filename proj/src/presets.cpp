#include "nvsim/presets.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace nvsim {

PhotoRateParams SitePreset::rates(double eta, double tau_singlet_ns,
                                  double pulse_spacing_ns) const {
  PhotoRateParams r;
  r.eta = eta;
  r.k_r_mhz = k_r_mhz;
  r.k_isc0_mhz = k_isc0_mhz;
  r.k_isc1_mhz = k_isc1_mhz;
  r.q0 = q0;
  r.tau_singlet_ns = tau_singlet_ns;
  r.pulse_spacing_ns = pulse_spacing_ns;
  return r;
}

const std::vector<SitePreset>& all_presets() {
  static const std::vector<SitePreset> presets = [] {
    std::vector<SitePreset> p(3);

    // Site I: symmetry-preserving strain environment near the chamber
    // center. The ground-state splitting is the measured resonance at full
    // pressure.
    p[0].name = "I";
    p[0].gs_d_ghz = 3.79;
    p[0].es_d_ghz = 0.85;  p[0].es_d_err = 0.01;
    p[0].es_e1_ghz = 0.09; p[0].es_e1_err = 0.01;
    p[0].es_e2_ghz = 0.16; p[0].es_e2_err = 0.02;
    p[0].tau_bright_ns = 6.12; p[0].tau_bright_err = 0.02;
    p[0].tau_dark_ns = 2.05;   p[0].tau_dark_err = 0.01;
    p[0].k_r_mhz = 132.0;   p[0].k_r_err = 2.0;
    p[0].k_isc0_mhz = 32.0; p[0].k_isc0_err = 2.0;
    p[0].k_isc1_mhz = 357.0; p[0].k_isc1_err = 3.0;
    p[0].q0 = 0.39; p[0].q0_err = 0.01;

    // Site IV: strongly symmetry-breaking environment near the
    // metal-powder interface. The ground-state splitting is not separately
    // tabulated; the site-I value at the same pressure is used for
    // resonance placement.
    p[1].name = "IV";
    p[1].gs_d_ghz = 3.79;
    p[1].es_d_ghz = 0.80;  p[1].es_d_err = 0.06;
    p[1].es_e1_ghz = 0.25; p[1].es_e1_err = 0.04;
    p[1].es_e2_ghz = 1.19; p[1].es_e2_err = 0.03;
    p[1].tau_bright_ns = 6.59; p[1].tau_bright_err = 0.03;
    p[1].tau_dark_ns = 2.32;   p[1].tau_dark_err = 0.03;
    p[1].k_r_mhz = 150.0;  p[1].k_r_err = 1.0;
    p[1].k_isc0_mhz = 2.0; p[1].k_isc0_err = 1.0;
    p[1].k_isc1_mhz = 282.0; p[1].k_isc1_err = 6.0;
    p[1].q0 = 0.21; p[1].q0_err = 0.01;

    // Unstrained reference emitter at ambient pressure.
    p[2].name = "ambient";
    p[2].gs_d_ghz = 2.87;
    p[2].es_d_ghz = 1.4;
    p[2].es_e1_ghz = 0.0;
    p[2].es_e2_ghz = 0.0;
    p[2].tau_bright_ns = 13.7;
    p[2].tau_dark_ns = 8.6;
    p[2].k_r_mhz = 67.7;   p[2].k_r_err = 3.4;
    p[2].k_isc0_mhz = 6.4; p[2].k_isc0_err = 2.3;
    p[2].k_isc1_mhz = 50.7; p[2].k_isc1_err = 4.4;
    p[2].q0 = 0.54; p[2].q0_err = 0.22;

    return p;
  }();
  return presets;
}

const SitePreset& site_preset(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (key.rfind("site-", 0) == 0) key = key.substr(5);
  if (key.rfind("site", 0) == 0) key = key.substr(4);
  for (const auto& p : all_presets()) {
    std::string pname = p.name;
    std::transform(pname.begin(), pname.end(), pname.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (key == pname) return p;
  }
  if (key == "1" || key == "i") return all_presets()[0];
  if (key == "4" || key == "iv") return all_presets()[1];
  throw std::invalid_argument("unknown site preset: " + std::string(name));
}

}  // namespace nvsim
