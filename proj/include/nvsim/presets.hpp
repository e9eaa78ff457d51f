#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nvsim/hamiltonian.hpp"
#include "nvsim/photodynamics.hpp"

namespace nvsim {

// Calibrated parameter sets for two strain environments of the high-pressure
// sample (site I: symmetry-preserving, site IV: strongly symmetry-breaking)
// and the unstrained reference emitter. Values carry the standard errors of
// the measurements they came from; zero error means no error was quoted.
struct SitePreset {
  std::string name;

  double gs_d_ghz = 0.0;  // ground-state zero-field splitting at the site

  // Excited-state Hamiltonian couplings (moduli; phases taken real-positive).
  double es_d_ghz = 0.0, es_d_err = 0.0;
  double es_e1_ghz = 0.0, es_e1_err = 0.0;
  double es_e2_ghz = 0.0, es_e2_err = 0.0;

  // Excited-state lifetimes measured at high field (pure spin states).
  double tau_bright_ns = 0.0, tau_bright_err = 0.0;
  double tau_dark_ns = 0.0, tau_dark_err = 0.0;

  // Optical-cycle rates from the multi-pulse polarization fit.
  double k_r_mhz = 0.0, k_r_err = 0.0;
  double k_isc0_mhz = 0.0, k_isc0_err = 0.0;
  double k_isc1_mhz = 0.0, k_isc1_err = 0.0;
  double q0 = 0.0, q0_err = 0.0;

  HamiltonianCouplings es_couplings() const {
    return {es_d_ghz, {es_e1_ghz, 0.0}, {es_e2_ghz, 0.0}};
  }
  HamiltonianCouplings gs_couplings() const {
    return {gs_d_ghz, {0.0, 0.0}, {0.0, 0.0}};
  }
  PhotoRateParams rates(double eta = 0.9, double tau_singlet_ns = 250.0,
                        double pulse_spacing_ns = 2000.0) const;
};

// Accepts "I", "IV", "ambient" (case-insensitive, "site-I" style prefixes
// allowed). Throws std::invalid_argument for unknown names.
const SitePreset& site_preset(std::string_view name);

const std::vector<SitePreset>& all_presets();

}  // namespace nvsim
