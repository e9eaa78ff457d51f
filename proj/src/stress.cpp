#include "nvsim/stress.hpp"

#include <cmath>
#include <stdexcept>

namespace nvsim {

namespace {

void check_finite(const StressTensor& s, const char* who) {
  if (!s.is_finite()) {
    throw std::invalid_argument(std::string(who) +
                                ": stress tensor has non-finite components");
  }
}

}  // namespace

Eigen::Matrix3d StressTensor::matrix() const {
  Eigen::Matrix3d m;
  m << xx, xy, xz,
       xy, yy, yz,
       xz, yz, zz;
  return m;
}

StressTensor StressTensor::from_matrix(const Eigen::Matrix3d& m, double tol) {
  const double scale = std::max(1.0, m.norm());
  if ((m - m.transpose()).norm() > tol * scale) {
    throw std::invalid_argument("StressTensor::from_matrix: input not symmetric");
  }
  return {m(0, 0), m(1, 1), m(2, 2),
          0.5 * (m(0, 1) + m(1, 0)),
          0.5 * (m(0, 2) + m(2, 0)),
          0.5 * (m(1, 2) + m(2, 1))};
}

bool StressTensor::is_finite() const {
  return std::isfinite(xx) && std::isfinite(yy) && std::isfinite(zz) &&
         std::isfinite(xy) && std::isfinite(xz) && std::isfinite(yz);
}

StressTensor StressTensor::operator+(const StressTensor& o) const {
  return {xx + o.xx, yy + o.yy, zz + o.zz, xy + o.xy, xz + o.xz, yz + o.yz};
}

StressTensor StressTensor::operator-(const StressTensor& o) const {
  return {xx - o.xx, yy - o.yy, zz - o.zz, xy - o.xy, xz - o.xz, yz - o.yz};
}

StressTensor StressTensor::operator*(double s) const {
  return {xx * s, yy * s, zz * s, xy * s, xz * s, yz * s};
}

StressDecomposition decompose(const StressTensor& sigma) {
  check_finite(sigma, "decompose");
  const double sm = sigma.mean_inplane();
  StressDecomposition d;
  d.preserving = {sm, sm, sigma.zz, 0.0, 0.0, 0.0};
  d.breaking = sigma - d.preserving;
  return d;
}

HamiltonianCouplings couple(const StressTensor& sigma,
                            const CouplingModel& model) {
  check_finite(sigma, "couple");
  const double sm = sigma.mean_inplane();
  const double sd = sigma.deviatoric_inplane();
  // g_ij are MHz/GPa, Hamiltonian couplings are GHz
  constexpr double mhz = 1e-3;
  HamiltonianCouplings c;
  c.d_ghz = model.d0_ghz + mhz * (model.g41 * sm + model.g43 * sigma.zz);
  c.e1_ghz = {mhz * (model.g26 * sigma.xz - model.g25 * sd),
              -mhz * (model.g26 * sigma.yz + model.g25 * sigma.xy)};
  c.e2_ghz = {mhz * (model.g16 * sigma.xz - model.g15 * sd),
              -mhz * (model.g16 * sigma.yz + model.g15 * sigma.xy)};
  return c;
}

Eigen::Matrix3d nv_frame_rotation() {
  Eigen::Matrix3d r;
  r.row(0) = Eigen::Vector3d(-1.0, 1.0, 0.0).normalized();   // x || [-110]
  r.row(1) = Eigen::Vector3d(-1.0, -1.0, 2.0).normalized();  // y || [-1-12]
  r.row(2) = Eigen::Vector3d(1.0, 1.0, 1.0).normalized();    // z || [111]
  return r;
}

StressTensor rotate_to_nv_frame(const StressTensor& sigma_lab) {
  check_finite(sigma_lab, "rotate_to_nv_frame");
  const Eigen::Matrix3d r = nv_frame_rotation();
  const Eigen::Matrix3d m = r * sigma_lab.matrix() * r.transpose();
  // the product of a rotation with a symmetric matrix stays symmetric up to
  // rounding; symmetrize instead of rejecting
  return StressTensor::from_matrix(0.5 * (m + m.transpose()), 1.0);
}

}  // namespace nvsim
