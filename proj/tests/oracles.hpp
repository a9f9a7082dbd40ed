// Independent reference computations used only by the tests.

#ifndef XTINCT_TESTS_ORACLES_HPP_
#define XTINCT_TESTS_ORACLES_HPP_

#include "xtinct/lattice.hpp"
#include "xtinct/spacegroup.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

// Rows are the direct basis vectors in a Cartesian frame (a along x, b in xy).
inline Eigen::Matrix3d cartesian_basis(const xtinct::Lattice& p) {
  const double d = std::numbers::pi / 180;
  const double ca = std::cos(p.alpha * d), cb = std::cos(p.beta * d);
  const double cg = std::cos(p.gamma * d), sg = std::sin(p.gamma * d);
  const double cx = p.c * cb;
  const double cy = p.c * (ca - cb * cg) / sg;
  const double cz = std::sqrt(p.c * p.c - cx * cx - cy * cy);
  Eigen::Matrix3d m;
  m << p.a, 0, 0,
       p.b * cg, p.b * sg, 0,
       cx, cy, cz;
  return m;
}

// 1/d^2 from the reciprocal basis (inverse transpose of the direct basis).
inline double inv_d2(const xtinct::Lattice& p, const Eigen::Vector3i& hkl) {
  Eigen::Matrix3d recip = cartesian_basis(p).inverse();  // columns are a*, b*, c*
  Eigen::Vector3d g = recip * hkl.cast<double>();
  return g.squaredNorm();
}

// Absence by structure-factor phase sum over the general positions: a
// reflection is absent when sum_ops exp(2 pi i h.(R x + t)) vanishes for a
// generic x. Uses floating arithmetic and never inspects R^T h = h.
inline bool absent_by_phase_sum(const xtinct::SpaceGroup& g, const Eigen::Vector3i& hkl) {
  const Eigen::Vector3d xs[] = {{0.1173, 0.2919, 0.4431}, {0.3571, 0.0613, 0.8237}};
  for (const auto& x : xs) {
    std::complex<double> sum = 0;
    for (const auto& op : g.ops) {
      double phase = 2 * std::numbers::pi * hkl.cast<double>().dot(op.apply(x));
      sum += std::polar(1.0, phase);
    }
    if (std::abs(sum) > 1e-6 * static_cast<double>(g.ops.size()))
      return false;
  }
  return true;
}

}  // namespace oracle

#endif  // XTINCT_TESTS_ORACLES_HPP_
