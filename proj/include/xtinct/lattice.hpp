// Crystal systems, lattice parameters and the direct/reciprocal metric.

#ifndef XTINCT_LATTICE_HPP_
#define XTINCT_LATTICE_HPP_

#include <Eigen/Core>
#include <Eigen/LU>

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xtinct {

struct LatticeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class CrystalSystem {
  triclinic,
  monoclinic,
  orthorhombic,
  tetragonal,
  trigonal,
  hexagonal,
  cubic,
};

enum class LatticeParam { a, b, c, alpha, beta, gamma };

struct CrystalSystemInfo {
  CrystalSystem system;
  std::string_view name;
  int first_sg;  // inclusive
  int last_sg;   // inclusive
  std::vector<LatticeParam> free_params;
};

const CrystalSystemInfo& info(CrystalSystem s);
std::span<const CrystalSystemInfo> all_crystal_systems();
CrystalSystem system_of_sg(int number);
std::string_view to_string(CrystalSystem s);
std::string_view to_string(LatticeParam p);
LatticeParam parse_lattice_param(std::string_view name);

template <typename Scalar>
struct LatticeParams {
  Scalar a, b, c;
  Scalar alpha, beta, gamma;  // degrees

  template <typename Other>
  LatticeParams<Other> cast() const {
    return {Other(a), Other(b), Other(c),
            Other(alpha), Other(beta), Other(gamma)};
  }
  Scalar get(LatticeParam p) const {
    switch (p) {
      case LatticeParam::a: return a;
      case LatticeParam::b: return b;
      case LatticeParam::c: return c;
      case LatticeParam::alpha: return alpha;
      case LatticeParam::beta: return beta;
      case LatticeParam::gamma: return gamma;
    }
    return Scalar(0);
  }
};

using Lattice = LatticeParams<double>;

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
Scalar deg2rad(Scalar deg) {
  return deg * Scalar(std::numbers::pi_v<double> / 180.0);
}

/// Direct metric tensor G, G_ij = a_i . a_j.
template <typename Scalar>
Matrix3<Scalar> metric_tensor(const LatticeParams<Scalar>& p) {
  using std::cos;
  const Scalar ca = cos(deg2rad(p.alpha));
  const Scalar cb = cos(deg2rad(p.beta));
  const Scalar cg = cos(deg2rad(p.gamma));
  Matrix3<Scalar> g;
  g << p.a * p.a, p.a * p.b * cg, p.a * p.c * cb,
       p.a * p.b * cg, p.b * p.b, p.b * p.c * ca,
       p.a * p.c * cb, p.b * p.c * ca, p.c * p.c;
  return g;
}

template <typename Scalar>
Scalar cell_volume(const LatticeParams<Scalar>& p) {
  using std::sqrt;
  Scalar det = metric_tensor(p).determinant();
  return det > Scalar(0) ? sqrt(det) : Scalar(0);
}

/// Throws LatticeError unless lengths > 0, angles in (0,180) and the
/// cell has positive volume.
template <typename Scalar>
void check_lattice(const LatticeParams<Scalar>& p) {
  for (Scalar len : {p.a, p.b, p.c})
    if (!(len > Scalar(0)))
      throw LatticeError("lattice lengths must be positive");
  for (Scalar ang : {p.alpha, p.beta, p.gamma})
    if (!(ang > Scalar(0) && ang < Scalar(180)))
      throw LatticeError("lattice angles must lie in (0, 180) degrees");
  if (!(cell_volume(p) > Scalar(1e-6) * p.a * p.b * p.c))
    throw LatticeError("degenerate cell: non-positive volume");
}

/// True if p obeys the equalities and fixed angles of system s.
bool satisfies_constraints(CrystalSystem s, const Lattice& p, double tol = 1e-9);

/// Expand the ordered free-parameter values of a crystal system into a full
/// parameter set (cubic: a; tetragonal/trigonal/hexagonal: a, c; ...).
Lattice lattice_from_free_params(CrystalSystem s, std::span<const double> values);

/// Inverse of lattice_from_free_params.
std::vector<double> free_param_values(CrystalSystem s, const Lattice& p);

}  // namespace xtinct

#endif  // XTINCT_LATTICE_HPP_
