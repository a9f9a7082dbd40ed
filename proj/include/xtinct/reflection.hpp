// Reciprocal-lattice geometry, peak positions and systematic absences.

#ifndef XTINCT_REFLECTION_HPP_
#define XTINCT_REFLECTION_HPP_

#include "xtinct/lattice.hpp"
#include "xtinct/spacegroup.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace xtinct {

using Hkl = Eigen::Vector3i;

inline constexpr double kDefaultWavelength = 1.5406;  // Cu K-alpha1, Angstrom
inline constexpr int kDefaultHMax = 10;
/// Reflections closer than this in Q (1/A^2) share one observed position.
inline constexpr double kQMergeTolerance = 1e-9;

struct OutOfSphereError : std::domain_error {
  using std::domain_error::domain_error;
};

template <typename Scalar>
struct ReciprocalLattice {
  Scalar a_star, b_star, c_star;  // 1/A
  Scalar cos_alpha_star, cos_beta_star, cos_gamma_star;

  /// Reciprocal metric tensor built from the six parameters.
  Matrix3<Scalar> metric() const {
    const Scalar ab = a_star * b_star, ac = a_star * c_star, bc = b_star * c_star;
    Matrix3<Scalar> m;
    m << a_star * a_star, ab * cos_gamma_star, ac * cos_beta_star,
         ab * cos_gamma_star, b_star * b_star, bc * cos_alpha_star,
         ac * cos_beta_star, bc * cos_alpha_star, c_star * c_star;
    return m;
  }
};

/// Reciprocal parameters from the closed-form cell relations,
/// a* = b c sin(alpha) / V and cos(alpha*) = (cos b cos g - cos a)/(sin b sin g).
template <typename Scalar>
ReciprocalLattice<Scalar> reciprocal(const LatticeParams<Scalar>& p) {
  using std::cos;
  using std::sin;
  check_lattice(p);
  const Scalar al = deg2rad(p.alpha), be = deg2rad(p.beta), ga = deg2rad(p.gamma);
  const Scalar ca = cos(al), cb = cos(be), cg = cos(ga);
  const Scalar sa = sin(al), sb = sin(be), sg = sin(ga);
  const Scalar volume = cell_volume(p);
  ReciprocalLattice<Scalar> r;
  r.a_star = p.b * p.c * sa / volume;
  r.b_star = p.a * p.c * sb / volume;
  r.c_star = p.a * p.b * sg / volume;
  r.cos_alpha_star = (cb * cg - ca) / (sb * sg);
  r.cos_beta_star = (ca * cg - cb) / (sa * sg);
  r.cos_gamma_star = (ca * cb - cg) / (sa * sb);
  return r;
}

/// Q = 1/d^2 for reflection hkl as the six-term quadratic form
///   h^2 a*^2 + k^2 b*^2 + l^2 c*^2
///   + 2 k l b* c* cos(alpha*) + 2 h l a* c* cos(beta*) + 2 h k a* b* cos(gamma*).
template <typename Scalar>
Scalar q_of(const ReciprocalLattice<Scalar>& r, const Hkl& hkl) {
  const Scalar h = Scalar(hkl(0)), k = Scalar(hkl(1)), l = Scalar(hkl(2));
  return h * h * r.a_star * r.a_star + k * k * r.b_star * r.b_star +
         l * l * r.c_star * r.c_star +
         Scalar(2) * k * l * r.b_star * r.c_star * r.cos_alpha_star +
         Scalar(2) * h * l * r.a_star * r.c_star * r.cos_beta_star +
         Scalar(2) * h * k * r.a_star * r.b_star * r.cos_gamma_star;
}

/// Systematic absence by the phase criterion: some op (R, t) leaves the row
/// vector hkl invariant (hkl^T R = hkl^T) while hkl . t is not an integer.
bool is_extinct(const SpaceGroup& g, const Hkl& hkl);
/// Same criterion restricted to a subset of operations.
bool is_extinct(std::span<const SymOp> ops, const Hkl& hkl);

/// Bragg angle 2-theta in degrees for Q = 1/d^2. Throws OutOfSphereError
/// when the reflection cannot diffract at this wavelength.
double two_theta(double q, double wavelength);
/// Inverse of two_theta: Q at which a reflection appears at 2-theta.
double q_at_two_theta(double two_theta_deg, double wavelength);

struct AngleWindow {
  double min_deg;
  double max_deg;
  bool contains(double x) const { return x >= min_deg && x <= max_deg; }
};

struct PeakPosition {
  double q;
  double two_theta;
  std::vector<Hkl> contributors;
  bool allowed;
};

/// Per-group absence lookup over the cube |h|,|k|,|l| <= h_max, so one group
/// can be enumerated at many lattices without re-running the criterion.
class ExtinctionMask {
public:
  ExtinctionMask(const SpaceGroup& g, int h_max);

  int h_max() const { return h_max_; }
  int space_group() const { return number_; }
  bool extinct(const Hkl& hkl) const { return mask_[index(hkl)] != 0; }

private:
  size_t index(const Hkl& hkl) const {
    const size_t side = static_cast<size_t>(2 * h_max_ + 1);
    return (static_cast<size_t>(hkl(0) + h_max_) * side +
            static_cast<size_t>(hkl(1) + h_max_)) * side +
           static_cast<size_t>(hkl(2) + h_max_);
  }
  int number_;
  int h_max_;
  std::vector<unsigned char> mask_;
};

/// Smallest index bound that reaches every reflection with Q <= q_max:
/// |h| <= a sqrt(Q), and likewise for k with b and l with c.
Eigen::Vector3i covering_index_bounds(const Lattice& p, double q_max);

/// Allowed peak positions inside the 2-theta window, ascending. Scans all
/// hkl with |h|,|k|,|l| <= h_max, merging reflections whose Q agree within
/// kQMergeTolerance.
std::vector<PeakPosition> enumerate_peaks(const SpaceGroup& g, const Lattice& p,
                                          AngleWindow window, double wavelength,
                                          int h_max = kDefaultHMax);

/// Variant over a precomputed mask. Scans |h| <= min(bounds, mask h_max)
/// per axis; peaks beyond the mask are not reported.
std::vector<PeakPosition> enumerate_peaks(const ExtinctionMask& mask, const Lattice& p,
                                          AngleWindow window, double wavelength,
                                          const Eigen::Vector3i& bounds);

}  // namespace xtinct

#endif  // XTINCT_REFLECTION_HPP_
