// Symmetry operations (rotation + exact fractional translation) and the
// coordinate-triplet grammar used by the space-group data file.

#ifndef XTINCT_SYMOP_HPP_
#define XTINCT_SYMOP_HPP_

#include <Eigen/Core>

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xtinct {

/// Every translation in a crystallographic space group is a multiple of
/// 1/12 along each axis, so translations are stored as integer numerators
/// over this denominator.
inline constexpr int kTranslationDen = 12;

using IntMatrix3 = Eigen::Matrix3i;
using IntVector3 = Eigen::Vector3i;

struct SymOpParseError : std::runtime_error {
  SymOpParseError(const std::string& term, const std::string& why)
      : std::runtime_error("bad symmetry term '" + term + "': " + why),
        term(term) {}
  std::string term;
};

/// Maps a fractional coordinate column x to rotation * x + translation.
/// Translation components are numerators over kTranslationDen, always
/// reduced into [0, kTranslationDen).
struct SymOp {
  IntMatrix3 rotation = IntMatrix3::Identity();
  IntVector3 translation = IntVector3::Zero();

  static SymOp identity() { return {}; }

  bool is_identity() const {
    return rotation == IntMatrix3::Identity() && translation.isZero();
  }
  /// Pure lattice-centering vector (identity rotation, nonzero translation).
  bool is_centering() const {
    return rotation == IntMatrix3::Identity() && !translation.isZero();
  }
  int det() const { return rotation.determinant(); }

  /// this ∘ other: apply other first.
  SymOp operator*(const SymOp& other) const;
  SymOp inverse() const;

  /// Apply to a fractional coordinate (no wrapping).
  Eigen::Vector3d apply(const Eigen::Vector3d& x) const {
    return rotation.cast<double>() * x +
           translation.cast<double>() / kTranslationDen;
  }

  bool operator==(const SymOp& o) const {
    return rotation == o.rotation && translation == o.translation;
  }
  /// Lexicographic over rotation entries (row-major), then translation.
  std::strong_ordering operator<=>(const SymOp& o) const;
};

/// Reduce integer numerators into [0, kTranslationDen).
IntVector3 wrap_translation(const IntVector3& t);

/// Parse a coordinate triplet such as "-y, x-y, z+1/3" or "x+.5,y,z".
/// Throws SymOpParseError naming the offending term.
SymOp parse_symop(std::string_view text);

/// Canonical triplet text, e.g. "-y+1/4,x+1/4,z+1/4".
std::string format_symop(const SymOp& op);

}  // namespace xtinct

#endif  // XTINCT_SYMOP_HPP_
