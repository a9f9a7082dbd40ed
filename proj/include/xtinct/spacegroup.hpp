// Space groups, the registry loaded from the symmetry data file, and
// group-consistency validation.

#ifndef XTINCT_SPACEGROUP_HPP_
#define XTINCT_SPACEGROUP_HPP_

#include "xtinct/lattice.hpp"
#include "xtinct/symop.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace xtinct {

struct SpaceGroup {
  int number = 0;
  std::string hm_symbol;
  CrystalSystem system = CrystalSystem::triclinic;
  std::vector<SymOp> ops;  // all general positions, centering expanded

  /// First letter of the Hermann-Mauguin symbol: P, A, B, C, I, F or R.
  char centering() const { return hm_symbol.empty() ? '?' : hm_symbol.front(); }
  /// Identity plus the pure centering translations.
  std::vector<SymOp> centering_ops() const;
  /// Number of distinct rotation parts (the point-group order).
  int point_group_order() const;
};

/// Which of the ways validate_group can fail.
enum class ViolationKind { missing_identity, bad_determinant, duplicate, not_closed, no_inverse };

struct GroupViolation {
  ViolationKind kind;
  SymOp first;
  SymOp second;  // meaningful for not_closed (first * second) and duplicate
  std::string describe() const;
};

/// Checks identity membership, closure modulo lattice translations and the
/// existence of inverses. Returns the first violation found, if any.
std::optional<GroupViolation> validate_group(const SpaceGroup& g);

struct TableLoadError : std::runtime_error {
  TableLoadError(const std::string& source, int line, const std::string& what);
  std::string source;
  int line;
};

/// Immutable registry of space groups keyed by number. Safe for concurrent
/// readers once constructed.
class SpaceGroupRegistry {
public:
  SpaceGroupRegistry() = default;
  explicit SpaceGroupRegistry(std::map<int, SpaceGroup> groups)
      : groups_(std::move(groups)) {}

  const SpaceGroup& at(int number) const;
  const SpaceGroup* find(int number) const;
  bool contains(int number) const { return groups_.count(number) != 0; }
  size_t size() const { return groups_.size(); }
  /// Numbers in [first, last] absent from the registry.
  std::vector<int> missing(int first, int last) const;

  auto begin() const { return groups_.begin(); }
  auto end() const { return groups_.end(); }

private:
  std::map<int, SpaceGroup> groups_;
};

/// Parse a data file: blank-line separated blocks, first line
/// "<number> <HM symbol>", then one coordinate triplet per line; '#' starts a
/// comment. Every group is validated.
SpaceGroupRegistry load_spacegroup_table(std::istream& in,
                                         const std::string& source = "<stream>");
SpaceGroupRegistry load_spacegroup_table(const std::filesystem::path& path);

/// XTINCT_SG_TABLE if set, else the table installed with the build.
std::filesystem::path default_table_path();

/// Loaded once from default_table_path().
const SpaceGroupRegistry& default_registry();

/// Crystal families pooled for extinction analysis and dataset recipes.
enum class Family { cubic, tetragonal, trigonal_hexagonal };

std::string_view to_string(Family f);
/// Accepts "cubic", "tetragonal", "trigonal+hexagonal" (also "hexagonal",
/// "trigonal_hexagonal", "tri/hexagonal"). Throws std::invalid_argument.
Family parse_family(std::string_view name);
/// Inclusive space-group range of a family.
std::pair<int, int> sg_range(Family f);
std::optional<Family> family_of_sg(int number);
/// Lattice parameterization shared by every member of the family.
CrystalSystem lattice_system(Family f);

}  // namespace xtinct

#endif  // XTINCT_SPACEGROUP_HPP_
