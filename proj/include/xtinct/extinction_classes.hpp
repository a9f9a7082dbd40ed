// Extinction-equivalence classes of space groups and the top-k accuracy
// ceiling they impose on any classifier that sees peak positions only.
//
// Two groups are equivalent when every powder-observable position has the
// same presence/absence. Positions are identified by exact integer
// invariants of hkl that fix Q for every lattice of the family:
//   cubic               s = h^2 + k^2 + l^2
//   tetragonal          (h^2 + k^2, l^2)
//   trigonal+hexagonal  (h^2 + hk + k^2, l^2)   (hexagonal axes)

#ifndef XTINCT_EXTINCTION_CLASSES_HPP_
#define XTINCT_EXTINCTION_CLASSES_HPP_

#include "xtinct/reflection.hpp"
#include "xtinct/spacegroup.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace xtinct {

using PositionKey = std::array<long, 2>;

/// Exact position invariant of hkl within a family.
PositionKey position_key(Family f, const Hkl& hkl);

struct Fingerprint {
  Family family;
  std::vector<std::pair<PositionKey, bool>> cells;  // sorted by key

  bool present(const PositionKey& key) const;
  bool operator==(const Fingerprint&) const = default;
};

struct ExtinctionClass {
  std::vector<int> members;  // ascending
  Fingerprint fingerprint;

  int smallest() const { return members.front(); }
  int size() const { return static_cast<int>(members.size()); }
};

struct Partition {
  Family family;
  std::vector<ExtinctionClass> classes;  // ordered by smallest member

  int group_count() const;
  int max_class_size() const;
  /// Index of the class holding space group `number`, or -1.
  int class_of(int number) const;
};

inline constexpr int kMinFingerprintHMax = 6;

/// Presence of each position key over |h|,|k|,|l| <= h_max (000 excluded).
/// Throws std::invalid_argument for groups outside the three families or
/// h_max < 6.
Fingerprint fingerprint(const SpaceGroup& g, int h_max);

struct MissingGroupsError : std::runtime_error {
  explicit MissingGroupsError(std::vector<int> gaps);
  std::vector<int> gaps;
};

/// Group the family's space groups by identical fingerprints. `threads`
/// of 0 uses the hardware concurrency.
Partition compute_classes(Family f, const SpaceGroupRegistry& registry, int h_max,
                          unsigned threads = 0);

/// (1/N) * sum_i min(k, n_i): a member is recoverable in the top k iff its
/// class leaves it a slot.
double theoretical_topk(const Partition& p, int k);

/// Map space-group labels to class indices. Throws std::invalid_argument on
/// a label outside the partition's family.
std::vector<int> relabel(std::span<const int> labels, const Partition& p);

}  // namespace xtinct

#endif  // XTINCT_EXTINCTION_CLASSES_HPP_
