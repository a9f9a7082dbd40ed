// Labeled dataset construction: uniform lattice meshes per space group
// (balanced or with per-group ranges), ingestion of externally computed line
// patterns, deterministic stratified splitting, lattice histograms.

#ifndef XTINCT_DATASET_HPP_
#define XTINCT_DATASET_HPP_

#include "xtinct/dataset_io.hpp"
#include "xtinct/pattern.hpp"
#include "xtinct/spacegroup.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace xtinct {

struct DatasetBuildError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Arithmetic sequence min, min+step, ... <= max.
struct ParamRange {
  double min = 5.0;
  double max = 15.0;
  double step = 0.05;

  int count() const;
  double value(int i) const { return min + i * step; }
  void validate() const;
  bool operator==(const ParamRange&) const = default;
};

using RangeMap = std::map<LatticeParam, ParamRange>;

struct GridSpec {
  Family family = Family::cubic;
  RangeMap ranges;  // one entry per free lattice parameter of the family
  int patterns_per_lattice = 1;
  std::map<int, RangeMap> overrides;  // per space group, replaces ranges entries

  /// [5, 15] A on every free parameter; step 0.05 A for cubic, 0.25 A for
  /// the two-parameter families.
  static GridSpec defaults(Family f);

  ParamRange range_for(int sg, LatticeParam p) const;
  /// Cartesian product over the free parameters, last parameter fastest.
  std::vector<std::vector<double>> lattice_points(int sg) const;
  long lattice_point_count(int sg) const;
  void validate() const;
};

enum class SplitUnit { replicate, lattice_point };

std::string_view to_string(SplitUnit u);
SplitUnit parse_split_unit(std::string_view name);

struct SplitSpec {
  int train_parts = 5;
  int test_parts = 1;
  SplitUnit unit = SplitUnit::replicate;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BuildOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::function<void(const std::string&)> log;
};

/// Train and test datasets plus a summary shared by both sidecars.
struct DatasetArtifact {
  Dataset train;
  Dataset test;
  nlohmann::json summary;

  /// Writes <dir>/train.ulbd, <dir>/test.ulbd and their .meta.json files.
  void write(const std::filesystem::path& dir) const;
  std::size_t total() const { return train.size() + test.size(); }
};

/// Balanced uniform-lattice dataset: every group of the family on the same
/// mesh (grid.overrides must be empty).
DatasetArtifact build_ulbd(const SpaceGroupRegistry& registry, const GridSpec& grid,
                           const PatternConfig& cfg, const SplitSpec& split,
                           const BuildOptions& opts = {});

/// Each group on its own range; every group of the family needs at least one
/// override row, parameters it does not mention fall back to base.
DatasetArtifact build_imbalanced(const SpaceGroupRegistry& registry, const GridSpec& base,
                                 const std::map<int, RangeMap>& per_group,
                                 const PatternConfig& cfg, const SplitSpec& split,
                                 const BuildOptions& opts = {});

/// Text table "sg_number param min max step" per line; '#' comments.
std::map<int, RangeMap> parse_override_table(std::istream& in);
std::map<int, RangeMap> load_override_table(const std::filesystem::path& path);

enum class PositionKind { q, two_theta };

struct LinePatternRecord {
  int label = 0;
  PositionKind kind = PositionKind::two_theta;
  std::vector<std::pair<double, double>> peaks;  // (position, intensity)
};

/// One JSON object per line: {"label": 225, "kind": "q"|"two_theta",
/// "peaks": [[position, intensity], ...]}. Blank lines are skipped.
std::vector<LinePatternRecord> parse_line_pattern_records(std::istream& in);
nlohmann::json to_json(const LinePatternRecord& r);

/// Render externally computed line patterns. Peaks outside the window are
/// dropped and counted; records with nothing left are skipped.
DatasetArtifact ingest_line_patterns(const std::vector<LinePatternRecord>& records,
                                     const PatternConfig& cfg, bool apply_lorentz,
                                     const SplitSpec& split, const BuildOptions& opts = {});

struct HistogramTable {
  double bin_width = 0;
  std::vector<std::string> params;
  // space group -> parameter -> bin index (bin i covers [i w, (i+1) w)) -> count
  std::map<int, std::map<std::string, std::map<long, long>>> counts;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Count distinct lattice points per bin, parameter and space group from one
/// or more dataset sidecars.
HistogramTable lattice_histogram(const std::vector<nlohmann::json>& metadata, double bin_width);

}  // namespace xtinct

#endif  // XTINCT_DATASET_HPP_
