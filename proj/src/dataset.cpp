#include "xtinct/dataset.hpp"

#include "xtinct/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

namespace xtinct {

using nlohmann::json;

// ---------------------------------------------------------------- specs

int ParamRange::count() const {
  return static_cast<int>(std::floor((max - min) / step + 1e-9)) + 1;
}

void ParamRange::validate() const {
  if (!(step > 0))
    throw std::invalid_argument("grid step must be positive");
  if (!(min > 0 && min < max))
    throw std::invalid_argument("grid range needs 0 < min < max");
}

GridSpec GridSpec::defaults(Family f) {
  GridSpec g;
  g.family = f;
  const double step = f == Family::cubic ? 0.05 : 0.25;
  for (LatticeParam p : info(lattice_system(f)).free_params)
    g.ranges[p] = ParamRange{5.0, 15.0, step};
  return g;
}

ParamRange GridSpec::range_for(int sg, LatticeParam p) const {
  if (auto it = overrides.find(sg); it != overrides.end())
    if (auto r = it->second.find(p); r != it->second.end())
      return r->second;
  auto it = ranges.find(p);
  if (it == ranges.end())
    throw std::invalid_argument("grid has no range for parameter " + std::string(to_string(p)));
  return it->second;
}

std::vector<std::vector<double>> GridSpec::lattice_points(int sg) const {
  const auto& free = info(lattice_system(family)).free_params;
  std::vector<std::vector<double>> points{{}};
  for (LatticeParam p : free) {
    ParamRange r = range_for(sg, p);
    std::vector<std::vector<double>> next;
    next.reserve(points.size() * static_cast<size_t>(r.count()));
    for (const auto& prefix : points)
      for (int i = 0; i < r.count(); ++i) {
        next.push_back(prefix);
        next.back().push_back(r.value(i));
      }
    points = std::move(next);
  }
  return points;
}

long GridSpec::lattice_point_count(int sg) const {
  long n = 1;
  for (LatticeParam p : info(lattice_system(family)).free_params)
    n *= range_for(sg, p).count();
  return n;
}

void GridSpec::validate() const {
  if (patterns_per_lattice < 1)
    throw std::invalid_argument("patterns_per_lattice must be >= 1");
  const auto& free = info(lattice_system(family)).free_params;
  for (LatticeParam p : free) {
    auto it = ranges.find(p);
    if (it == ranges.end())
      throw std::invalid_argument("grid has no range for parameter " + std::string(to_string(p)));
    it->second.validate();
  }
  for (const auto& [sg, rm] : overrides) {
    if (family_of_sg(sg) != family)
      throw std::invalid_argument("override for space group " + std::to_string(sg) +
                                  " outside the " + std::string(to_string(family)) + " family");
    for (const auto& [p, r] : rm) {
      if (std::find(free.begin(), free.end(), p) == free.end())
        throw std::invalid_argument("parameter " + std::string(to_string(p)) +
                                    " is not free in the " + std::string(to_string(family)) +
                                    " family");
      r.validate();
    }
  }
}

std::string_view to_string(SplitUnit u) {
  return u == SplitUnit::replicate ? "replicate" : "lattice-point";
}

SplitUnit parse_split_unit(std::string_view name) {
  if (name == "replicate")
    return SplitUnit::replicate;
  if (name == "lattice-point" || name == "lattice_point" || name == "lattice")
    return SplitUnit::lattice_point;
  throw std::invalid_argument("unknown split unit '" + std::string(name) + "'");
}

void SplitSpec::validate() const {
  if (train_parts < 1 || test_parts < 1)
    throw std::invalid_argument("split parts must be positive integers");
}

// ---------------------------------------------------------------- internals

namespace {

constexpr std::uint64_t kSplitSalt = 0x5eed5b117ab1e5ULL;

json to_json(const PatternConfig& c) {
  return {{"wavelength", c.wavelength},
          {"two_theta_min", c.two_theta_min},
          {"two_theta_max", c.two_theta_max},
          {"n_points", c.n_points},
          {"fwhm", c.fwhm},
          {"peak_shape", "gaussian"},
          {"lorentz", "1/(sin^2(theta) cos(theta))"},
          {"intensity_law", to_string(c.intensity_law)},
          {"seed", c.seed}};
}

json to_json(const SplitSpec& s) {
  return {{"ratio", {s.train_parts, s.test_parts}},
          {"unit", to_string(s.unit)},
          {"stratified_by", "space_group"},
          {"seed", s.seed}};
}

json to_json(const ParamRange& r) {
  return {{"min", r.min}, {"max", r.max}, {"step", r.step}, {"count", r.count()}};
}

// A lattice point (or ingested record) and the positions it produced.
struct Cell {
  int label;
  long lattice_index;
  std::vector<double> lattice;
  std::vector<double> two_thetas;  // empty: skipped
  int replicates;
};

struct SampleSlot {
  size_t cell;
  int replicate;
  bool test;
  Eigen::Index row;  // row within its split
};

// Deterministic permutation of [0, n) from the stream.
std::vector<int> shuffled(int n, RngStream& rng) {
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(idx[static_cast<size_t>(i)],
              idx[static_cast<size_t>(rng.next() % static_cast<std::uint64_t>(i + 1))]);
  return idx;
}

// Assign every (cell, replicate) to train or test, stratified per label.
// Cells must be ordered by label, then lattice index.
std::vector<SampleSlot> assign_split(const std::vector<Cell>& cells, const SplitSpec& split) {
  const long parts = split.train_parts + split.test_parts;
  std::vector<SampleSlot> slots;
  const std::uint64_t seed = mix64(split.seed ^ kSplitSalt);

  size_t begin = 0;
  while (begin < cells.size()) {
    size_t end = begin;
    while (end < cells.size() && cells[end].label == cells[begin].label)
      ++end;
    std::vector<size_t> live;
    for (size_t c = begin; c < end; ++c)
      if (!cells[c].two_thetas.empty())
        live.push_back(c);

    if (split.unit == SplitUnit::replicate) {
      // Spread the test share evenly: after m samples, floor(m*test/parts)
      // of them are test samples.
      long seen = 0;
      for (size_t c : live) {
        const int reps = cells[c].replicates;
        long n_test = (seen + reps) * split.test_parts / parts - seen * split.test_parts / parts;
        seen += reps;
        RngStream rng(seed, cells[c].label, cells[c].lattice_index, -1);
        std::vector<int> order = shuffled(reps, rng);
        std::vector<bool> is_test(static_cast<size_t>(reps), false);
        for (long i = 0; i < n_test; ++i)
          is_test[static_cast<size_t>(order[static_cast<size_t>(i)])] = true;
        for (int r = 0; r < reps; ++r)
          slots.push_back({c, r, is_test[static_cast<size_t>(r)], 0});
      }
    } else {
      const long n = static_cast<long>(live.size());
      const long n_test = (2 * n * split.test_parts + parts) / (2 * parts);  // round half up
      RngStream rng(seed, cells[begin].label, -1, -1);
      std::vector<int> order = shuffled(static_cast<int>(n), rng);
      std::vector<bool> is_test(live.size(), false);
      for (long i = 0; i < n_test; ++i)
        is_test[static_cast<size_t>(order[static_cast<size_t>(i)])] = true;
      for (size_t i = 0; i < live.size(); ++i)
        for (int r = 0; r < cells[live[i]].replicates; ++r)
          slots.push_back({live[i], r, is_test[i], 0});
    }
    begin = end;
  }

  Eigen::Index n_train = 0, n_test = 0;
  for (SampleSlot& s : slots)
    s.row = s.test ? n_test++ : n_train++;
  return slots;
}

// Render every slot into its row. Streams are keyed by the sample, so the
// worker count cannot change the output.
DatasetArtifact render_cells(const std::vector<Cell>& cells, const std::vector<SampleSlot>& slots,
                             const std::vector<std::vector<LinePeak>>* fixed_peaks,
                             bool apply_lorentz, const PatternConfig& cfg,
                             const BuildOptions& opts) {
  Eigen::Index n_train = 0, n_test = 0;
  for (const SampleSlot& s : slots)
    (s.test ? n_test : n_train)++;

  DatasetArtifact art;
  for (Dataset* ds : {&art.train, &art.test}) {
    ds->two_theta_min = static_cast<float>(cfg.two_theta_min);
    ds->two_theta_max = static_cast<float>(cfg.two_theta_max);
  }
  art.train.samples.resize(n_train, cfg.n_points);
  art.test.samples.resize(n_test, cfg.n_points);
  art.train.labels.resize(static_cast<size_t>(n_train));
  art.test.labels.resize(static_cast<size_t>(n_test));

  parallel_for(slots.size(), opts.threads, [&](size_t i) {
    const SampleSlot& s = slots[i];
    const Cell& cell = cells[s.cell];
    LinePattern lp;
    if (fixed_peaks) {
      lp = finish_line_pattern((*fixed_peaks)[s.cell], cell.label, apply_lorentz);
    } else {
      RngStream rng(cfg.seed, cell.label, cell.lattice_index, s.replicate);
      lp = make_line_pattern(std::span<const double>(cell.two_thetas), cell.label, cfg, rng);
    }
    RenderedPattern rp = render(lp, cfg);
    Dataset& ds = s.test ? art.test : art.train;
    ds.samples.row(s.row) = rp.samples.transpose();
    ds.labels[static_cast<size_t>(s.row)] = static_cast<std::uint16_t>(cell.label);
  });
  return art;
}

json sample_list(const std::vector<Cell>& cells, const std::vector<SampleSlot>& slots,
                 bool test) {
  json out = json::array();
  for (size_t i = 0; i < slots.size(); ++i) {
    const SampleSlot& s = slots[i];
    if (s.test != test)
      continue;
    const Cell& c = cells[s.cell];
    out.push_back({{"id", i},
                   {"label", c.label},
                   {"lattice_index", c.lattice_index},
                   {"replicate", s.replicate},
                   {"lattice", c.lattice}});
  }
  return out;
}

json per_label_counts(const std::vector<Cell>& cells, const std::vector<SampleSlot>& slots,
                      int which) {  // 0 train, 1 test, 2 both
  std::map<int, long> counts;
  for (const Cell& c : cells)
    counts[c.label];
  for (const SampleSlot& s : slots)
    if (which == 2 || s.test == (which == 1))
      ++counts[cells[s.cell].label];
  json out = json::object();
  for (auto [label, n] : counts)
    out[std::to_string(label)] = n;
  return out;
}

void attach_metadata(DatasetArtifact& art, const std::vector<Cell>& cells,
                     const std::vector<SampleSlot>& slots, json summary) {
  long train_total = static_cast<long>(art.train.size());
  long test_total = static_cast<long>(art.test.size());
  summary["counts"]["samples"] = per_label_counts(cells, slots, 2);
  summary["counts"]["total"] = train_total + test_total;
  summary["counts"]["train_total"] = train_total;
  summary["counts"]["test_total"] = test_total;
  art.summary = summary;
  for (bool test : {false, true}) {
    json meta = summary;
    meta["split"] = test ? "test" : "train";
    meta["per_group_counts"] = per_label_counts(cells, slots, test ? 1 : 0);
    meta["samples"] = sample_list(cells, slots, test);
    (test ? art.test : art.train).metadata = std::move(meta);
  }
}

DatasetArtifact build_grid(const SpaceGroupRegistry& registry, const GridSpec& grid,
                           const PatternConfig& cfg, const SplitSpec& split,
                           const BuildOptions& opts) {
  grid.validate();
  cfg.validate();
  split.validate();
  const Family family = grid.family;
  const CrystalSystem system = lattice_system(family);
  auto [lo, hi] = sg_range(family);
  if (auto gaps = registry.missing(lo, hi); !gaps.empty())
    throw DatasetBuildError("space-group table lacks group " + std::to_string(gaps.front()));

  const double q_max = q_at_two_theta(cfg.two_theta_max, cfg.wavelength);
  std::vector<Cell> cells;
  int h_max = kDefaultHMax;
  for (int sg = lo; sg <= hi; ++sg) {
    long index = 0;
    for (auto& values : grid.lattice_points(sg)) {
      Lattice lat = lattice_from_free_params(system, values);
      h_max = std::max(h_max, covering_index_bounds(lat, q_max).maxCoeff());
      cells.push_back({sg, index++, std::move(values), {}, grid.patterns_per_lattice});
    }
  }
  if (cells.empty())
    throw DatasetBuildError("grid produces no lattice points");

  std::vector<std::unique_ptr<ExtinctionMask>> masks(static_cast<size_t>(hi - lo + 1));
  parallel_for(masks.size(), opts.threads, [&](size_t i) {
    masks[i] = std::make_unique<ExtinctionMask>(registry.at(lo + static_cast<int>(i)), h_max);
  });

  parallel_for(cells.size(), opts.threads, [&](size_t i) {
    Cell& c = cells[i];
    Lattice lat = lattice_from_free_params(system, c.lattice);
    auto peaks = enumerate_peaks(*masks[static_cast<size_t>(c.label - lo)], lat, cfg.window(),
                                 cfg.wavelength, covering_index_bounds(lat, q_max));
    c.two_thetas.reserve(peaks.size());
    for (const auto& p : peaks)
      c.two_thetas.push_back(p.two_theta);
  });

  json lattice_points = json::object(), skipped = json::object(), ranges = json::object();
  const auto& free = info(system).free_params;
  for (int sg = lo; sg <= hi; ++sg) {
    json r = json::object();
    for (LatticeParam p : free)
      r[std::string(to_string(p))] = to_json(grid.range_for(sg, p));
    ranges[std::to_string(sg)] = r;
    lattice_points[std::to_string(sg)] = grid.lattice_point_count(sg);
    skipped[std::to_string(sg)] = 0;
  }
  for (const Cell& c : cells)
    if (c.two_thetas.empty()) {
      skipped[std::to_string(c.label)] = skipped[std::to_string(c.label)].get<long>() + 1;
      if (opts.log) {
        std::ostringstream msg;
        msg << "space group " << c.label << ", lattice point " << c.lattice_index
            << ": no allowed peaks in window, skipped";
        opts.log(msg.str());
      }
    }

  auto slots = assign_split(cells, split);
  DatasetArtifact art = render_cells(cells, slots, nullptr, true, cfg, opts);

  json params = json::array();
  for (LatticeParam p : free)
    params.push_back(to_string(p));
  json summary = {{"generator", "xtinct"},
                  {"kind", "ulbd"},
                  {"family", to_string(family)},
                  {"lattice_params", params},
                  {"pattern_config", to_json(cfg)},
                  {"split_spec", to_json(split)},
                  {"h_max", h_max},
                  {"grid", {{"patterns_per_lattice", grid.patterns_per_lattice}, {"ranges", ranges}}},
                  {"counts", {{"lattice_points", lattice_points},
                              {"skipped_lattice_points", skipped}}}};
  attach_metadata(art, cells, slots, std::move(summary));
  return art;
}

}  // namespace

void DatasetArtifact::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_dataset(train, dir / "train.ulbd");
  write_dataset(test, dir / "test.ulbd");
}

DatasetArtifact build_ulbd(const SpaceGroupRegistry& registry, const GridSpec& grid,
                           const PatternConfig& cfg, const SplitSpec& split,
                           const BuildOptions& opts) {
  if (!grid.overrides.empty())
    throw DatasetBuildError("balanced dataset cannot take per-group overrides");
  return build_grid(registry, grid, cfg, split, opts);
}

DatasetArtifact build_imbalanced(const SpaceGroupRegistry& registry, const GridSpec& base,
                                 const std::map<int, RangeMap>& per_group,
                                 const PatternConfig& cfg, const SplitSpec& split,
                                 const BuildOptions& opts) {
  auto [lo, hi] = sg_range(base.family);
  for (int sg = lo; sg <= hi; ++sg)
    if (!per_group.count(sg) || per_group.at(sg).empty())
      throw DatasetBuildError("no lattice range override for space group " + std::to_string(sg));
  GridSpec grid = base;
  grid.overrides = per_group;
  return build_grid(registry, grid, cfg, split, opts);
}

// ---------------------------------------------------------------- file formats

std::map<int, RangeMap> parse_override_table(std::istream& in) {
  std::map<int, RangeMap> out;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::istringstream ls(line);
    int sg;
    std::string param;
    ParamRange r;
    if (!(ls >> sg)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos)
        continue;
      throw std::invalid_argument("override table line " + std::to_string(lineno) +
                                  ": expected 'sg_number param min max step'");
    }
    std::string extra;
    if (!(ls >> param >> r.min >> r.max >> r.step) || (ls >> extra))
      throw std::invalid_argument("override table line " + std::to_string(lineno) +
                                  ": expected 'sg_number param min max step'");
    r.validate();
    LatticeParam p = parse_lattice_param(param);
    if (!out[sg].emplace(p, r).second)
      throw std::invalid_argument("override table line " + std::to_string(lineno) +
                                  ": duplicate entry for group " + std::to_string(sg));
  }
  return out;
}

std::map<int, RangeMap> load_override_table(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("cannot open override table " + path.string());
  return parse_override_table(f);
}

std::vector<LinePatternRecord> parse_line_pattern_records(std::istream& in) {
  std::vector<LinePatternRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto fail = [&](const std::string& why) {
      return std::invalid_argument("line-pattern record " + std::to_string(lineno) + ": " + why);
    };
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw fail(e.what());
    }
    if (!j.is_object() || !j.contains("label") || !j.contains("kind") || !j.contains("peaks"))
      throw fail("needs fields label, kind, peaks");
    LinePatternRecord r;
    if (!j["label"].is_number_integer())
      throw fail("label must be an integer");
    r.label = j["label"].get<int>();
    if (r.label < 1 || r.label > 230)
      throw fail("label must be a space-group number");
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind == "q")
      r.kind = PositionKind::q;
    else if (kind == "two_theta")
      r.kind = PositionKind::two_theta;
    else
      throw fail("kind must be \"q\" or \"two_theta\"");
    if (!j["peaks"].is_array() || j["peaks"].empty())
      throw fail("peaks must be a non-empty array");
    for (const json& p : j["peaks"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw fail("each peak must be [position, intensity]");
      double pos = p[0].get<double>(), inten = p[1].get<double>();
      if (!(inten >= 0))
        throw fail("peak intensities must be non-negative");
      if (!(pos > 0))
        throw fail("peak positions must be positive");
      r.peaks.emplace_back(pos, inten);
    }
    out.push_back(std::move(r));
  }
  return out;
}

json to_json(const LinePatternRecord& r) {
  json peaks = json::array();
  for (auto [pos, inten] : r.peaks)
    peaks.push_back({pos, inten});
  return {{"label", r.label},
          {"kind", r.kind == PositionKind::q ? "q" : "two_theta"},
          {"peaks", peaks}};
}

DatasetArtifact ingest_line_patterns(const std::vector<LinePatternRecord>& records,
                                     const PatternConfig& cfg, bool apply_lorentz,
                                     const SplitSpec& split, const BuildOptions& opts) {
  cfg.validate();
  split.validate();
  if (records.empty())
    throw DatasetBuildError("no line-pattern records to ingest");

  // Cells ordered by label, then record index, so splitting stratifies.
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t x, size_t y) { return records[x].label < records[y].label; });

  std::vector<Cell> cells;
  std::vector<std::vector<LinePeak>> peaks;
  long dropped = 0, skipped = 0;
  const AngleWindow window = cfg.window();
  for (size_t idx : order) {
    const LinePatternRecord& r = records[idx];
    std::vector<LinePeak> kept;
    for (auto [pos, inten] : r.peaks) {
      double tt = pos;
      if (r.kind == PositionKind::q) {
        try {
          tt = two_theta(pos, cfg.wavelength);
        } catch (const OutOfSphereError&) {
          ++dropped;
          continue;
        }
      }
      if (!window.contains(tt)) {
        ++dropped;
        continue;
      }
      kept.push_back({tt, inten});
    }
    bool any_positive = std::any_of(kept.begin(), kept.end(),
                                    [](const LinePeak& p) { return p.intensity > 0; });
    Cell c{r.label, static_cast<long>(idx), {}, {}, 1};
    if (any_positive) {
      for (const LinePeak& p : kept)
        c.two_thetas.push_back(p.two_theta);
    } else {
      ++skipped;
      if (opts.log)
        opts.log("record " + std::to_string(idx + 1) + ": no peaks left in window, skipped");
    }
    cells.push_back(std::move(c));
    peaks.push_back(std::move(kept));
  }
  if (dropped && opts.log)
    opts.log(std::to_string(dropped) + " peaks outside the window were dropped");

  auto slots = assign_split(cells, split);
  DatasetArtifact art = render_cells(cells, slots, &peaks, apply_lorentz, cfg, opts);
  json summary = {{"generator", "xtinct"},
                  {"kind", "ingested"},
                  {"lattice_params", json::array()},
                  {"pattern_config", to_json(cfg)},
                  {"split_spec", to_json(split)},
                  {"apply_lorentz", apply_lorentz},
                  {"counts", {{"records", records.size()},
                              {"skipped_records", skipped},
                              {"dropped_peaks", dropped}}}};
  attach_metadata(art, cells, slots, std::move(summary));
  return art;
}

// ---------------------------------------------------------------- histogram

json HistogramTable::to_json() const {
  json groups = json::object();
  for (const auto& [sg, per_param] : counts) {
    json g = json::object();
    for (const auto& [param, bins] : per_param) {
      json rows = json::array();
      for (auto [bin, n] : bins)
        rows.push_back({{"bin_start", static_cast<double>(bin) * bin_width},
                        {"bin_end", static_cast<double>(bin + 1) * bin_width},
                        {"count", n}});
      g[param] = rows;
    }
    groups[std::to_string(sg)] = g;
  }
  return {{"bin_width", bin_width}, {"params", params}, {"groups", groups}};
}

std::string HistogramTable::to_text() const {
  std::ostringstream out;
  out << "space_group\tparam\tbin_start\tbin_end\tcount\n";
  for (const auto& [sg, per_param] : counts)
    for (const auto& [param, bins] : per_param)
      for (auto [bin, n] : bins)
        out << sg << '\t' << param << '\t' << static_cast<double>(bin) * bin_width << '\t'
            << static_cast<double>(bin + 1) * bin_width << '\t' << n << '\n';
  return out.str();
}

HistogramTable lattice_histogram(const std::vector<json>& metadata, double bin_width) {
  if (!(bin_width > 0))
    throw std::invalid_argument("bin width must be positive");
  HistogramTable table;
  table.bin_width = bin_width;
  std::set<std::pair<int, long>> seen;
  for (const json& meta : metadata) {
    if (!meta.contains("lattice_params") || !meta.contains("samples") ||
        meta["lattice_params"].empty())
      throw std::invalid_argument("metadata carries no lattice provenance");
    auto params = meta["lattice_params"].get<std::vector<std::string>>();
    if (table.params.empty())
      table.params = params;
    else if (table.params != params)
      throw std::invalid_argument("metadata files describe different lattice parameters");
    for (const json& s : meta["samples"]) {
      int label = s.at("label").get<int>();
      long index = s.at("lattice_index").get<long>();
      if (!seen.insert({label, index}).second)
        continue;
      auto values = s.at("lattice").get<std::vector<double>>();
      if (values.size() != params.size())
        throw std::invalid_argument("sample lattice does not match lattice_params");
      for (size_t i = 0; i < params.size(); ++i) {
        // The small offset keeps grid values that land on a bin edge in the
        // upper bin despite rounding in min + i*step.
        long bin = static_cast<long>(std::floor(values[i] / bin_width + 1e-9));
        ++table.counts[label][params[i]][bin];
      }
    }
  }
  return table;
}

}  // namespace xtinct
