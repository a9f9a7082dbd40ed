#include "xtinct/dataset.hpp"
#include "xtinct/eval.hpp"
#include "xtinct/extinction_classes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xtinct;

namespace {

// Exit code 2: anything wrong with flags or the config file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Kind { text, text_list, real, integer, unsigned_integer, flag };

struct Field {
  std::string key;  // config key; the flag is "--" + key with '_' -> '-'
  Kind kind;
  json fallback;
  std::string help;
};

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

// A subcommand whose settings live in one flat JSON object (the RunConfig).
// Resolution order: built-in defaults, then --config file, then explicit flags.
struct Command {
  std::string name;
  CLI::App* app = nullptr;
  std::vector<Field> fields;
  std::vector<CLI::Option*> options;
  std::string config_path;

  void attach(CLI::App& parent, const std::string& description) {
    app = parent.add_subcommand(name, description);
    for (const Field& f : fields) {
      std::string flag = flag_name(f.key);
      CLI::Option* opt = nullptr;
      if (f.kind == Kind::flag) {
        opt = app->add_flag(flag + ",!--no-" + flag.substr(2), f.help);
      } else {
        opt = app->add_option(flag, f.help);
        if (f.kind == Kind::text_list)
          opt->expected(1, CLI::detail::expected_max_vector_size)->allow_extra_args();
        if (!f.fallback.is_null())
          opt->default_str(f.fallback.is_string() ? f.fallback.get<std::string>()
                                                  : f.fallback.dump());
      }
      options.push_back(opt);
    }
    app->add_option("--config", config_path, "RunConfig JSON file; explicit flags win");
  }

  json resolve() const {
    json cfg = json::object();
    for (const Field& f : fields)
      cfg[f.key] = f.fallback;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw ConfigError("cannot open config file " + config_path);
      json file;
      try {
        file = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
      if (!file.is_object())
        throw ConfigError(config_path + ": expected a JSON object");
      for (auto& [key, value] : file.items()) {
        if (key == "command") {
          if (value != name)
            throw ConfigError(config_path + " is a '" + value.dump() + "' config, not '" + name + "'");
          continue;
        }
        if (!cfg.contains(key))
          throw ConfigError(config_path + ": unknown key '" + key + "'");
        cfg[key] = value;
      }
    }
    for (size_t i = 0; i < fields.size(); ++i) {
      const CLI::Option* opt = options[i];
      if (opt->count() == 0)
        continue;
      const Field& f = fields[i];
      switch (f.kind) {
        case Kind::text: cfg[f.key] = opt->as<std::string>(); break;
        case Kind::text_list: cfg[f.key] = opt->as<std::vector<std::string>>(); break;
        case Kind::real: cfg[f.key] = opt->as<double>(); break;
        case Kind::integer: cfg[f.key] = opt->as<long>(); break;
        case Kind::unsigned_integer: cfg[f.key] = opt->as<std::uint64_t>(); break;
        case Kind::flag: cfg[f.key] = opt->as<bool>(); break;
      }
    }
    cfg["command"] = name;
    return cfg;
  }
};

template <class T>
T get(const json& cfg, const std::string& key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config value '" + key + "' has the wrong type: " + cfg.at(key).dump());
  }
}

std::string required_path(const json& cfg, const std::string& key) {
  auto v = get<std::string>(cfg, key);
  if (v.empty())
    throw ConfigError(flag_name(key) + " is required");
  return v;
}

double to_double(std::string_view s, const std::string& what) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ConfigError("bad number '" + std::string(s) + "' in " + what);
  return v;
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& what) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError(what + " must look like lo:hi, got '" + text + "'");
  return {to_double(std::string_view(text).substr(0, colon), what),
          to_double(std::string_view(text).substr(colon + 1), what)};
}

SplitSpec split_from(const json& cfg) {
  auto [train, test] = parse_pair(get<std::string>(cfg, "split"), "--split");
  SplitSpec s;
  s.train_parts = static_cast<int>(train);
  s.test_parts = static_cast<int>(test);
  if (s.train_parts != train || s.test_parts != test)
    throw ConfigError("--split parts must be integers");
  s.unit = parse_split_unit(get<std::string>(cfg, "split_unit"));
  s.seed = get<std::uint64_t>(cfg, "seed");
  s.validate();
  return s;
}

PatternConfig pattern_from(const json& cfg) {
  PatternConfig p;
  p.wavelength = get<double>(cfg, "wavelength");
  std::tie(p.two_theta_min, p.two_theta_max) = parse_pair(get<std::string>(cfg, "window"), "--window");
  p.n_points = get<int>(cfg, "points");
  p.fwhm = get<double>(cfg, "fwhm");
  p.intensity_law = parse_intensity_law(get<std::string>(cfg, "intensity_law"));
  p.seed = get<std::uint64_t>(cfg, "seed");
  p.validate();
  return p;
}

std::vector<Field> render_fields() {
  PatternConfig d;
  return {
      {"wavelength", Kind::real, d.wavelength, "X-ray wavelength (A)"},
      {"window", Kind::text, "10:110", "2-theta window lo:hi (degrees)"},
      {"points", Kind::integer, d.n_points, "samples per pattern"},
      {"fwhm", Kind::real, d.fwhm, "Gaussian FWHM (degrees)"},
      {"intensity_law", Kind::text, "uniform", "uniform | constant"},
      {"split", Kind::text, "5:1", "train:test ratio"},
      {"split_unit", Kind::text, "replicate", "replicate | lattice_point"},
      {"seed", Kind::unsigned_integer, 0, "seed for intensities and split"},
  };
}

void write_config(const fs::path& path, const json& cfg) {
  write_text_file(path, cfg.dump(2) + "\n");
}

// Sidecar for single-file outputs: report.json -> report.run_config.json.
fs::path config_next_to(const fs::path& out) {
  fs::path p = out;
  return p.replace_extension(".run_config.json");
}

void write_report(const fs::path& path, const json& report) {
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  write_text_file(path, report.dump(2) + "\n");
}

BuildOptions build_options(unsigned threads) {
  return {threads, [](const std::string& msg) { std::cerr << msg << '\n'; }};
}

void finish_artifact(const DatasetArtifact& art, const json& cfg) {
  fs::path out = required_path(cfg, "out");
  fs::create_directories(out);
  art.write(out);
  if (cfg.value("csv", false)) {
    write_csv(art.train, out / "train.csv");
    write_csv(art.test, out / "test.csv");
  }
  write_config(out / "run_config.json", cfg);
  std::cout << "wrote " << art.train.size() << " train and " << art.test.size()
            << " test patterns to " << out.string() << '\n';
}

// ------------------------------------------------------------------ classes

Command classes_command() {
  return {"classes",
          nullptr,
          {{"family", Kind::text, "cubic", "cubic | tetragonal | trigonal+hexagonal"},
           {"h_max", Kind::integer, kDefaultHMax, "Miller index bound for fingerprints"},
           {"out", Kind::text, "", "JSON report path (optional)"}}};
}

int run_classes(const json& cfg, unsigned threads) {
  Family family;
  int h_max;
  try {
    family = parse_family(get<std::string>(cfg, "family"));
    h_max = get<int>(cfg, "h_max");
    if (h_max < kMinFingerprintHMax)
      throw ConfigError("--h-max must be >= " + std::to_string(kMinFingerprintHMax));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  Partition p = compute_classes(family, default_registry(), h_max, threads);
  std::cout << to_string(family) << ": " << p.group_count() << " space groups, "
            << p.classes.size() << " extinction classes\n";
  json classes = json::array(), class_of = json::object(), topk = json::object();
  for (size_t i = 0; i < p.classes.size(); ++i) {
    const auto& members = p.classes[i].members;
    std::cout << std::setw(4) << i << ":";
    for (int sg : members) {
      std::cout << ' ' << sg << " (" << default_registry().at(sg).hm_symbol << ')';
      class_of[std::to_string(sg)] = i;
    }
    std::cout << '\n';
    classes.push_back({{"id", i}, {"members", members}});
  }
  std::cout << "theoretical top-k accuracy (%):";
  for (int k = 1; k <= 5; ++k) {
    double acc = theoretical_topk(p, k);
    topk[std::to_string(k)] = acc;
    std::cout << "  top-" << k << ' ' << std::fixed << std::setprecision(1) << 100 * acc;
  }
  std::cout << '\n';

  if (auto out = get<std::string>(cfg, "out"); !out.empty()) {
    write_report(out, {{"family", to_string(family)},
                       {"h_max", h_max},
                       {"group_count", p.group_count()},
                       {"classes", classes},
                       {"class_of", class_of},
                       {"theoretical_topk", topk}});
    write_config(config_next_to(out), cfg);
  }
  return 0;
}

// ---------------------------------------------------------------------- gen

Command gen_command() {
  Command c{"gen",
            nullptr,
            {{"family", Kind::text, "cubic", "cubic | tetragonal | trigonal+hexagonal"},
             {"a_range", Kind::text, "5:15", "a range lo:hi (A)"},
             {"c_range", Kind::text, "5:15", "c range lo:hi (A), two-parameter families"},
             {"step", Kind::real, nullptr, "mesh step (A); 0.05 cubic, 0.25 otherwise"},
             {"patterns_per_lattice", Kind::integer, 1, "intensity draws per lattice point"},
             {"imbalance_file", Kind::text, "", "per-group ranges: sg param min max step"},
             {"out", Kind::text, "", "output directory"},
             {"csv", Kind::flag, false, "also write train.csv and test.csv"}}};
  for (Field& f : render_fields())
    c.fields.push_back(std::move(f));
  return c;
}

int run_gen(const json& cfg, unsigned threads) {
  GridSpec grid;
  PatternConfig pattern;
  SplitSpec split;
  std::map<int, RangeMap> per_group;
  try {
    grid = GridSpec::defaults(parse_family(get<std::string>(cfg, "family")));
    for (auto& [param, range] : grid.ranges) {
      std::string key = param == LatticeParam::c ? "c_range" : "a_range";
      std::tie(range.min, range.max) = parse_pair(get<std::string>(cfg, key), flag_name(key));
      if (!cfg.at("step").is_null())
        range.step = get<double>(cfg, "step");
    }
    grid.patterns_per_lattice = get<int>(cfg, "patterns_per_lattice");
    grid.validate();
    pattern = pattern_from(cfg);
    split = split_from(cfg);
    required_path(cfg, "out");
    if (auto file = get<std::string>(cfg, "imbalance_file"); !file.empty())
      per_group = load_override_table(file);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  DatasetArtifact art =
      per_group.empty()
          ? build_ulbd(default_registry(), grid, pattern, split, build_options(threads))
          : build_imbalanced(default_registry(), grid, per_group, pattern, split,
                             build_options(threads));
  finish_artifact(art, cfg);
  return 0;
}

// ------------------------------------------------------------------- ingest

Command ingest_command() {
  Command c{"ingest",
            nullptr,
            {{"in", Kind::text, "", "JSON-lines file of line patterns"},
             {"apply_lorentz", Kind::flag, true, "multiply intensities by the Lorentz factor"},
             {"out", Kind::text, "", "output directory"},
             {"csv", Kind::flag, false, "also write train.csv and test.csv"}}};
  for (Field& f : render_fields())
    c.fields.push_back(std::move(f));
  return c;
}

int run_ingest(const json& cfg, unsigned threads) {
  PatternConfig pattern;
  SplitSpec split;
  std::vector<LinePatternRecord> records;
  try {
    pattern = pattern_from(cfg);
    split = split_from(cfg);
    required_path(cfg, "out");
    std::string in_path = required_path(cfg, "in");
    std::ifstream in(in_path);
    if (!in)
      throw ConfigError("cannot open " + in_path);
    records = parse_line_pattern_records(in);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  DatasetArtifact art = ingest_line_patterns(records, pattern, get<bool>(cfg, "apply_lorentz"),
                                             split, build_options(threads));
  finish_artifact(art, cfg);
  return 0;
}

// --------------------------------------------------------------------- eval

Command eval_command() {
  return {"eval",
          nullptr,
          {{"train", Kind::text, "", "training container (.ulbd)"},
           {"test", Kind::text, "", "test container (.ulbd)"},
           {"neighbors", Kind::integer, 5, "k of the k-NN baseline"},
           {"relabel_by_class", Kind::flag, false, "also score against extinction classes"},
           {"h_max", Kind::integer, kDefaultHMax, "Miller index bound for the class partition"},
           {"out", Kind::text, "", "JSON report path (optional)"}}};
}

std::vector<int> int_labels(const Dataset& ds) { return {ds.labels.begin(), ds.labels.end()}; }

void print_topk(const std::string& title, const json& report) {
  std::cout << title << " top-k accuracy (%):";
  for (auto& [k, v] : report["topk_accuracy"].items())
    std::cout << "  top-" << k << ' ' << std::fixed << std::setprecision(1) << 100 * v.get<double>();
  std::cout << '\n';
}

int run_eval(const json& cfg, unsigned threads) {
  std::string train_path, test_path;
  int neighbors, h_max;
  try {
    train_path = required_path(cfg, "train");
    test_path = required_path(cfg, "test");
    neighbors = get<int>(cfg, "neighbors");
    h_max = get<int>(cfg, "h_max");
    if (neighbors < 1)
      throw ConfigError("--neighbors must be >= 1");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  Dataset train = read_dataset(train_path);
  Dataset test = read_dataset(test_path);
  auto train_labels = int_labels(train), test_labels = int_labels(test);
  PredictionSet p =
      knn_classify(train.samples, train_labels, test.samples, test_labels, neighbors, threads);
  json report = {{"neighbors", neighbors}, {"space_group", evaluation_report(p)}};
  print_topk("space group", report["space_group"]);

  if (get<bool>(cfg, "relabel_by_class")) {
    std::optional<Family> family;
    for (const auto* labels : {&train_labels, &test_labels})
      for (int label : *labels) {
        auto f = family_of_sg(label);
        if (!f || (family && *family != *f))
          throw std::runtime_error("labels do not belong to a single extinction-class family");
        family = f;
      }
    Partition part = compute_classes(*family, default_registry(), h_max, threads);
    report["family"] = to_string(*family);
    report["extinction_class"] = evaluation_report(relabel_predictions(p, part));
    print_topk("extinction class", report["extinction_class"]);
  }

  if (auto out = get<std::string>(cfg, "out"); !out.empty()) {
    write_report(out, report);
    write_config(config_next_to(out), cfg);
  }
  return 0;
}

// --------------------------------------------------------------------- hist

Command hist_command() {
  return {"hist",
          nullptr,
          {{"meta", Kind::text_list, json::array(), "dataset sidecars (.meta.json)"},
           {"bin_width", Kind::real, 0.2, "bin width (A)"},
           {"out", Kind::text, "", "JSON table path (optional)"}}};
}

int run_hist(const json& cfg, unsigned) {
  std::vector<std::string> paths;
  double width;
  try {
    paths = get<std::vector<std::string>>(cfg, "meta");
    width = get<double>(cfg, "bin_width");
    if (paths.empty())
      throw ConfigError("--meta is required");
    if (!(width > 0))
      throw ConfigError("--bin-width must be positive");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::vector<json> metadata;
  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("cannot open " + path);
    metadata.push_back(json::parse(in));
  }
  HistogramTable table = lattice_histogram(metadata, width);
  std::cout << table.to_text();
  if (auto out = get<std::string>(cfg, "out"); !out.empty()) {
    write_report(out, table.to_json());
    write_config(config_next_to(out), cfg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extinction-law powder pattern datasets and extinction-class analysis", "xtinct"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0: all cores); never affects outputs");
  app.fallthrough();

  using Runner = int (*)(const json&, unsigned);
  std::vector<std::pair<Command, Runner>> commands;
  commands.emplace_back(classes_command(), run_classes);
  commands.emplace_back(gen_command(), run_gen);
  commands.emplace_back(ingest_command(), run_ingest);
  commands.emplace_back(eval_command(), run_eval);
  commands.emplace_back(hist_command(), run_hist);
  const char* descriptions[] = {
      "partition space groups into extinction classes and report top-k ceilings",
      "generate a uniform-lattice dataset",
      "render externally computed line patterns into a dataset",
      "k-NN baseline evaluation",
      "lattice-parameter histogram from dataset sidecars",
  };
  for (size_t i = 0; i < commands.size(); ++i)
    commands[i].first.attach(app, descriptions[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (auto& [cmd, run] : commands) {
    if (!cmd.app->parsed())
      continue;
    try {
      return run(cmd.resolve(), threads);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n\n" << cmd.app->help();
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 2;
}
