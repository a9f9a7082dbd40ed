#include "xtinct/spacegroup.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#ifndef XTINCT_DEFAULT_SG_TABLE
#define XTINCT_DEFAULT_SG_TABLE "data/spacegroups.txt"
#endif

namespace xtinct {

std::vector<SymOp> SpaceGroup::centering_ops() const {
  std::vector<SymOp> out;
  for (const SymOp& op : ops)
    if (op.rotation == IntMatrix3::Identity())
      out.push_back(op);
  return out;
}

int SpaceGroup::point_group_order() const {
  std::vector<SymOp> rots;
  for (const SymOp& op : ops)
    rots.push_back(SymOp{op.rotation, IntVector3::Zero()});
  std::sort(rots.begin(), rots.end());
  return static_cast<int>(std::unique(rots.begin(), rots.end()) - rots.begin());
}

std::string GroupViolation::describe() const {
  switch (kind) {
    case ViolationKind::missing_identity:
      return "identity operation missing";
    case ViolationKind::bad_determinant:
      return "rotation of " + format_symop(first) + " has determinant " +
             std::to_string(first.det());
    case ViolationKind::duplicate:
      return "operation " + format_symop(first) + " listed twice";
    case ViolationKind::not_closed:
      return "product of " + format_symop(first) + " and " +
             format_symop(second) + " (" + format_symop(first * second) +
             ") is not in the group";
    case ViolationKind::no_inverse:
      return "inverse of " + format_symop(first) + " is not in the group";
  }
  return "unknown violation";
}

std::optional<GroupViolation> validate_group(const SpaceGroup& g) {
  std::set<SymOp> members;
  for (const SymOp& op : g.ops) {
    if (op.det() != 1 && op.det() != -1)
      return GroupViolation{ViolationKind::bad_determinant, op, op};
    if (!members.insert(op).second)
      return GroupViolation{ViolationKind::duplicate, op, op};
  }
  if (!members.count(SymOp::identity()))
    return GroupViolation{ViolationKind::missing_identity, SymOp{}, SymOp{}};
  for (const SymOp& x : g.ops)
    for (const SymOp& y : g.ops)
      if (!members.count(x * y))
        return GroupViolation{ViolationKind::not_closed, x, y};
  for (const SymOp& x : g.ops)
    if (!members.count(x.inverse()))
      return GroupViolation{ViolationKind::no_inverse, x, x};
  return std::nullopt;
}

TableLoadError::TableLoadError(const std::string& source, int line,
                               const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
      source(source),
      line(line) {}

const SpaceGroup& SpaceGroupRegistry::at(int number) const {
  auto it = groups_.find(number);
  if (it == groups_.end())
    throw std::out_of_range("space group " + std::to_string(number) +
                            " not in registry");
  return it->second;
}

const SpaceGroup* SpaceGroupRegistry::find(int number) const {
  auto it = groups_.find(number);
  return it == groups_.end() ? nullptr : &it->second;
}

std::vector<int> SpaceGroupRegistry::missing(int first, int last) const {
  std::vector<int> out;
  for (int n = first; n <= last; ++n)
    if (!contains(n))
      out.push_back(n);
  return out;
}

SpaceGroupRegistry load_spacegroup_table(std::istream& in,
                                         const std::string& source) {
  std::map<int, SpaceGroup> groups;
  std::optional<SpaceGroup> current;
  int header_line = 0;

  auto finish = [&] {
    if (!current)
      return;
    if (current->ops.empty())
      throw TableLoadError(source, header_line,
                           "group " + std::to_string(current->number) +
                               " lists no operations");
    if (auto v = validate_group(*current))
      throw TableLoadError(source, header_line,
                           "group " + std::to_string(current->number) + " (" +
                               current->hm_symbol + "): " + v->describe());
    int n = current->number;
    if (!groups.emplace(n, std::move(*current)).second)
      throw TableLoadError(source, header_line,
                           "duplicate space group " + std::to_string(n));
    current.reset();
  };

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      // A blank line ends a block; a comment-only line does not.
      if (raw.find('#') == std::string::npos)
        finish();
      continue;
    }
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    if (!current) {
      std::istringstream hs(line);
      int number = 0;
      if (!(hs >> number) || number < 1 || number > 230)
        throw TableLoadError(source, lineno,
                             "expected '<number> <symbol>', got '" + line + "'");
      std::string symbol;
      std::getline(hs >> std::ws, symbol);
      if (symbol.empty())
        throw TableLoadError(source, lineno, "missing Hermann-Mauguin symbol");
      current.emplace();
      current->number = number;
      current->hm_symbol = symbol;
      current->system = system_of_sg(number);
      header_line = lineno;
      continue;
    }
    try {
      current->ops.push_back(parse_symop(line));
    } catch (const SymOpParseError& e) {
      throw TableLoadError(source, lineno,
                           "group " + std::to_string(current->number) + ": " +
                               e.what());
    }
  }
  finish();
  return SpaceGroupRegistry(std::move(groups));
}

SpaceGroupRegistry load_spacegroup_table(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f)
    throw TableLoadError(path.string(), 0, "cannot open space-group table");
  return load_spacegroup_table(f, path.string());
}

std::filesystem::path default_table_path() {
  if (const char* env = std::getenv("XTINCT_SG_TABLE"); env && *env)
    return env;
  return XTINCT_DEFAULT_SG_TABLE;
}

const SpaceGroupRegistry& default_registry() {
  static const SpaceGroupRegistry registry = load_spacegroup_table(default_table_path());
  return registry;
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::cubic: return "cubic";
    case Family::tetragonal: return "tetragonal";
    case Family::trigonal_hexagonal: return "trigonal+hexagonal";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "cubic")
    return Family::cubic;
  if (name == "tetragonal")
    return Family::tetragonal;
  if (name == "trigonal+hexagonal" || name == "trigonal_hexagonal" ||
      name == "hexagonal" || name == "tri/hexagonal" || name == "trigonal")
    return Family::trigonal_hexagonal;
  throw std::invalid_argument("unknown family '" + std::string(name) +
                              "' (expected cubic, tetragonal or trigonal+hexagonal)");
}

std::pair<int, int> sg_range(Family f) {
  switch (f) {
    case Family::cubic: return {195, 230};
    case Family::tetragonal: return {75, 142};
    case Family::trigonal_hexagonal: return {143, 194};
  }
  return {0, -1};
}

std::optional<Family> family_of_sg(int number) {
  for (Family f : {Family::cubic, Family::tetragonal, Family::trigonal_hexagonal}) {
    auto [lo, hi] = sg_range(f);
    if (number >= lo && number <= hi)
      return f;
  }
  return std::nullopt;
}

CrystalSystem lattice_system(Family f) {
  switch (f) {
    case Family::cubic: return CrystalSystem::cubic;
    case Family::tetragonal: return CrystalSystem::tetragonal;
    case Family::trigonal_hexagonal: return CrystalSystem::hexagonal;
  }
  return CrystalSystem::triclinic;
}

}  // namespace xtinct
