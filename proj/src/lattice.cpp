#include "xtinct/lattice.hpp"

#include <cmath>

namespace xtinct {

namespace {

using P = LatticeParam;

// Trigonal groups (rhombohedral included) are described in hexagonal axes.
const std::array<CrystalSystemInfo, 7> kSystems = {{
    {CrystalSystem::triclinic, "triclinic", 1, 2,
     {P::a, P::b, P::c, P::alpha, P::beta, P::gamma}},
    {CrystalSystem::monoclinic, "monoclinic", 3, 15, {P::a, P::b, P::c, P::beta}},
    {CrystalSystem::orthorhombic, "orthorhombic", 16, 74, {P::a, P::b, P::c}},
    {CrystalSystem::tetragonal, "tetragonal", 75, 142, {P::a, P::c}},
    {CrystalSystem::trigonal, "trigonal", 143, 167, {P::a, P::c}},
    {CrystalSystem::hexagonal, "hexagonal", 168, 194, {P::a, P::c}},
    {CrystalSystem::cubic, "cubic", 195, 230, {P::a}},
}};

bool close(double x, double y, double tol) {
  return std::abs(x - y) <= tol * std::max(1.0, std::abs(y));
}

}  // namespace

const CrystalSystemInfo& info(CrystalSystem s) {
  return kSystems[static_cast<size_t>(s)];
}

std::span<const CrystalSystemInfo> all_crystal_systems() { return kSystems; }

CrystalSystem system_of_sg(int number) {
  for (const auto& s : kSystems)
    if (number >= s.first_sg && number <= s.last_sg)
      return s.system;
  throw std::out_of_range("space-group number out of range: " +
                          std::to_string(number));
}

std::string_view to_string(CrystalSystem s) { return info(s).name; }

std::string_view to_string(LatticeParam p) {
  static const char* names[] = {"a", "b", "c", "alpha", "beta", "gamma"};
  return names[static_cast<int>(p)];
}

LatticeParam parse_lattice_param(std::string_view name) {
  for (int i = 0; i < 6; ++i)
    if (to_string(static_cast<LatticeParam>(i)) == name)
      return static_cast<LatticeParam>(i);
  throw LatticeError("unknown lattice parameter '" + std::string(name) + "'");
}

bool satisfies_constraints(CrystalSystem s, const Lattice& p, double tol) {
  switch (s) {
    case CrystalSystem::triclinic:
      return true;
    case CrystalSystem::monoclinic:
      return close(p.alpha, 90, tol) && close(p.gamma, 90, tol);
    case CrystalSystem::orthorhombic:
      return close(p.alpha, 90, tol) && close(p.beta, 90, tol) &&
             close(p.gamma, 90, tol);
    case CrystalSystem::tetragonal:
      return close(p.a, p.b, tol) &&
             satisfies_constraints(CrystalSystem::orthorhombic, p, tol);
    case CrystalSystem::trigonal:
    case CrystalSystem::hexagonal:
      return close(p.a, p.b, tol) && close(p.alpha, 90, tol) &&
             close(p.beta, 90, tol) && close(p.gamma, 120, tol);
    case CrystalSystem::cubic:
      return close(p.a, p.c, tol) &&
             satisfies_constraints(CrystalSystem::tetragonal, p, tol);
  }
  return false;
}

Lattice lattice_from_free_params(CrystalSystem s, std::span<const double> values) {
  const auto& free = info(s).free_params;
  if (values.size() != free.size())
    throw LatticeError(std::string(to_string(s)) + " takes " +
                       std::to_string(free.size()) + " free parameters, got " +
                       std::to_string(values.size()));
  Lattice p{0, 0, 0, 90, 90, 90};
  for (size_t i = 0; i < free.size(); ++i) {
    double v = values[i];
    switch (free[i]) {
      case P::a: p.a = v; break;
      case P::b: p.b = v; break;
      case P::c: p.c = v; break;
      case P::alpha: p.alpha = v; break;
      case P::beta: p.beta = v; break;
      case P::gamma: p.gamma = v; break;
    }
  }
  switch (s) {
    case CrystalSystem::cubic:
      p.b = p.c = p.a;
      break;
    case CrystalSystem::tetragonal:
      p.b = p.a;
      break;
    case CrystalSystem::trigonal:
    case CrystalSystem::hexagonal:
      p.b = p.a;
      p.gamma = 120;
      break;
    default:
      break;
  }
  check_lattice(p);
  return p;
}

std::vector<double> free_param_values(CrystalSystem s, const Lattice& p) {
  std::vector<double> out;
  for (LatticeParam fp : info(s).free_params)
    out.push_back(p.get(fp));
  return out;
}

}  // namespace xtinct
