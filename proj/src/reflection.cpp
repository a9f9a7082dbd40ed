#include "xtinct/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace xtinct {

bool is_extinct(std::span<const SymOp> ops, const Hkl& hkl) {
  for (const SymOp& op : ops) {
    if (hkl.transpose() * op.rotation != hkl.transpose())
      continue;
    if (hkl.dot(op.translation) % kTranslationDen != 0)
      return true;
  }
  return false;
}

bool is_extinct(const SpaceGroup& g, const Hkl& hkl) {
  return is_extinct(std::span<const SymOp>(g.ops), hkl);
}

double two_theta(double q, double wavelength) {
  if (!(q > 0) || !(wavelength > 0))
    throw std::invalid_argument("two_theta needs q > 0 and wavelength > 0");
  double s = wavelength * std::sqrt(q) / 2;
  if (s > 1)
    throw OutOfSphereError("reflection with Q=" + std::to_string(q) +
                           " lies outside the limiting sphere");
  return 2 * std::asin(s) * 180 / std::numbers::pi;
}

double q_at_two_theta(double two_theta_deg, double wavelength) {
  double s = 2 * std::sin(deg2rad(two_theta_deg) / 2) / wavelength;
  return s * s;
}

ExtinctionMask::ExtinctionMask(const SpaceGroup& g, int h_max)
    : number_(g.number), h_max_(h_max) {
  if (h_max < 1)
    throw std::invalid_argument("h_max must be >= 1");
  const size_t side = static_cast<size_t>(2 * h_max + 1);
  mask_.assign(side * side * side, 0);
  // Only ops with a nonzero translation can extinguish anything.
  std::vector<SymOp> screws;
  for (const SymOp& op : g.ops)
    if (!op.translation.isZero())
      screws.push_back(op);
  for (int h = -h_max; h <= h_max; ++h)
    for (int k = -h_max; k <= h_max; ++k)
      for (int l = -h_max; l <= h_max; ++l) {
        Hkl r(h, k, l);
        if (!r.isZero())
          mask_[index(r)] = is_extinct(screws, r) ? 1 : 0;
      }
}

Eigen::Vector3i covering_index_bounds(const Lattice& p, double q_max) {
  const double s = std::sqrt(std::max(q_max, 0.0));
  auto bound = [&](double len) {
    return static_cast<int>(std::floor(len * s * (1 + 1e-12)));
  };
  return {bound(p.a), bound(p.b), bound(p.c)};
}

namespace {

struct Reflection {
  double q;
  Hkl hkl;
  bool allowed;
};

void check_window(AngleWindow w) {
  if (!(w.min_deg >= 0 && w.min_deg < w.max_deg && w.max_deg < 180))
    throw std::invalid_argument("invalid 2-theta window [" +
                                std::to_string(w.min_deg) + ", " +
                                std::to_string(w.max_deg) + "]");
}

template <typename ExtinctFn>
std::vector<PeakPosition> enumerate_impl(const Lattice& p, AngleWindow window,
                                         double wavelength,
                                         const Eigen::Vector3i& bounds,
                                         ExtinctFn&& extinct) {
  check_window(window);
  if (!(wavelength > 0))
    throw std::invalid_argument("wavelength must be positive");
  const ReciprocalLattice<double> rl = reciprocal(p);
  const double q_max = q_at_two_theta(window.max_deg, wavelength) + kQMergeTolerance;

  std::vector<Reflection> refl;
  for (int h = -bounds(0); h <= bounds(0); ++h)
    for (int k = -bounds(1); k <= bounds(1); ++k)
      for (int l = -bounds(2); l <= bounds(2); ++l) {
        Hkl r(h, k, l);
        if (r.isZero())
          continue;
        double q = q_of(rl, r);
        if (q <= q_max)
          refl.push_back({q, r, !extinct(r)});
      }
  std::sort(refl.begin(), refl.end(), [](const Reflection& x, const Reflection& y) {
    if (x.q != y.q)
      return x.q < y.q;
    return std::lexicographical_compare(x.hkl.data(), x.hkl.data() + 3,
                                        y.hkl.data(), y.hkl.data() + 3);
  });

  std::vector<PeakPosition> out;
  for (size_t i = 0; i < refl.size();) {
    size_t j = i + 1;
    while (j < refl.size() && refl[j].q - refl[j - 1].q < kQMergeTolerance)
      ++j;
    PeakPosition pos{refl[i].q, 0.0, {}, false};
    for (size_t m = i; m < j; ++m) {
      pos.contributors.push_back(refl[m].hkl);
      pos.allowed = pos.allowed || refl[m].allowed;
    }
    i = j;
    if (!pos.allowed)
      continue;
    try {
      pos.two_theta = two_theta(pos.q, wavelength);
    } catch (const OutOfSphereError&) {
      continue;
    }
    if (window.contains(pos.two_theta))
      out.push_back(std::move(pos));
  }
  return out;
}

}  // namespace

std::vector<PeakPosition> enumerate_peaks(const SpaceGroup& g, const Lattice& p,
                                          AngleWindow window, double wavelength,
                                          int h_max) {
  if (h_max < 1)
    throw std::invalid_argument("h_max must be >= 1");
  if (!satisfies_constraints(g.system, p))
    throw LatticeError("lattice does not satisfy the " +
                       std::string(to_string(g.system)) + " constraints");
  std::vector<SymOp> screws;
  for (const SymOp& op : g.ops)
    if (!op.translation.isZero())
      screws.push_back(op);
  return enumerate_impl(p, window, wavelength, Eigen::Vector3i::Constant(h_max),
                        [&](const Hkl& r) { return is_extinct(screws, r); });
}

std::vector<PeakPosition> enumerate_peaks(const ExtinctionMask& mask, const Lattice& p,
                                          AngleWindow window, double wavelength,
                                          const Eigen::Vector3i& bounds) {
  Eigen::Vector3i b = bounds.cwiseMin(mask.h_max()).cwiseMax(0);
  return enumerate_impl(p, window, wavelength, b,
                        [&](const Hkl& r) { return mask.extinct(r); });
}

}  // namespace xtinct
