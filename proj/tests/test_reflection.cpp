#include "xtinct/reflection.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <set>

#include <random>

using namespace xtinct;

namespace {

Lattice cubic(double a) { return {a, a, a, 90, 90, 90}; }

}  // namespace

TEST_CASE("reciprocal of simple cells") {
  auto r = reciprocal(cubic(10.0));
  CHECK(r.a_star == doctest::Approx(0.1));
  CHECK(r.b_star == doctest::Approx(0.1));
  CHECK(r.c_star == doctest::Approx(0.1));
  CHECK(std::abs(r.cos_alpha_star) < 1e-15);
  CHECK(std::abs(r.cos_gamma_star) < 1e-15);

  auto t = reciprocal(Lattice{5, 5, 10, 90, 90, 90});
  CHECK(t.a_star == doctest::Approx(0.2));
  CHECK(t.b_star == doctest::Approx(0.2));
  CHECK(t.c_star == doctest::Approx(0.1));
}

TEST_CASE("hexagonal reciprocal matches the inverted direct metric") {
  Lattice hex{4, 4, 3, 90, 90, 120};
  // Oracle: numerically invert G and read off a*, c*, cos(gamma*).
  Eigen::Matrix3d inv = metric_tensor(hex).inverse();
  const double a_star = std::sqrt(inv(0, 0));
  const double c_star = std::sqrt(inv(2, 2));
  const double cos_g = inv(0, 1) / (a_star * std::sqrt(inv(1, 1)));
  CHECK(a_star == doctest::Approx(0.28867513459481287).epsilon(1e-14));
  CHECK(c_star == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(cos_g == doctest::Approx(0.5).epsilon(1e-12));

  auto r = reciprocal(hex);
  CHECK(r.a_star == doctest::Approx(a_star).epsilon(1e-13));
  CHECK(r.b_star == doctest::Approx(a_star).epsilon(1e-13));
  CHECK(r.c_star == doctest::Approx(c_star).epsilon(1e-13));
  CHECK(r.cos_gamma_star == doctest::Approx(cos_g).epsilon(1e-12));
  CHECK(std::abs(r.cos_alpha_star) < 1e-15);
  CHECK(std::abs(r.cos_beta_star) < 1e-15);
}

TEST_CASE("reciprocal metric is the inverse of the direct metric") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> len(2, 20), ang(65, 115);
  for (int i = 0; i < 200; ++i) {
    Lattice p{len(rng), len(rng), len(rng), ang(rng), ang(rng), ang(rng)};
    if (cell_volume(p) < 0.3 * p.a * p.b * p.c)
      continue;
    Eigen::Matrix3d prod = reciprocal(p).metric() * metric_tensor(p);
    CHECK((prod - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("degenerate cells are rejected") {
  CHECK_THROWS_AS(reciprocal(Lattice{5, 5, 5, 120, 120, 120}), LatticeError);
  CHECK_THROWS_AS(reciprocal(Lattice{5, 5, 0, 90, 90, 90}), LatticeError);
}

TEST_CASE("q_of six-term form") {
  auto r = reciprocal(cubic(10.0));
  CHECK(q_of(r, Hkl(1, 0, 0)) == doctest::Approx(0.01));
  CHECK(q_of(r, Hkl(1, 1, 1)) == doctest::Approx(0.03));
  auto t = reciprocal(Lattice{5, 5, 10, 90, 90, 90});
  CHECK(q_of(t, Hkl(1, 0, 1)) == doctest::Approx(0.05));
}

TEST_CASE("q_of agrees with the Cartesian reciprocal basis") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> len(3, 15), ang(70, 110);
  std::uniform_int_distribution<int> idx(-8, 8);
  int checked = 0;
  while (checked < 300) {
    Lattice p{len(rng), len(rng), len(rng), ang(rng), ang(rng), ang(rng)};
    if (cell_volume(p) < 0.3 * p.a * p.b * p.c)
      continue;
    Hkl h(idx(rng), idx(rng), idx(rng));
    if (h.isZero())
      continue;
    double want = oracle::inv_d2(p, h);
    CHECK(std::abs(q_of(reciprocal(p), h) - want) <= 1e-12 * want);
    ++checked;
  }
}

TEST_CASE("is_extinct on standard examples") {
  const auto& reg = default_registry();
  CHECK(is_extinct(reg.at(229), Hkl(1, 0, 0)));
  CHECK_FALSE(is_extinct(reg.at(229), Hkl(1, 1, 0)));
  CHECK(is_extinct(reg.at(225), Hkl(1, 1, 0)));
  CHECK_FALSE(is_extinct(reg.at(225), Hkl(1, 1, 1)));
  // P2_13: h00 needs h even.
  CHECK(is_extinct(reg.at(198), Hkl(1, 0, 0)));
  CHECK_FALSE(is_extinct(reg.at(198), Hkl(2, 0, 0)));
  CHECK(oracle::absent_by_phase_sum(reg.at(198), Hkl(1, 0, 0)));
  CHECK_FALSE(oracle::absent_by_phase_sum(reg.at(198), Hkl(2, 0, 0)));
}

TEST_CASE("is_extinct agrees with the phase-sum oracle") {
  const auto& reg = default_registry();
  for (int n : {19, 43, 62, 76, 88, 96, 110, 142, 144, 161, 167, 169, 184, 192, 198, 206, 212, 220, 227, 230}) {
    const auto& g = reg.at(n);
    for (int h = -4; h <= 4; ++h)
      for (int k = -4; k <= 4; ++k)
        for (int l = -4; l <= 4; ++l) {
          Hkl r(h, k, l);
          if (r.isZero())
            continue;
          REQUIRE_MESSAGE(is_extinct(g, r) == oracle::absent_by_phase_sum(g, r),
                          "group " << n << " hkl " << h << " " << k << " " << l);
        }
  }
}

TEST_CASE("Friedel symmetry of absences") {
  for (const auto& [n, g] : default_registry())
    for (int h = -3; h <= 3; ++h)
      for (int k = -3; k <= 3; ++k)
        for (int l = -3; l <= 3; ++l) {
          Hkl r(h, k, l);
          if (!r.isZero())
            REQUIRE(is_extinct(g, r) == is_extinct(g, Hkl(-r)));
        }
}

TEST_CASE("two_theta") {
  const double lambda = 1.5406;
  // Oracle: 2 asin(lambda / 2d) with d = 3.
  const double want = 2 * std::asin(lambda / 6.0) * 180 / std::numbers::pi;
  CHECK(two_theta(1.0 / 9.0, lambda) == doctest::Approx(want).epsilon(1e-12));
  CHECK(two_theta(1.0 / 9.0, lambda) == doctest::Approx(29.7566).epsilon(1e-5));
  CHECK(two_theta(4.0 / (lambda * lambda), lambda) == doctest::Approx(180.0));
  CHECK_THROWS_AS(two_theta(5.0 / (lambda * lambda), lambda), OutOfSphereError);
  CHECK(q_at_two_theta(two_theta(0.37, lambda), lambda) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("enumerate_peaks: first allowed positions") {
  const auto& reg = default_registry();
  const AngleWindow window{1, 179};
  auto fm3m = enumerate_peaks(reg.at(225), cubic(5), window, 1.5406);
  REQUIRE(!fm3m.empty());
  CHECK(fm3m[0].q == doctest::Approx(0.12));

  auto pm3m = enumerate_peaks(reg.at(221), cubic(5), window, 1.5406);
  REQUIRE(!pm3m.empty());
  CHECK(pm3m[0].q == doctest::Approx(0.04));
  CHECK(pm3m[0].contributors.size() == 6);

  // Oracle: distinct s = h^2+k^2+l^2 over hkl with h+k+l even, ascending.
  std::set<int> even_s;
  for (int h = -4; h <= 4; ++h)
    for (int k = -4; k <= 4; ++k)
      for (int l = -4; l <= 4; ++l)
        if ((h || k || l) && (h + k + l) % 2 == 0)
          even_s.insert(h * h + k * k + l * l);
  std::vector<int> s(even_s.begin(), even_s.end());
  CHECK(s[0] == 2);
  CHECK(s[1] == 4);
  CHECK(s[2] == 6);
  auto im3m = enumerate_peaks(reg.at(229), cubic(5), window, 1.5406);
  REQUIRE(im3m.size() >= 3);
  for (int i = 0; i < 3; ++i)
    CHECK(im3m[static_cast<size_t>(i)].q == doctest::Approx(s[static_cast<size_t>(i)] / 25.0));
}

TEST_CASE("enumerate_peaks ordering, window and determinism") {
  const auto& reg = default_registry();
  Lattice tet{6.1, 6.1, 9.3, 90, 90, 90};
  AngleWindow window{10, 110};
  auto a = enumerate_peaks(reg.at(142), tet, window, 1.5406);
  auto b = enumerate_peaks(reg.at(142), tet, window, 1.5406);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].two_theta == b[i].two_theta);
    CHECK(window.contains(a[i].two_theta));
    CHECK(a[i].allowed);
    if (i)
      CHECK(a[i].two_theta > a[i - 1].two_theta);
  }
  CHECK(enumerate_peaks(reg.at(142), tet, AngleWindow{1, 2}, 1.5406).empty());
  CHECK_THROWS_AS(enumerate_peaks(reg.at(142), tet, AngleWindow{50, 20}, 1.5406),
                  std::invalid_argument);
  CHECK_THROWS_AS(enumerate_peaks(reg.at(142), cubic(5), window, 1.5406, 0),
                  std::invalid_argument);
}

TEST_CASE("mask-based enumeration matches the direct scan") {
  const auto& reg = default_registry();
  Lattice hex{7.3, 7.3, 11.2, 90, 90, 120};
  AngleWindow window{10, 110};
  const double lambda = 1.5406;
  auto bounds = covering_index_bounds(hex, q_at_two_theta(110, lambda));
  int h_max = bounds.maxCoeff();
  ExtinctionMask mask(reg.at(167), h_max);
  auto via_mask = enumerate_peaks(mask, hex, window, lambda, bounds);
  auto direct = enumerate_peaks(reg.at(167), hex, window, lambda, h_max);
  REQUIRE(via_mask.size() == direct.size());
  for (size_t i = 0; i < direct.size(); ++i)
    CHECK(via_mask[i].two_theta == direct[i].two_theta);
  // One more shell of indices adds nothing inside the window.
  auto wider = enumerate_peaks(reg.at(167), hex, window, lambda, h_max + 2);
  CHECK(wider.size() == direct.size());
}
