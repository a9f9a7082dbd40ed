#include "xtinct/pattern.hpp"

#include <doctest.h>

#include <random>

using namespace xtinct;

TEST_CASE("lorentz factor") {
  CHECK(lorentz_factor(90) == doctest::Approx(2.8284271247461903).epsilon(1e-12));
  CHECK(lorentz_factor(60) == doctest::Approx(4.618802153517006).epsilon(1e-12));
  CHECK(lorentz_factor(20) > lorentz_factor(40));
  CHECK_THROWS_AS(lorentz_factor(180), std::domain_error);
  CHECK_THROWS_AS(lorentz_factor(0), std::domain_error);
}

TEST_CASE("lorentz factor is strictly decreasing below 90 degrees") {
  double prev = lorentz_factor(0.5);
  for (double tt = 1.0; tt < 90.0; tt += 0.5) {
    double f = lorentz_factor(tt);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("make_line_pattern") {
  PatternConfig cfg;
  SUBCASE("single peak normalizes to one") {
    RngStream rng(1, 225, 0, 0);
    double tt[] = {42.0};
    auto lp = make_line_pattern(std::span<const double>(tt), 225, cfg, rng);
    REQUIRE(lp.peaks.size() == 1);
    CHECK(lp.peaks[0].intensity == 1.0);
  }
  SUBCASE("equal draws: the low-angle peak wins") {
    cfg.intensity_law = IntensityLaw::constant;
    RngStream rng(1, 1, 0, 0);
    double tt[] = {90.0, 30.0};
    auto lp = make_line_pattern(std::span<const double>(tt), 1, cfg, rng);
    CHECK(lp.peaks[0].two_theta == 30.0);
    CHECK(lp.peaks[0].intensity == 1.0);
    CHECK(lp.peaks[1].intensity == doctest::Approx(lorentz_factor(90) / lorentz_factor(30)));
  }
  SUBCASE("fixed seed reproduces the intensities") {
    double tt[] = {20.0, 31.0, 44.5, 60.0, 71.25};
    RngStream r1(99, 200, 7, 3), r2(99, 200, 7, 3), r3(99, 200, 7, 4);
    auto a = make_line_pattern(std::span<const double>(tt), 200, cfg, r1);
    auto b = make_line_pattern(std::span<const double>(tt), 200, cfg, r2);
    auto c = make_line_pattern(std::span<const double>(tt), 200, cfg, r3);
    bool differs = false;
    for (size_t i = 0; i < 5; ++i) {
      CHECK(a.peaks[i].intensity == b.peaks[i].intensity);
      differs |= a.peaks[i].intensity != c.peaks[i].intensity;
    }
    CHECK(differs);
  }
  SUBCASE("empty positions") {
    RngStream rng(0);
    CHECK_THROWS_AS(make_line_pattern(std::span<const double>(), 1, cfg, rng),
                    std::invalid_argument);
  }
}

TEST_CASE("uniform draws lie in (0, 1]") {
  RngStream rng(3);
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform_open_closed();
    REQUIRE(u > 0);
    REQUIRE(u <= 1);
  }
}

TEST_CASE("finish_line_pattern pass-through") {
  std::vector<LinePeak> peaks = {{50, 2.0}, {20, 4.0}, {30, 1.0}};
  auto lp = finish_line_pattern(peaks, 5, false);
  CHECK(lp.peaks[0].two_theta == 20);
  CHECK(lp.peaks[0].intensity == 1.0);
  CHECK(lp.peaks[1].intensity == 0.25);
  CHECK(lp.peaks[2].intensity == 0.5);
  CHECK_THROWS(finish_line_pattern({{20, 0.0}}, 5, false));
}

TEST_CASE("render") {
  PatternConfig cfg;
  cfg.two_theta_min = 10;
  cfg.two_theta_max = 110;
  cfg.n_points = 4001;  // step 0.025
  SUBCASE("peak on a grid point") {
    LinePattern lp{{{50.0, 0.7}}, 1, {}};
    auto rp = render(lp, cfg);
    CHECK(rp.samples.size() == 4001);
    CHECK(rp.samples(1600) == 1.0f);
    CHECK(rp.samples.maxCoeff() == 1.0f);
  }
  SUBCASE("tail bound beyond 5 FWHM") {
    LinePattern lp{{{50.0, 1.0}, {80.0, 0.3}}, 1, {}};
    auto rp = render(lp, cfg);
    for (int i = 0; i < cfg.n_points; ++i) {
      double x = cfg.grid_point(i);
      if (std::abs(x - 50) > 5 * cfg.fwhm && std::abs(x - 80) > 5 * cfg.fwhm)
        REQUIRE(rp.samples(i) < 1e-6f);
    }
  }
  SUBCASE("bitwise determinism") {
    LinePattern lp{{{23.3, 0.2}, {23.4, 1.0}, {99.9, 0.5}}, 1, {}};
    auto a = render(lp, cfg);
    auto b = render(lp, cfg);
    CHECK(std::memcmp(a.samples.data(), b.samples.data(), sizeof(float) * 4001) == 0);
  }
  SUBCASE("no peaks gives zeros") {
    auto rp = render(LinePattern{}, cfg);
    CHECK(rp.samples.isZero());
  }
  SUBCASE("invalid config") {
    cfg.n_points = 1;
    CHECK_THROWS(render(LinePattern{}, cfg));
  }
}

TEST_CASE("rendered patterns: range, normalization, locality") {
  PatternConfig cfg;
  cfg.n_points = 2000;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> pos(10, 110);
  std::uniform_int_distribution<int> count(1, 40);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> tt;
    for (int i = count(gen); i > 0; --i)
      tt.push_back(pos(gen));
    RngStream rng(7, 1, trial, 0);
    auto lp = make_line_pattern(std::span<const double>(tt), 1, cfg, rng);
    auto rp = render(lp, cfg);
    REQUIRE(rp.samples.minCoeff() >= 0.0f);
    REQUIRE(rp.samples.maxCoeff() == 1.0f);
    for (int i = 1; i + 1 < cfg.n_points; ++i) {
      if (rp.samples(i) > rp.samples(i - 1) && rp.samples(i) >= rp.samples(i + 1) &&
          rp.samples(i) > 1e-6f) {
        double x = cfg.grid_point(i);
        bool near = false;
        for (double p : tt)
          near |= std::abs(p - x) <= cfg.fwhm;
        REQUIRE_MESSAGE(near, "local maximum at " << x << " has no peak within one FWHM");
      }
    }
  }
}
