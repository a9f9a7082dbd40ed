#include "xtinct/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace xtinct {

namespace {

// Gaussian contributions beyond this many FWHM are below 1e-120.
constexpr double kRenderCutoffFwhm = 10.0;

}  // namespace

std::string_view to_string(IntensityLaw law) {
  switch (law) {
    case IntensityLaw::uniform: return "uniform";
    case IntensityLaw::constant: return "constant";
  }
  return "?";
}

IntensityLaw parse_intensity_law(std::string_view name) {
  if (name == "uniform")
    return IntensityLaw::uniform;
  if (name == "constant")
    return IntensityLaw::constant;
  throw std::invalid_argument("unknown intensity law '" + std::string(name) + "'");
}

void PatternConfig::validate() const {
  if (!(two_theta_min > 0 && two_theta_min < two_theta_max && two_theta_max < 180))
    throw std::invalid_argument("2-theta window must satisfy 0 < min < max < 180");
  if (n_points < 2)
    throw std::invalid_argument("n_points must be >= 2");
  if (!(fwhm > 0))
    throw std::invalid_argument("fwhm must be positive");
  if (!(wavelength > 0))
    throw std::invalid_argument("wavelength must be positive");
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, int label, long lattice_index, int replicate) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(label));
  h = mix64(h ^ static_cast<std::uint64_t>(lattice_index));
  h = mix64(h ^ static_cast<std::uint64_t>(replicate));
  engine_.seed(h);
}

double RngStream::uniform_open_closed() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double lorentz_factor(double two_theta_deg) {
  if (!(two_theta_deg > 0 && two_theta_deg < 180))
    throw std::domain_error("Lorentz factor needs 0 < 2theta < 180");
  const double theta = deg2rad(two_theta_deg) / 2;
  const double s = std::sin(theta);
  return 1.0 / (s * s * std::cos(theta));
}

LinePattern finish_line_pattern(std::vector<LinePeak> peaks, int label,
                                bool apply_lorentz) {
  if (peaks.empty())
    throw std::invalid_argument("line pattern needs at least one peak");
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const LinePeak& x, const LinePeak& y) { return x.two_theta < y.two_theta; });
  double top = 0;
  for (LinePeak& p : peaks) {
    if (!(p.intensity >= 0))
      throw std::invalid_argument("peak intensities must be non-negative");
    if (apply_lorentz)
      p.intensity *= lorentz_factor(p.two_theta);
    top = std::max(top, p.intensity);
  }
  if (!(top > 0))
    throw std::invalid_argument("line pattern has no positive intensity");
  for (LinePeak& p : peaks)
    p.intensity /= top;
  return {std::move(peaks), label, {}};
}

LinePattern make_line_pattern(std::span<const double> two_thetas, int label,
                              const PatternConfig& cfg, RngStream& rng) {
  if (two_thetas.empty())
    throw std::invalid_argument("no allowed peak positions");
  std::vector<LinePeak> peaks;
  peaks.reserve(two_thetas.size());
  for (double tt : two_thetas) {
    double draw = cfg.intensity_law == IntensityLaw::uniform ? rng.uniform_open_closed() : 1.0;
    peaks.push_back({tt, draw});
  }
  return finish_line_pattern(std::move(peaks), label, true);
}

LinePattern make_line_pattern(std::span<const PeakPosition> positions, int label,
                              const PatternConfig& cfg, RngStream& rng) {
  std::vector<double> tt;
  tt.reserve(positions.size());
  for (const PeakPosition& pos : positions)
    tt.push_back(pos.two_theta);
  return make_line_pattern(std::span<const double>(tt), label, cfg, rng);
}

RenderedPattern render(const LinePattern& lp, const PatternConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_points;
  const double step = cfg.grid_step();
  const double scale = 4 * std::numbers::ln2 / (cfg.fwhm * cfg.fwhm);
  const double reach = kRenderCutoffFwhm * cfg.fwhm;

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (const LinePeak& p : lp.peaks) {
    if (p.intensity <= 0)
      continue;
    int lo = static_cast<int>(std::ceil((p.two_theta - reach - cfg.two_theta_min) / step));
    int hi = static_cast<int>(std::floor((p.two_theta + reach - cfg.two_theta_min) / step));
    lo = std::max(lo, 0);
    hi = std::min(hi, n - 1);
    for (int i = lo; i <= hi; ++i) {
      const double dx = cfg.grid_point(i) - p.two_theta;
      acc(i) += p.intensity * std::exp(-scale * dx * dx);
    }
  }
  const double top = acc.maxCoeff();
  if (top > 0)
    acc /= top;
  // Tails are cut where the product of two samples would turn subnormal;
  // subnormal arithmetic makes every later dot product crawl.
  const float floor = std::sqrt(std::numeric_limits<float>::min());
  Eigen::VectorXf out = acc.cast<float>();
  out = (out.array() < floor).select(0.0f, out);
  return {std::move(out), lp.label, lp.provenance};
}

}  // namespace xtinct
