// Line patterns (random intensities, Lorentz correction, normalization) and
// their rendering onto a uniform 2-theta grid by Gaussian convolution.

#ifndef XTINCT_PATTERN_HPP_
#define XTINCT_PATTERN_HPP_

#include "xtinct/reflection.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace xtinct {

enum class IntensityLaw {
  uniform,   // U(0, 1]
  constant,  // every peak 1 before correction
};

std::string_view to_string(IntensityLaw law);
IntensityLaw parse_intensity_law(std::string_view name);

struct PatternConfig {
  double wavelength = kDefaultWavelength;
  double two_theta_min = 10.0;
  double two_theta_max = 110.0;
  int n_points = 4000;
  double fwhm = 0.2;  // degrees, Gaussian
  IntensityLaw intensity_law = IntensityLaw::uniform;
  std::uint64_t seed = 0;

  AngleWindow window() const { return {two_theta_min, two_theta_max}; }
  double grid_step() const { return (two_theta_max - two_theta_min) / (n_points - 1); }
  double grid_point(int i) const { return two_theta_min + i * grid_step(); }
  /// Throws std::invalid_argument unless 0 < min < max < 180, n_points >= 2,
  /// fwhm > 0 and wavelength > 0.
  void validate() const;
};

struct Provenance {
  std::vector<double> lattice;  // free parameters of the family, in order
  long lattice_index = -1;
  int replicate = 0;
};

struct LinePeak {
  double two_theta;
  double intensity;
};

struct LinePattern {
  std::vector<LinePeak> peaks;  // ascending two_theta, max intensity 1
  int label = 0;
  Provenance provenance;
};

struct RenderedPattern {
  Eigen::VectorXf samples;
  int label = 0;
  Provenance provenance;
};

/// Independent random stream for one sample. The key fixes the stream, so
/// results do not depend on generation order or worker count.
class RngStream {
public:
  RngStream(std::uint64_t seed, int label, long lattice_index, int replicate);
  explicit RngStream(std::uint64_t raw_seed) : engine_(raw_seed) {}

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open_closed();
  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to combine seed components.
std::uint64_t mix64(std::uint64_t x);

/// Powder Lorentz factor 1 / (sin^2(theta) cos(theta)), theta = 2theta / 2.
double lorentz_factor(double two_theta_deg);

/// Draw one intensity per position, apply the Lorentz factor and scale so
/// the strongest peak is exactly 1. Throws std::invalid_argument on an empty
/// position list.
LinePattern make_line_pattern(std::span<const PeakPosition> positions, int label,
                              const PatternConfig& cfg, RngStream& rng);
/// Same, from bare 2-theta positions (degrees).
LinePattern make_line_pattern(std::span<const double> two_thetas, int label,
                              const PatternConfig& cfg, RngStream& rng);

/// Shared tail for externally supplied intensities: optional Lorentz
/// correction, then normalization to max 1. Peaks are sorted by position.
/// Throws std::invalid_argument if nothing positive remains.
LinePattern finish_line_pattern(std::vector<LinePeak> peaks, int label,
                                bool apply_lorentz);

/// samples[i] = sum_p I_p exp(-4 ln2 (x_i - x_p)^2 / fwhm^2), rescaled so the
/// largest sample is 1 whenever any sample is positive. Samples below
/// sqrt(FLT_MIN) (about 1e-19) are stored as 0.
RenderedPattern render(const LinePattern& lp, const PatternConfig& cfg);

}  // namespace xtinct

#endif  // XTINCT_PATTERN_HPP_
