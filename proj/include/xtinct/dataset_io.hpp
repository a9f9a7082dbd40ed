// On-disk dataset artifact.
//
// Container (all integers and floats little-endian):
//   offset 0   magic "ULBD"
//          4   version        u16
//          6   n_samples      u64
//         14   n_points       u32
//         18   two_theta_min  f32
//         22   two_theta_max  f32
//         26   n_samples x { label u16, n_points x f32 }
// Metadata lives next to it as <stem>.meta.json.

#ifndef XTINCT_DATASET_IO_HPP_
#define XTINCT_DATASET_IO_HPP_

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace xtinct {

inline constexpr char kDatasetMagic[4] = {'U', 'L', 'B', 'D'};
inline constexpr std::uint16_t kDatasetVersion = 1;
inline constexpr std::size_t kDatasetHeaderBytes = 26;

using SampleMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Dataset {
  float two_theta_min = 0;
  float two_theta_max = 0;
  std::vector<std::uint16_t> labels;
  SampleMatrix samples;  // one row per sample
  nlohmann::json metadata;

  std::size_t size() const { return labels.size(); }
  std::size_t n_points() const { return static_cast<std::size_t>(samples.cols()); }
};

struct DatasetFormatError : std::runtime_error {
  DatasetFormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::uint64_t offset;
};

struct DatasetIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Byte size of a container holding n samples of n_points each.
std::uint64_t container_size(std::uint64_t n_samples, std::uint32_t n_points);

std::filesystem::path metadata_path(const std::filesystem::path& container);

/// Write container and sidecar; both are flushed to stable storage before
/// returning. Throws DatasetIoError on I/O failure or when the label count
/// does not match the sample rows.
void write_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Read and validate a container (and its sidecar, when present).
/// Throws DatasetFormatError with the offending byte offset.
Dataset read_dataset(const std::filesystem::path& path);

/// Spot-check export: one row per sample, label then intensities.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

/// Write text and fsync it.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace xtinct

#endif  // XTINCT_DATASET_IO_HPP_
