#include "xtinct/dataset_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace xtinct {

namespace {

template <typename UInt>
void put_le(std::vector<unsigned char>& out, UInt v) {
  for (size_t i = 0; i < sizeof(UInt); ++i)
    out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

template <typename UInt>
UInt get_le(const unsigned char* p) {
  UInt v = 0;
  for (size_t i = 0; i < sizeof(UInt); ++i)
    v |= static_cast<UInt>(static_cast<UInt>(p[i]) << (8 * i));
  return v;
}

void write_bytes_synced(const std::filesystem::path& path, const void* data, size_t n) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0)
    throw DatasetIoError("cannot open " + path.string() + ": " + std::strerror(errno));
  const char* p = static_cast<const char*>(data);
  while (n > 0) {
    ssize_t w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR)
        continue;
      int err = errno;
      ::close(fd);
      throw DatasetIoError("write to " + path.string() + " failed: " + std::strerror(err));
    }
    p += w;
    n -= static_cast<size_t>(w);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0)
    throw DatasetIoError("cannot sync " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

std::uint64_t container_size(std::uint64_t n_samples, std::uint32_t n_points) {
  return kDatasetHeaderBytes + n_samples * (2 + 4 * static_cast<std::uint64_t>(n_points));
}

std::filesystem::path metadata_path(const std::filesystem::path& container) {
  std::filesystem::path p = container;
  return p.replace_extension(".meta.json");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_bytes_synced(path, text.data(), text.size());
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  if (ds.labels.size() != static_cast<size_t>(ds.samples.rows()))
    throw DatasetIoError("label count does not match sample rows");
  if (ds.samples.cols() > std::numeric_limits<std::uint32_t>::max())
    throw DatasetIoError("too many points per sample");
  const auto n_points = static_cast<std::uint32_t>(ds.samples.cols());

  std::vector<unsigned char> buf;
  buf.reserve(container_size(ds.labels.size(), n_points));
  buf.insert(buf.end(), kDatasetMagic, kDatasetMagic + 4);
  put_le<std::uint16_t>(buf, kDatasetVersion);
  put_le<std::uint64_t>(buf, ds.labels.size());
  put_le<std::uint32_t>(buf, n_points);
  put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(ds.two_theta_min));
  put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(ds.two_theta_max));
  for (size_t i = 0; i < ds.labels.size(); ++i) {
    put_le<std::uint16_t>(buf, ds.labels[i]);
    for (std::uint32_t j = 0; j < n_points; ++j)
      put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(ds.samples(static_cast<Eigen::Index>(i), j)));
  }
  write_bytes_synced(path, buf.data(), buf.size());

  nlohmann::json meta = ds.metadata.is_null() ? nlohmann::json::object() : ds.metadata;
  meta["format"] = {{"magic", "ULBD"},
                    {"version", kDatasetVersion},
                    {"n_samples", ds.labels.size()},
                    {"n_points", n_points},
                    {"container", path.filename().string()}};
  write_text_file(metadata_path(path), meta.dump(2) + "\n");
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw DatasetIoError("cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < kDatasetHeaderBytes)
    throw DatasetFormatError("truncated header", buf.size());
  if (std::memcmp(buf.data(), kDatasetMagic, 4) != 0)
    throw DatasetFormatError("bad magic, not a ULBD container", 0);
  auto version = get_le<std::uint16_t>(buf.data() + 4);
  if (version != kDatasetVersion)
    throw DatasetFormatError("unsupported container version " + std::to_string(version), 4);
  auto n_samples = get_le<std::uint64_t>(buf.data() + 6);
  auto n_points = get_le<std::uint32_t>(buf.data() + 14);

  const std::uint64_t record = 2 + 4 * static_cast<std::uint64_t>(n_points);
  if (n_samples > (std::numeric_limits<std::uint64_t>::max() - kDatasetHeaderBytes) / record)
    throw DatasetFormatError("declared sample count overflows", 6);
  const std::uint64_t expected = container_size(n_samples, n_points);
  if (buf.size() < expected)
    throw DatasetFormatError("truncated: header declares " + std::to_string(n_samples) +
                                 " samples but the file ends early",
                             buf.size());
  if (buf.size() > expected)
    throw DatasetFormatError("trailing bytes after the declared samples", expected);

  Dataset ds;
  ds.two_theta_min = std::bit_cast<float>(get_le<std::uint32_t>(buf.data() + 18));
  ds.two_theta_max = std::bit_cast<float>(get_le<std::uint32_t>(buf.data() + 22));
  ds.labels.resize(n_samples);
  ds.samples.resize(static_cast<Eigen::Index>(n_samples), n_points);
  const unsigned char* p = buf.data() + kDatasetHeaderBytes;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    ds.labels[i] = get_le<std::uint16_t>(p);
    p += 2;
    for (std::uint32_t j = 0; j < n_points; ++j, p += 4)
      ds.samples(static_cast<Eigen::Index>(i), j) = std::bit_cast<float>(get_le<std::uint32_t>(p));
  }

  if (auto mp = metadata_path(path); std::filesystem::exists(mp)) {
    std::ifstream mf(mp);
    try {
      ds.metadata = nlohmann::json::parse(mf);
    } catch (const nlohmann::json::exception& e) {
      throw DatasetIoError("cannot parse " + mp.string() + ": " + e.what());
    }
    if (auto it = ds.metadata.find("format"); it != ds.metadata.end() &&
                                              it->value("n_samples", n_samples) != n_samples)
      throw DatasetFormatError("metadata sample count disagrees with container", 6);
  }
  return ds;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(9);
  for (size_t i = 0; i < ds.size(); ++i) {
    out << ds.labels[i];
    for (Eigen::Index j = 0; j < ds.samples.cols(); ++j)
      out << ',' << ds.samples(static_cast<Eigen::Index>(i), j);
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace xtinct
