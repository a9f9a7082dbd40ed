#include "xtinct/dataset_io.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <random>

using namespace xtinct;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "xtinct_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

Dataset random_dataset(size_t n, int points, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<float> u(0, 1);
  Dataset ds;
  ds.two_theta_min = 10;
  ds.two_theta_max = 110;
  ds.samples.resize(static_cast<Eigen::Index>(n), points);
  for (size_t i = 0; i < n; ++i) {
    ds.labels.push_back(static_cast<std::uint16_t>(195 + i % 36));
    for (int j = 0; j < points; ++j)
      ds.samples(static_cast<Eigen::Index>(i), j) = u(gen);
  }
  ds.metadata = {{"note", "unit test"}};
  return ds;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("empty dataset is a valid file") {
  Dataset ds;
  ds.samples.resize(0, 4000);
  auto p = scratch("empty.ulbd");
  write_dataset(ds, p);
  CHECK(fs::file_size(p) == kDatasetHeaderBytes);
  auto back = read_dataset(p);
  CHECK(back.size() == 0);
  CHECK(back.n_points() == 4000);
}

TEST_CASE("file size and bitwise round trip") {
  Dataset ds = random_dataset(10, 4000, 1);
  ds.samples(3, 17) = -0.0f;
  ds.samples(4, 5) = std::numeric_limits<float>::denorm_min();
  auto p = scratch("ten.ulbd");
  write_dataset(ds, p);
  CHECK(fs::file_size(p) == kDatasetHeaderBytes + 10 * (2 + 4 * 4000));
  CHECK(container_size(10, 4000) == fs::file_size(p));

  auto back = read_dataset(p);
  CHECK(back.labels == ds.labels);
  CHECK(back.two_theta_min == 10.0f);
  CHECK(back.two_theta_max == 110.0f);
  REQUIRE(back.samples.rows() == 10);
  CHECK(std::memcmp(back.samples.data(), ds.samples.data(), sizeof(float) * 40000) == 0);
  CHECK(back.metadata["note"] == "unit test");
  CHECK(back.metadata["format"]["n_samples"] == 10);
  CHECK(fs::exists(scratch("ten.meta.json")));
}

TEST_CASE("header layout is little-endian and bit-exact") {
  Dataset ds = random_dataset(1, 3, 2);
  ds.labels[0] = 0x0102;
  auto p = scratch("layout.ulbd");
  write_dataset(ds, p);
  auto bytes = slurp(p);
  REQUIRE(bytes.size() == 26 + 2 + 12);
  CHECK(std::memcmp(bytes.data(), "ULBD", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);
  for (int i = 7; i < 14; ++i)
    CHECK(bytes[static_cast<size_t>(i)] == 0);
  CHECK(bytes[14] == 3);
  float tmin;
  std::memcpy(&tmin, bytes.data() + 18, 4);
  CHECK(tmin == 10.0f);
  CHECK(bytes[26] == 0x02);
  CHECK(bytes[27] == 0x01);
}

TEST_CASE("reader rejects damaged files") {
  Dataset ds = random_dataset(4, 50, 3);
  auto p = scratch("damaged.ulbd");
  write_dataset(ds, p);
  auto bytes = slurp(p);
  auto rewrite = [&](const std::vector<char>& b) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f.write(b.data(), static_cast<std::streamsize>(b.size()));
  };
  fs::remove(metadata_path(p));

  SUBCASE("truncated payload") {
    auto b = bytes;
    b.resize(b.size() - 7);
    rewrite(b);
    try {
      read_dataset(p);
      FAIL("expected a truncation error");
    } catch (const DatasetFormatError& e) {
      CHECK(e.offset == b.size());
      CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    }
  }
  SUBCASE("truncated header") {
    rewrite(std::vector<char>(bytes.begin(), bytes.begin() + 10));
    CHECK_THROWS_AS(read_dataset(p), DatasetFormatError);
  }
  SUBCASE("trailing bytes") {
    auto b = bytes;
    b.push_back(0);
    rewrite(b);
    CHECK_THROWS_AS(read_dataset(p), DatasetFormatError);
  }
  SUBCASE("version bump") {
    auto b = bytes;
    b[4] = 2;
    rewrite(b);
    try {
      read_dataset(p);
      FAIL("expected a version error");
    } catch (const DatasetFormatError& e) {
      CHECK(e.offset == 4);
      CHECK(std::string(e.what()).find("version") != std::string::npos);
    }
  }
  SUBCASE("bad magic") {
    auto b = bytes;
    b[0] = 'X';
    rewrite(b);
    CHECK_THROWS_AS(read_dataset(p), DatasetFormatError);
  }
  SUBCASE("declared count larger than the file") {
    auto b = bytes;
    b[6] = 5;
    rewrite(b);
    CHECK_THROWS_AS(read_dataset(p), DatasetFormatError);
  }
}

TEST_CASE("heterogeneous label count is refused") {
  Dataset ds = random_dataset(3, 5, 4);
  ds.labels.pop_back();
  CHECK_THROWS_AS(write_dataset(ds, scratch("bad.ulbd")), DatasetIoError);
}

TEST_CASE("round trip holds for random shapes") {
  std::mt19937 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    size_t n = gen() % 30;
    int points = 2 + static_cast<int>(gen() % 300);
    Dataset ds = random_dataset(n, points, gen());
    auto p = scratch("prop.ulbd");
    write_dataset(ds, p);
    auto back = read_dataset(p);
    REQUIRE(back.labels == ds.labels);
    REQUIRE(back.n_points() == static_cast<size_t>(points));
    REQUIRE(std::memcmp(back.samples.data(), ds.samples.data(),
                        sizeof(float) * n * static_cast<size_t>(points)) == 0);
  }
}

TEST_CASE("csv export") {
  Dataset ds = random_dataset(2, 3, 5);
  ds.samples.setConstant(0.5f);
  auto p = scratch("spot.csv");
  write_csv(ds, p);
  auto text = slurp(p);
  CHECK(std::string(text.begin(), text.end()) == "195,0.5,0.5,0.5\n196,0.5,0.5,0.5\n");
}
