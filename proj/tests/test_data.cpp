#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "lsdc/data.hpp"
#include "lsdc/types.hpp"

using namespace lsdc;

namespace {

std::string tmp_path(const char* name) {
  return std::string("data_test_") + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
}

}  // namespace

TEST_CASE("binary round trip is exact") {
  Matrix m(3, 4);
  const real vals[] = {real(0.5), real(-1.25), real(3),   real(0),   real(0.125),
                       real(7.5), real(-0.0625), real(2), real(100), real(-8),
                       real(0.75), real(42)};
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = vals[i];
  LabelVector labels = {2, 0, 1};

  const std::string path = tmp_path("roundtrip.bin");
  save_features(path, m, &labels);
  const Dataset ds = load_features(path, FileFormat::Binary);
  CHECK(ds.features == m);
  REQUIRE(ds.labels.has_value());
  CHECK(*ds.labels == labels);
  std::remove(path.c_str());
}

TEST_CASE("binary file without labels") {
  Matrix m(2, 2);
  m(0, 0) = 1; m(0, 1) = 2; m(1, 0) = 3; m(1, 1) = 4;
  const std::string path = tmp_path("nolabels.bin");
  save_features(path, m, nullptr);
  const Dataset ds = load_features(path, FileFormat::Binary);
  CHECK(ds.features == m);
  CHECK(!ds.labels.has_value());
  std::remove(path.c_str());
}

TEST_CASE("csv basic parse") {
  const std::string path = tmp_path("basic.csv");
  write_file(path, "0.0,0.0\n1.0,0.0\n");
  const Dataset ds = load_features(path, FileFormat::Csv);
  REQUIRE(ds.features.rows() == 2);
  REQUIRE(ds.features.cols() == 2);
  CHECK(ds.features(1, 0) == 1.0);
  CHECK(!ds.labels.has_value());
  std::remove(path.c_str());
}

TEST_CASE("csv round trip within 1e-6") {
  Matrix m(4, 3);
  Rng rng(5);
  for (std::size_t i = 0; i < m.size(); ++i)
    m.data()[i] = static_cast<real>(rng.uniform(-10.0, 10.0));
  LabelVector labels = {0, 1, 2, 1};
  const std::string path = tmp_path("roundtrip.csv");
  save_features_csv(path, m, &labels);
  const Dataset ds = load_features(path, FileFormat::Csv, true);
  REQUIRE(ds.features.rows() == 4);
  REQUIRE(ds.features.cols() == 3);
  for (std::size_t i = 0; i < m.size(); ++i)
    CHECK(std::abs(ds.features.data()[i] - m.data()[i]) < 1e-6);
  REQUIRE(ds.labels.has_value());
  CHECK(*ds.labels == labels);
  std::remove(path.c_str());
}

TEST_CASE("csv row length mismatch names the row") {
  const std::string path = tmp_path("ragged.csv");
  write_file(path, "1,2,3\n4,5,6\n7,8\n");
  try {
    load_features(path, FileFormat::Csv);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("csv bad value rejected") {
  const std::string path = tmp_path("badval.csv");
  write_file(path, "1,2\n3,oops\n");
  CHECK_THROWS_AS(load_features(path, FileFormat::Csv), DataError);
  std::remove(path.c_str());
}

TEST_CASE("binary malformed inputs") {
  const std::string path = tmp_path("bad.bin");

  write_file(path, "NOPE");
  CHECK_THROWS_AS(load_features(path, FileFormat::Binary), DataError);

  // Valid magic, truncated payload.
  {
    std::ofstream os(path, std::ios::binary);
    os.write("LSDC", 4);
    const std::uint32_t header[3] = {3, 4, 0};
    os.write(reinterpret_cast<const char*>(header), 12);
    const float one = 1.0f;
    os.write(reinterpret_cast<const char*>(&one), 4);
  }
  CHECK_THROWS_AS(load_features(path, FileFormat::Binary), DataError);

  // Non-finite value.
  {
    std::ofstream os(path, std::ios::binary);
    os.write("LSDC", 4);
    const std::uint32_t header[3] = {1, 1, 0};
    os.write(reinterpret_cast<const char*>(header), 12);
    const std::uint32_t inf_bits = 0x7f800000u;
    os.write(reinterpret_cast<const char*>(&inf_bits), 4);
  }
  CHECK_THROWS_AS(load_features(path, FileFormat::Binary), DataError);

  // Label out of range.
  {
    std::ofstream os(path, std::ios::binary);
    os.write("LSDC", 4);
    const std::uint32_t header[3] = {2, 1, 1};
    os.write(reinterpret_cast<const char*>(header), 12);
    const float vals[2] = {1.0f, 2.0f};
    os.write(reinterpret_cast<const char*>(vals), 8);
    const std::uint32_t labels[2] = {5, 0};
    os.write(reinterpret_cast<const char*>(labels), 8);
  }
  CHECK_THROWS_AS(load_features(path, FileFormat::Binary), DataError);

  std::remove(path.c_str());
  CHECK_THROWS_AS(load_features(path, FileFormat::Binary), DataError);
}

TEST_CASE("save rejects bad inputs") {
  Matrix m(1, 1);
  m(0, 0) = std::numeric_limits<real>::infinity();
  CHECK_THROWS_AS(save_features("x.bin", m, nullptr), DataError);
  m(0, 0) = 1;
  LabelVector wrong = {0, 1};
  CHECK_THROWS_AS(save_features("x.bin", m, &wrong), DataError);
}

TEST_CASE("two moons with zero noise lies on the arcs") {
  Rng rng(0);
  const Dataset ds = gen_two_moons(4, 0, rng);
  REQUIRE(ds.features.rows() == 4);
  REQUIRE(ds.labels.has_value());
  CHECK(*ds.labels == LabelVector{0, 0, 1, 1});
  // Moon 0: t in {0, pi} -> (1,0), (-1,0). Moon 1: (0,0.5), (2,0.5).
  CHECK(ds.features(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ds.features(0, 1) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(ds.features(1, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ds.features(2, 0) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
  CHECK(ds.features(2, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ds.features(3, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ds.features(3, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero-noise moons are unit distance from their moon's center") {
  Rng rng(3);
  const Dataset ds = gen_two_moons(50, 0, rng);
  for (std::size_t i = 0; i < 25; ++i) {
    const real d = std::hypot(ds.features(i, 0), ds.features(i, 1));
    CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (std::size_t i = 25; i < 50; ++i) {
    const real d = std::hypot(ds.features(i, 0) - real(1), ds.features(i, 1) - real(0.5));
    CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("moons class means separated in y") {
  Rng rng(7);
  const Dataset ds = gen_two_moons(1000, real(0.05), rng);
  double y0 = 0, y1 = 0;
  for (std::size_t i = 0; i < 500; ++i) y0 += ds.features(i, 1);
  for (std::size_t i = 500; i < 1000; ++i) y1 += ds.features(i, 1);
  CHECK(y0 / 500 - y1 / 500 >= 0.5);
}

TEST_CASE("generators are deterministic under a fixed seed") {
  Rng a(7), b(7);
  const Dataset d1 = gen_two_moons(200, real(0.05), a);
  const Dataset d2 = gen_two_moons(200, real(0.05), b);
  CHECK(d1.features == d2.features);

  Rng c(9), d(9);
  const std::vector<std::vector<real>> centers = {{0, 0}, {10, 10}};
  CHECK(gen_blobs(20, centers, real(0.3), c).features ==
        gen_blobs(20, centers, real(0.3), d).features);
}

TEST_CASE("blobs with zero sigma emit the centers") {
  Rng rng(1);
  const std::vector<std::vector<real>> centers = {{0, 0}, {10, 10}};
  const Dataset ds = gen_blobs(2, centers, 0, rng);
  REQUIRE(ds.features.rows() == 4);
  CHECK(ds.features(0, 0) == 0);
  CHECK(ds.features(1, 1) == 0);
  CHECK(ds.features(2, 0) == 10);
  CHECK(ds.features(3, 1) == 10);
  CHECK(*ds.labels == LabelVector{0, 0, 1, 1});
}

TEST_CASE("generator argument validation") {
  Rng rng(0);
  CHECK_THROWS_AS(gen_two_moons(1, 0, rng), ConfigError);
  CHECK_THROWS_AS(gen_two_moons(10, -1, rng), ConfigError);
  CHECK_THROWS_AS(gen_blobs(0, {{0, 0}, {1, 1}}, 1, rng), ConfigError);
  CHECK_THROWS_AS(gen_blobs(2, {{0, 0}}, 1, rng), ConfigError);
  CHECK_THROWS_AS(gen_blobs(2, {{0, 0}, {1, 1, 1}}, 1, rng), ConfigError);
  CHECK_THROWS_AS(gen_blobs(2, {{0, 0}, {1, 1}}, -1, rng), ConfigError);
}

TEST_CASE("augment with zero strength is the identity") {
  Rng rng(2);
  Matrix m(3, 3);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = static_cast<real>(i);
  CHECK(augment(m, AugmentMode::GaussianNoise, 0, rng) == m);
  CHECK(augment(m, AugmentMode::FeatureDropout, 0, rng) == m);
}

TEST_CASE("gaussian noise has the configured variance") {
  Rng rng(21);
  Matrix m(1000, 10, 0);
  const Matrix out = augment(m, AugmentMode::GaussianNoise, real(0.1), rng);
  double sum = 0, sum2 = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    sum += out.data()[i];
    sum2 += out.data()[i] * out.data()[i];
  }
  const double n = static_cast<double>(out.size());
  const double var = sum2 / n - (sum / n) * (sum / n);
  CHECK(var >= 0.008);
  CHECK(var <= 0.012);
}

TEST_CASE("feature dropout zeroes or rescales") {
  Rng rng(4);
  Matrix ones(1, 4, 1);
  const Matrix out = augment(ones, AugmentMode::FeatureDropout, real(0.5), rng);
  for (std::size_t i = 0; i < out.size(); ++i)
    CHECK((out.data()[i] == 0 || out.data()[i] == 2));

  Matrix big(100, 100, 1);
  const Matrix bout = augment(big, AugmentMode::FeatureDropout, real(0.3), rng);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < bout.size(); ++i)
    if (bout.data()[i] == 0) ++zeros;
  const double frac = static_cast<double>(zeros) / static_cast<double>(bout.size());
  CHECK(frac > 0.25);
  CHECK(frac < 0.35);

  CHECK_THROWS_AS(augment(ones, AugmentMode::FeatureDropout, 1, rng), ConfigError);
  CHECK_THROWS_AS(augment(ones, AugmentMode::GaussianNoise, -1, rng), ConfigError);
}
