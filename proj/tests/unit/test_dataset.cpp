#include <filesystem>
#include <random>

#include "advsharp/dataset.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace advsharp;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an advsharp::Error");
  return ErrorKind::InvalidArgument;
}

struct IdxFixture {
  fs::path dir = oracle::temp_dir("idx");
  fs::path images = dir / "images";
  fs::path labels = dir / "labels";
  ~IdxFixture() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("dataset rejects values outside its invariants") {
  FeatureMatrix x(2, 2);
  x << 0.0, 1.0, 0.5, 0.25;
  CHECK_NOTHROW(Dataset(x, Vector::Ones(2), "ok"));
  CHECK(kind_of([&] { Dataset(x, Vector::Ones(3), "bad"); }) == ErrorKind::Dimension);
  Vector y(2);
  y << 1, 0;
  CHECK(kind_of([&] { Dataset(x, y, "bad"); }) == ErrorKind::Data);
  x(0, 0) = 1.5;
  CHECK(kind_of([&] { Dataset(x, Vector::Ones(2), "bad"); }) == ErrorKind::Data);
  CHECK(kind_of([&] { Dataset(FeatureMatrix(0, 3), Vector(0), "empty"); }) == ErrorKind::Data);
}

TEST_CASE("load_idx reads a 4-image 2x2 fixture") {
  IdxFixture f;
  oracle::write_idx_images(f.images, 4, 2, 2, {0, 255, 51, 102, 1, 2, 3, 4, 9, 9, 9, 9, 255, 255, 0, 0});
  oracle::write_idx_labels(f.labels, {0, 3, 1, 7});
  const DigitImages img = load_idx(f.images, f.labels);
  CHECK(img.features.rows() == 4);
  CHECK(img.features.cols() == 4);
  CHECK(img.rows == 2);
  CHECK(img.cols == 2);
  CHECK(img.features(0, 1) == 1.0);
  CHECK(img.features(0, 0) == 0.0);
  CHECK(img.features(0, 2) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(img.digits == std::vector<std::uint8_t>{0, 3, 1, 7});
}

TEST_CASE("load_idx error kinds") {
  IdxFixture f;
  const std::vector<unsigned char> px(8, 7);
  SUBCASE("bad image magic") {
    oracle::write_idx_images(f.images, 2, 2, 2, px, 0x804);
    oracle::write_idx_labels(f.labels, {0, 1});
    CHECK(kind_of([&] { load_idx(f.images, f.labels); }) == ErrorKind::Format);
  }
  SUBCASE("bad label magic") {
    oracle::write_idx_images(f.images, 2, 2, 2, px);
    oracle::write_idx_labels(f.labels, {0, 1}, 0x803);
    CHECK(kind_of([&] { load_idx(f.images, f.labels); }) == ErrorKind::Format);
  }
  SUBCASE("count mismatch") {
    oracle::write_idx_images(f.images, 2, 2, 2, px);
    oracle::write_idx_labels(f.labels, {0, 1, 1});
    CHECK(kind_of([&] { load_idx(f.images, f.labels); }) == ErrorKind::Consistency);
  }
  SUBCASE("truncated pixels") {
    oracle::write_idx_images(f.images, 3, 2, 2, px);
    oracle::write_idx_labels(f.labels, {0, 1, 1});
    CHECK(kind_of([&] { load_idx(f.images, f.labels); }) == ErrorKind::Io);
  }
  SUBCASE("truncated labels") {
    oracle::write_idx_images(f.images, 2, 2, 2, px);
    oracle::write_idx_labels(f.labels, {0}, 0x801, 2);
    CHECK(kind_of([&] { load_idx(f.images, f.labels); }) == ErrorKind::Io);
  }
  SUBCASE("missing file") {
    CHECK(kind_of([&] { load_idx(f.dir / "nope", f.dir / "nope2"); }) == ErrorKind::Io);
  }
}

TEST_CASE("filter_mnist2 keeps 0 and 1 in order") {
  DigitImages img;
  img.features = FeatureMatrix::Zero(3, 2);
  img.features(0, 0) = 0.1;
  img.features(2, 1) = 0.9;
  img.digits = {0, 3, 1};
  const Dataset d = filter_mnist2(img);
  REQUIRE(d.size() == 2);
  CHECK(d.labels()[0] == -1.0);
  CHECK(d.labels()[1] == 1.0);
  CHECK(d.features()(0, 0) == 0.1);
  CHECK(d.features()(1, 1) == 0.9);

  img.digits = {2, 3, 9};
  CHECK(kind_of([&] { filter_mnist2(img); }) == ErrorKind::Data);
}

TEST_CASE("filter_mnist2 is idempotent after mapping labels back") {
  std::mt19937_64 eng(3);
  DigitImages img;
  img.features = FeatureMatrix::Random(40, 5).cwiseAbs();
  for (int i = 0; i < 40; ++i) img.digits.push_back(static_cast<std::uint8_t>(eng() % 10));
  img.digits[0] = 1;
  const Dataset once = filter_mnist2(img);
  DigitImages back;
  back.features = once.features();
  for (Eigen::Index i = 0; i < once.size(); ++i) back.digits.push_back(once.labels()[i] > 0 ? 1 : 0);
  const Dataset twice = filter_mnist2(back);
  CHECK(twice.features() == once.features());
  CHECK(twice.labels() == once.labels());
}

TEST_CASE("load then filter: random IDX fixtures always satisfy the invariants") {
  IdxFixture f;
  std::mt19937_64 eng(11);
  for (int t = 0; t < 20; ++t) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(eng() % 30), r = 1 + eng() % 4, c = 1 + eng() % 4;
    std::vector<unsigned char> px(n * r * c), lab(n);
    for (auto& p : px) p = static_cast<unsigned char>(eng());
    for (auto& l : lab) l = static_cast<unsigned char>(eng() % 10);
    lab[0] = static_cast<unsigned char>(eng() % 2);
    oracle::write_idx_images(f.images, n, r, c, px);
    oracle::write_idx_labels(f.labels, lab);
    const Dataset d = filter_mnist2(load_idx(f.images, f.labels));
    CHECK(d.features().minCoeff() >= 0.0);
    CHECK(d.features().maxCoeff() <= 1.0);
    CHECK(d.dim() == static_cast<Eigen::Index>(r * c));
    for (Eigen::Index i = 0; i < d.size(); ++i) CHECK(std::abs(d.labels()[i]) == 1.0);
  }
}

TEST_CASE("bundled MNIST subset loads with the canonical file names") {
  const fs::path dir = fs::path(ADVSHARP_TEST_DATA) / "mnist_subset";
  REQUIRE(has_mnist_files(dir));
  const auto s = load_mnist2(dir);
  CHECK(s.train.dim() == 784);
  CHECK(s.test.dim() == 784);
  CHECK(s.train.size() > 1000);
  CHECK((s.train.labels().array() == -1.0).any());
  CHECK((s.train.labels().array() == 1.0).any());
  CHECK_FALSE(has_mnist_files(fs::path(ADVSHARP_TEST_DATA) / "does_not_exist"));
}

TEST_CASE("synth_separable") {
  const Dataset a = synth_separable(10, 2, 0.3, 7);
  const Dataset b = synth_separable(10, 2, 0.3, 7);
  CHECK(a.features() == b.features());
  CHECK(a.labels() == b.labels());
  CHECK(a.size() == 20);
  CHECK(synth_separable(1, 3, 0.3, 1).size() == 2);
  CHECK(synth_separable(10, 2, 0.3, 8).features() != a.features());
  CHECK(kind_of([] { synth_separable(5, 1, 0.3, 1); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { synth_separable(5, 3, 0.0, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("with_bias_column appends a constant feature") {
  const Dataset a = synth_separable(3, 2, 0.3, 1);
  const Dataset b = with_bias_column(a);
  CHECK(b.dim() == 3);
  CHECK((b.features().col(2).array() == 1.0).all());
  CHECK(b.features().leftCols(2) == a.features());
}

TEST_CASE("8x8 digits export loads as a 64-dimensional separable two-class set") {
  const fs::path dir = fs::path(ADVSHARP_TEST_DATA) / "digits";
  REQUIRE(has_mnist_files(dir));
  const auto s = load_mnist2(dir);
  CHECK(s.train.dim() == 64);
  CHECK(s.test.dim() == 64);
  CHECK(s.train.size() + s.test.size() > 300);
  CHECK(s.train.features().maxCoeff() == 1.0);
}
