#include "advsharp/dataset.hpp"

#include <array>
#include <fstream>
#include <random>

#include "advsharp/rng.hpp"

namespace advsharp {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (in.gcount() != 4) fail(ErrorKind::Io, "truncated IDX header in " + path.string());
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

Dataset::Dataset(FeatureMatrix features, Vector labels, std::string name)
    : features_(std::move(features)), labels_(std::move(labels)), name_(std::move(name)) {
  require(features_.rows() >= 1 && features_.cols() >= 1, ErrorKind::Data,
          "dataset needs at least one sample and one feature");
  require(features_.rows() == labels_.size(), ErrorKind::Dimension,
          "feature rows and label count differ");
  require(features_.allFinite() && features_.minCoeff() >= 0.0 && features_.maxCoeff() <= 1.0,
          ErrorKind::Data, "feature entries must lie in [0,1]");
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    require(labels_[i] == 1.0 || labels_[i] == -1.0, ErrorKind::Data, "labels must be -1 or +1");
  }
}

DigitImages load_idx(const std::filesystem::path& images_path,
                     const std::filesystem::path& labels_path) {
  auto images = open_binary(images_path);
  auto labels = open_binary(labels_path);

  if (read_be32(images, images_path) != kImagesMagic) {
    fail(ErrorKind::Format, "bad IDX image magic in " + images_path.string());
  }
  if (read_be32(labels, labels_path) != kLabelsMagic) {
    fail(ErrorKind::Format, "bad IDX label magic in " + labels_path.string());
  }
  const std::uint32_t count = read_be32(images, images_path);
  const std::uint32_t rows = read_be32(images, images_path);
  const std::uint32_t cols = read_be32(images, images_path);
  const std::uint32_t label_count = read_be32(labels, labels_path);
  if (count != label_count) {
    fail(ErrorKind::Consistency, "image count " + std::to_string(count) +
                                     " does not match label count " + std::to_string(label_count));
  }
  require(count > 0 && rows > 0 && cols > 0, ErrorKind::Format, "IDX file declares an empty tensor");

  const std::size_t pixels = std::size_t{rows} * cols;
  std::vector<unsigned char> raw(std::size_t{count} * pixels);
  images.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(images.gcount()) != raw.size()) {
    fail(ErrorKind::Io, "truncated image data in " + images_path.string());
  }

  DigitImages out;
  out.rows = rows;
  out.cols = cols;
  out.digits.resize(count);
  labels.read(reinterpret_cast<char*>(out.digits.data()), count);
  if (static_cast<std::uint32_t>(labels.gcount()) != count) {
    fail(ErrorKind::Io, "truncated label data in " + labels_path.string());
  }

  out.features.resize(count, static_cast<Eigen::Index>(pixels));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.features.data()[i] = static_cast<double>(raw[i]) / 255.0;
  }
  return out;
}

Dataset filter_mnist2(const DigitImages& full, std::string name) {
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < full.digits.size(); ++i) {
    require(full.digits[i] <= 9, ErrorKind::Data, "digit label outside 0-9");
    if (full.digits[i] <= 1) keep.push_back(static_cast<Eigen::Index>(i));
  }
  require(!keep.empty(), ErrorKind::Data, "no samples of digit 0 or 1");

  FeatureMatrix features(static_cast<Eigen::Index>(keep.size()), full.features.cols());
  Vector labels(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const auto src = keep[r];
    features.row(static_cast<Eigen::Index>(r)) = full.features.row(src);
    labels[static_cast<Eigen::Index>(r)] = full.digits[static_cast<std::size_t>(src)] == 0 ? -1.0 : 1.0;
  }
  return Dataset(std::move(features), std::move(labels), std::move(name));
}

bool has_mnist_files(const std::filesystem::path& dir) {
  for (const char* f : {"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                        "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"}) {
    if (!std::filesystem::is_regular_file(dir / f)) return false;
  }
  return true;
}

Mnist2Splits load_mnist2(const std::filesystem::path& dir) {
  auto train = load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
  auto test = load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
  require(train.features.cols() == test.features.cols(), ErrorKind::Consistency,
          "train and test images have different sizes");
  return {filter_mnist2(train, "mnist2-train"), filter_mnist2(test, "mnist2-test")};
}

Dataset synth_separable(Eigen::Index n_per_class, Eigen::Index d, double margin,
                        std::uint64_t seed, double noise_sd) {
  require(margin > 0.0, ErrorKind::InvalidArgument, "margin must be positive");
  require(d >= 2, ErrorKind::InvalidArgument, "synthetic data needs d >= 2");
  require(n_per_class >= 1, ErrorKind::InvalidArgument, "need at least one sample per class");
  require(noise_sd >= 0.0, ErrorKind::InvalidArgument, "noise sd must be non-negative");

  // u = (e1 - e2)/sqrt(2) keeps the class centers separable by a hyperplane
  // through the origin, which matters because the model has no bias.
  Vector u = Vector::Zero(d);
  u[0] = 1.0 / std::sqrt(2.0);
  u[1] = -1.0 / std::sqrt(2.0);

  const Eigen::Index n = 2 * n_per_class;
  FeatureMatrix features(n, d);
  Vector labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto eng = make_stream(seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double y = (i % 2 == 0) ? -1.0 : 1.0;
    labels[i] = y;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double v = 0.5 + y * margin * u[j] + noise_sd * normal(eng);
      features(i, j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return Dataset(std::move(features), std::move(labels), "synth-separable");
}

Dataset with_bias_column(const Dataset& data) {
  FeatureMatrix f(data.size(), data.dim() + 1);
  f.leftCols(data.dim()) = data.features();
  f.col(data.dim()).setOnes();
  return Dataset(std::move(f), data.labels(), data.name());
}

}  // namespace advsharp
