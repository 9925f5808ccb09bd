#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "advsharp/types.hpp"

namespace advsharp {

// Binary classification data: features in [0,1], labels in {-1,+1}.
// Immutable once constructed; the constructor enforces both invariants.
class Dataset {
 public:
  Dataset(FeatureMatrix features, Vector labels, std::string name);

  const FeatureMatrix& features() const noexcept { return features_; }
  const Vector& labels() const noexcept { return labels_; }
  Eigen::Index size() const noexcept { return features_.rows(); }
  Eigen::Index dim() const noexcept { return features_.cols(); }
  const std::string& name() const noexcept { return name_; }

 private:
  FeatureMatrix features_;
  Vector labels_;
  std::string name_;
};

// Images straight from an IDX pair, with the original 0-9 digit labels.
struct DigitImages {
  FeatureMatrix features;  // pixel / 255, one flattened image per row
  std::vector<std::uint8_t> digits;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

DigitImages load_idx(const std::filesystem::path& images_path,
                     const std::filesystem::path& labels_path);

// Keeps digits 0 and 1 in their original order; 0 -> -1, 1 -> +1.
Dataset filter_mnist2(const DigitImages& full, std::string name = "mnist2");

struct Mnist2Splits {
  Dataset train;
  Dataset test;
};

// Loads the canonical MNIST file names from `dir` and filters both splits.
Mnist2Splits load_mnist2(const std::filesystem::path& dir);
bool has_mnist_files(const std::filesystem::path& dir);

// Two Gaussian clouds at 0.5 +/- margin * u (u a fixed unit vector), clipped
// into [0,1]. Rows alternate -1/+1.
Dataset synth_separable(Eigen::Index n_per_class, Eigen::Index d, double margin,
                        std::uint64_t seed, double noise_sd = 0.05);

// Same samples with a constant 1 appended as the last feature, so w carries an
// intercept. Perturbations act on that column too unless they are clipped.
Dataset with_bias_column(const Dataset& data);

}  // namespace advsharp
