#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsdc/rng.hpp"
#include "lsdc/types.hpp"

namespace lsdc {

struct Dataset {
  Matrix features;
  std::optional<LabelVector> labels;
};

enum class FileFormat { Binary, Csv };

// Binary layout: magic "LSDC", then u32 n_samples, u32 dim, u32 label_flag
// (all little-endian), n*dim float32 features row-major, and n u32 labels
// when label_flag == 1.
Dataset load_features(const std::string& path, FileFormat format,
                      bool csv_has_labels = false);
void save_features(const std::string& path, const Matrix& features,
                   const LabelVector* labels);
void save_features_csv(const std::string& path, const Matrix& features,
                       const LabelVector* labels);

// Two interleaving half-circles of n/2 and n - n/2 points with N(0, sigma^2)
// coordinate noise. Labels are 0 for the first moon, 1 for the second.
Dataset gen_two_moons(std::size_t n, real noise_sigma, Rng& rng);

// Isotropic gaussian blobs, n_per_cluster points around each center.
Dataset gen_blobs(std::size_t n_per_cluster,
                  const std::vector<std::vector<real>>& centers, real sigma,
                  Rng& rng);

enum class AugmentMode { GaussianNoise, FeatureDropout };

Matrix augment(const Matrix& features, AugmentMode mode, real strength,
               Rng& rng);

}  // namespace lsdc
