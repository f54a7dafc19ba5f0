#pragma once

#include <string>
#include <vector>

#include "lsdc/data.hpp"
#include "lsdc/trainer.hpp"

namespace lsdc {

enum class DataSource { File, Moons, Blobs };

struct DataSpec {
  DataSource source = DataSource::File;
  std::string path;
  FileFormat format = FileFormat::Binary;
  bool csv_labels = false;
  std::size_t n = 1000;          // moons
  real noise = real(0.05);       // moons
  std::size_t n_per_cluster = 250;  // blobs
  std::vector<std::vector<real>> centers;  // blobs
  real sigma = real(0.5);        // blobs
};

struct ParsedConfig {
  RunConfig run;
  DataSpec data;
  std::string report_path;
  std::string checkpoint_path;
  std::string confusion_path;
  real confident_threshold = real(0.9);
  int threads = 1;
  // Defaults that depend on other keys are resolved in finalize().
  bool weight_decay_set = false;
};

// Line-oriented key=value text; '#' starts a comment; unknown keys rejected.
ParsedConfig parse_config(const std::string& path);
void apply_override(ParsedConfig& cfg, const std::string& key_value);

// Resolves dependent defaults and runs full validation.
void finalize(ParsedConfig& cfg);

Dataset realize_dataset(const DataSpec& spec, Rng& rng);

}  // namespace lsdc
