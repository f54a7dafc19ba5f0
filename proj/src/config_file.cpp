#include "lsdc/config_file.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>

namespace lsdc {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("bad value '" + value + "' for config key '" + key + "'");
}

double parse_real(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    bad_value(key, value);
  return v;
}

unsigned long long parse_uint(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  if (*s == '-') bad_value(key, value);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0' || errno == ERANGE) bad_value(key, value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p - start)));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

void set_key(ParsedConfig& cfg, const std::string& key, const std::string& value) {
  RunConfig& run = cfg.run;
  if (key == "data.source") {
    if (value == "file") cfg.data.source = DataSource::File;
    else if (value == "moons") cfg.data.source = DataSource::Moons;
    else if (value == "blobs") cfg.data.source = DataSource::Blobs;
    else bad_value(key, value);
  } else if (key == "data.path") {
    cfg.data.path = value;
  } else if (key == "data.format") {
    if (value == "binary") cfg.data.format = FileFormat::Binary;
    else if (value == "csv") cfg.data.format = FileFormat::Csv;
    else bad_value(key, value);
  } else if (key == "data.csv_labels") {
    cfg.data.csv_labels = parse_bool(key, value);
  } else if (key == "data.n") {
    cfg.data.n = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "data.noise") {
    cfg.data.noise = static_cast<real>(parse_real(key, value));
  } else if (key == "data.n_per_cluster") {
    cfg.data.n_per_cluster = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "data.centers") {
    cfg.data.centers.clear();
    for (const std::string& c : split(value, ';')) {
      std::vector<real> center;
      for (const std::string& coord : split(c, ','))
        center.push_back(static_cast<real>(parse_real(key, coord)));
      cfg.data.centers.push_back(std::move(center));
    }
  } else if (key == "data.sigma") {
    cfg.data.sigma = static_cast<real>(parse_real(key, value));
  } else if (key == "similarity.kind") {
    if (value == "l2") run.similarity.kind = SimilarityKind::L2;
    else if (value == "cosine") run.similarity.kind = SimilarityKind::Cosine;
    else if (value == "sne") run.similarity.kind = SimilarityKind::Sne;
    else if (value == "knn") run.similarity.kind = SimilarityKind::Knn;
    else bad_value(key, value);
  } else if (key == "similarity.space") {
    if (value == "feature") run.similarity.space = LabelSpace::Feature;
    else if (value == "logit") run.similarity.space = LabelSpace::Logit;
    else bad_value(key, value);
  } else if (key == "similarity.tau") {
    run.similarity.tau = static_cast<real>(parse_real(key, value));
  } else if (key == "similarity.temperature") {
    run.similarity.temperature = static_cast<real>(parse_real(key, value));
  } else if (key == "similarity.k") {
    run.similarity.k = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "k_clusters") {
    run.k_clusters = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "epochs") {
    run.epochs = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "batch_size") {
    run.batch_size = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "optimizer") {
    if (value == "sgd") run.optimizer = OptimizerKind::Sgd;
    else if (value == "adam") run.optimizer = OptimizerKind::Adam;
    else bad_value(key, value);
  } else if (key == "lr_init") {
    run.lr_init = static_cast<real>(parse_real(key, value));
  } else if (key == "lr_steps") {
    run.lr_steps.clear();
    if (!value.empty())
      for (const std::string& s : split(value, ','))
        run.lr_steps.push_back(static_cast<std::size_t>(parse_uint(key, s)));
  } else if (key == "lr_decay_factor") {
    run.lr_decay_factor = static_cast<real>(parse_real(key, value));
  } else if (key == "momentum") {
    run.momentum = static_cast<real>(parse_real(key, value));
  } else if (key == "weight_decay") {
    run.weight_decay = static_cast<real>(parse_real(key, value));
    cfg.weight_decay_set = true;
  } else if (key == "adam_beta1") {
    run.adam_beta1 = static_cast<real>(parse_real(key, value));
  } else if (key == "adam_beta2") {
    run.adam_beta2 = static_cast<real>(parse_real(key, value));
  } else if (key == "adam_eps") {
    run.adam_eps = static_cast<real>(parse_real(key, value));
  } else if (key == "lambda") {
    run.lambda = static_cast<real>(parse_real(key, value));
  } else if (key == "ramp_len_epochs") {
    run.ramp_len_epochs = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "mse_enabled") {
    run.mse_enabled = parse_bool(key, value);
  } else if (key == "composition") {
    if (value == "none") run.composition = CompositionKind::None;
    else if (value == "mixup") run.composition = CompositionKind::Mixup;
    else if (value == "external_plan") run.composition = CompositionKind::ExternalPlan;
    else bad_value(key, value);
  } else if (key == "beta.alpha") {
    run.beta_alpha = static_cast<real>(parse_real(key, value));
  } else if (key == "beta.beta") {
    run.beta_beta = static_cast<real>(parse_real(key, value));
  } else if (key == "augment.mode") {
    if (value == "gaussian_noise") run.augment_mode = AugmentMode::GaussianNoise;
    else if (value == "feature_dropout") run.augment_mode = AugmentMode::FeatureDropout;
    else bad_value(key, value);
  } else if (key == "augment.strength") {
    run.augment_strength = static_cast<real>(parse_real(key, value));
  } else if (key == "head.kind") {
    if (value == "linear") run.head_kind = HeadKind::Linear;
    else if (value == "two_layer") run.head_kind = HeadKind::TwoLayer;
    else bad_value(key, value);
  } else if (key == "head.hidden") {
    run.head_hidden = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "backbone.enabled") {
    run.backbone_enabled = parse_bool(key, value);
  } else if (key == "backbone.hidden") {
    run.backbone_hidden = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "backbone.out_dim") {
    run.backbone_out = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "seed") {
    run.seed = static_cast<std::uint64_t>(parse_uint(key, value));
  } else if (key == "threads") {
    const unsigned long long v = parse_uint(key, value);
    if (v < 1 || v > 1024) bad_value(key, value);
    cfg.threads = static_cast<int>(v);
  } else if (key == "report") {
    cfg.report_path = value;
  } else if (key == "checkpoint") {
    cfg.checkpoint_path = value;
  } else if (key == "confusion") {
    cfg.confusion_path = value;
  } else if (key == "confident_threshold") {
    const double v = parse_real(key, value);
    if (!(v >= 0 && v <= 1)) bad_value(key, value);
    cfg.confident_threshold = static_cast<real>(v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace

ParsedConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  ParsedConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key=value in " + path);
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void apply_override(ParsedConfig& cfg, const std::string& key_value) {
  const std::size_t eq = key_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be KEY=VALUE, got '" + key_value + "'");
  set_key(cfg, trim(key_value.substr(0, eq)), trim(key_value.substr(eq + 1)));
}

void finalize(ParsedConfig& cfg) {
  if (!cfg.weight_decay_set)
    cfg.run.weight_decay =
        cfg.run.composition == CompositionKind::Mixup ? real(1e-4) : real(5e-4);
  if (cfg.data.source == DataSource::File && cfg.data.path.empty())
    throw ConfigError("data.source=file requires data.path");
  if (cfg.data.source == DataSource::Blobs && cfg.data.centers.size() < 2)
    throw ConfigError("data.source=blobs requires data.centers with >= 2 centers");
  validate(cfg.run);
}

Dataset realize_dataset(const DataSpec& spec, Rng& rng) {
  switch (spec.source) {
    case DataSource::File:
      return load_features(spec.path, spec.format, spec.csv_labels);
    case DataSource::Moons:
      return gen_two_moons(spec.n, spec.noise, rng);
    case DataSource::Blobs:
      return gen_blobs(spec.n_per_cluster, spec.centers, spec.sigma, rng);
  }
  throw ConfigError("unknown data source");
}

}  // namespace lsdc
