#include "lsdc/data.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lsdc {
namespace {

constexpr char kMagic[4] = {'L', 'S', 'D', 'C'};
constexpr double kPi = 3.14159265358979323846;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

bool get_u32(std::istream& is, std::uint32_t& v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

bool get_f32(std::istream& is, float& v) {
  std::uint32_t bits;
  if (!get_u32(is, bits)) return false;
  std::memcpy(&v, &bits, 4);
  return true;
}

Dataset load_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open feature file: " + path);

  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("bad magic in feature file: " + path);

  std::uint32_t n = 0, d = 0, label_flag = 0;
  if (!get_u32(is, n) || !get_u32(is, d) || !get_u32(is, label_flag))
    throw DataError("truncated header in feature file: " + path);
  if (n == 0 || d == 0)
    throw DataError("feature file declares an empty matrix: " + path);
  if (label_flag > 1)
    throw DataError("label flag must be 0 or 1 in feature file: " + path);

  Dataset ds;
  ds.features = Matrix(n, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      float v;
      if (!get_f32(is, v))
        throw DataError("truncated feature payload in feature file: " + path);
      if (!std::isfinite(v))
        throw DataError("non-finite feature value at row " + std::to_string(i) +
                        " in feature file: " + path);
      ds.features(i, j) = static_cast<real>(v);
    }
  }
  if (label_flag == 1) {
    LabelVector labels(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!get_u32(is, labels[i]))
        throw DataError("truncated label payload in feature file: " + path);
      if (labels[i] >= n)
        throw DataError("label value " + std::to_string(labels[i]) +
                        " out of range at row " + std::to_string(i) +
                        " in feature file: " + path);
    }
    ds.labels = std::move(labels);
  }
  return ds;
}

Dataset load_csv(const std::string& path, bool has_labels) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open feature file: " + path);

  std::vector<std::vector<real>> rows;
  LabelVector labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    const std::size_t n_feat = has_labels ? fields.size() - 1 : fields.size();
    if (has_labels && fields.size() < 2)
      throw DataError("row " + std::to_string(lineno) +
                      ": expected features plus a label column in " + path);
    std::vector<real> row(n_feat);
    for (std::size_t j = 0; j < n_feat; ++j) {
      const char* s = fields[j].c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(s, &end);
      while (end != nullptr && (*end == ' ' || *end == '\t')) ++end;
      if (end == s || *end != '\0' || errno == ERANGE)
        throw DataError("row " + std::to_string(lineno) + ": bad value '" +
                        fields[j] + "' in " + path);
      if (!std::isfinite(v))
        throw DataError("row " + std::to_string(lineno) +
                        ": non-finite value in " + path);
      row[j] = static_cast<real>(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("row " + std::to_string(lineno) + ": expected " +
                      std::to_string(rows.front().size()) + " values, got " +
                      std::to_string(row.size()) + " in " + path);
    if (has_labels) {
      const char* s = fields.back().c_str();
      char* end = nullptr;
      const unsigned long v = std::strtoul(s, &end, 10);
      while (end != nullptr && (*end == ' ' || *end == '\t')) ++end;
      if (end == s || *end != '\0')
        throw DataError("row " + std::to_string(lineno) + ": bad label '" +
                        fields.back() + "' in " + path);
      labels.push_back(static_cast<std::uint32_t>(v));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no rows in feature file: " + path);

  Dataset ds;
  ds.features = Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      ds.features(i, j) = rows[i][j];
  if (has_labels) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] >= rows.size())
        throw DataError("label value " + std::to_string(labels[i]) +
                        " out of range at row " + std::to_string(i) + " in " + path);
    ds.labels = std::move(labels);
  }
  return ds;
}

}  // namespace

Dataset load_features(const std::string& path, FileFormat format,
                      bool csv_has_labels) {
  return format == FileFormat::Binary ? load_binary(path)
                                      : load_csv(path, csv_has_labels);
}

void save_features(const std::string& path, const Matrix& features,
                   const LabelVector* labels) {
  if (features.rows() == 0 || features.cols() == 0)
    throw DataError("refusing to save an empty feature matrix");
  if (!all_finite(features))
    throw DataError("refusing to save non-finite features");
  if (labels != nullptr && labels->size() != features.rows())
    throw DataError("label count does not match feature rows");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open output file: " + path);
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(features.rows()));
  put_u32(os, static_cast<std::uint32_t>(features.cols()));
  put_u32(os, labels != nullptr ? 1u : 0u);
  for (std::size_t i = 0; i < features.size(); ++i)
    put_f32(os, static_cast<float>(features.data()[i]));
  if (labels != nullptr)
    for (const std::uint32_t v : *labels) put_u32(os, v);
  if (!os) throw DataError("failed writing output file: " + path);
}

void save_features_csv(const std::string& path, const Matrix& features,
                       const LabelVector* labels) {
  if (features.rows() == 0 || features.cols() == 0)
    throw DataError("refusing to save an empty feature matrix");
  if (labels != nullptr && labels->size() != features.rows())
    throw DataError("label count does not match feature rows");

  std::ofstream os(path);
  if (!os) throw DataError("cannot open output file: " + path);
  char buf[64];
  for (std::size_t i = 0; i < features.rows(); ++i) {
    for (std::size_t j = 0; j < features.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.10g", static_cast<double>(features(i, j)));
      if (j > 0) os << ',';
      os << buf;
    }
    if (labels != nullptr) os << ',' << (*labels)[i];
    os << '\n';
  }
  if (!os) throw DataError("failed writing output file: " + path);
}

Dataset gen_two_moons(std::size_t n, real noise_sigma, Rng& rng) {
  if (n < 2) throw ConfigError("two moons needs at least 2 samples");
  if (noise_sigma < 0) throw ConfigError("noise must be >= 0");

  const std::size_t n0 = n / 2;
  const std::size_t n1 = n - n0;
  Dataset ds;
  ds.features = Matrix(n, 2);
  LabelVector labels(n);

  for (std::size_t i = 0; i < n0; ++i) {
    const double t = n0 > 1 ? kPi * static_cast<double>(i) / static_cast<double>(n0 - 1) : 0.0;
    ds.features(i, 0) = static_cast<real>(std::cos(t) + noise_sigma * rng.normal());
    ds.features(i, 1) = static_cast<real>(std::sin(t) + noise_sigma * rng.normal());
    labels[i] = 0;
  }
  for (std::size_t i = 0; i < n1; ++i) {
    const double t = n1 > 1 ? kPi * static_cast<double>(i) / static_cast<double>(n1 - 1) : 0.0;
    const std::size_t r = n0 + i;
    ds.features(r, 0) = static_cast<real>(1.0 - std::cos(t) + noise_sigma * rng.normal());
    ds.features(r, 1) = static_cast<real>(0.5 - std::sin(t) + noise_sigma * rng.normal());
    labels[r] = 1;
  }
  ds.labels = std::move(labels);
  return ds;
}

Dataset gen_blobs(std::size_t n_per_cluster,
                  const std::vector<std::vector<real>>& centers, real sigma,
                  Rng& rng) {
  if (n_per_cluster == 0) throw ConfigError("blobs need at least 1 sample per cluster");
  if (centers.size() < 2) throw ConfigError("blobs need at least two centers");
  if (sigma < 0) throw ConfigError("sigma must be >= 0");
  const std::size_t dim = centers.front().size();
  if (dim == 0) throw ConfigError("blob centers must have dimension >= 1");
  for (const auto& c : centers)
    if (c.size() != dim) throw ConfigError("blob centers must share one dimension");

  Dataset ds;
  ds.features = Matrix(n_per_cluster * centers.size(), dim);
  LabelVector labels(ds.features.rows());
  std::size_t r = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t i = 0; i < n_per_cluster; ++i, ++r) {
      for (std::size_t j = 0; j < dim; ++j)
        ds.features(r, j) = centers[c][j] + sigma * static_cast<real>(rng.normal());
      labels[r] = static_cast<std::uint32_t>(c);
    }
  }
  ds.labels = std::move(labels);
  return ds;
}

Matrix augment(const Matrix& features, AugmentMode mode, real strength,
               Rng& rng) {
  Matrix out = features;
  if (mode == AugmentMode::GaussianNoise) {
    if (strength < 0) throw ConfigError("augment strength must be >= 0");
    for (std::size_t i = 0; i < out.size(); ++i)
      out.data()[i] += strength * static_cast<real>(rng.normal());
  } else {
    if (strength < 0 || strength >= 1)
      throw ConfigError("dropout strength must be in [0, 1)");
    const real keep_scale = real(1) / (real(1) - strength);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (rng.uniform() < strength)
        out.data()[i] = real(0);
      else
        out.data()[i] *= keep_scale;  // survivors keep the expectation
    }
  }
  return out;
}

}  // namespace lsdc
