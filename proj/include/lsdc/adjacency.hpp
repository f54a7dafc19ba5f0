#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lsdc/types.hpp"

namespace lsdc {

enum class SimilarityKind { L2, Cosine, Sne, Knn };
enum class LabelSpace { Feature, Logit };

struct SimilarityConfig {
  SimilarityKind kind = SimilarityKind::Knn;
  LabelSpace space = LabelSpace::Feature;
  real tau = 0;          // l2 / cosine / sne threshold
  real temperature = 1;  // sne only
  std::size_t k = 20;    // knn only
};

void validate(const SimilarityConfig& cfg);

using Adjacency = Mat<std::uint8_t>;

// All builders return a symmetric 0/1 matrix with a_ii = 1.
Adjacency adjacency_l2(const Matrix& f, real tau);
Adjacency adjacency_cosine(const Matrix& f, real tau);
Adjacency adjacency_sne(const Matrix& f, real tau, real temperature);
Adjacency adjacency_knn(const Matrix& f, std::size_t k);
Adjacency build_adjacency(const SimilarityConfig& cfg, const Matrix& f);

// Off-diagonal pairs with i < j.
std::size_t undirected_edge_count(const Adjacency& a);
std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list(const Adjacency& a);
void write_edge_list(const std::string& path, const Adjacency& a);

}  // namespace lsdc
