#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "lsdc/evaluation.hpp"
#include "lsdc/rng.hpp"
#include "oracles.hpp"

using namespace lsdc;

namespace {

double assignment_cost(const Matrix& cost, const std::vector<std::size_t>& asg) {
  double c = 0;
  for (std::size_t i = 0; i < asg.size(); ++i) c += cost(i, asg[i]);
  return c;
}

}  // namespace

TEST_CASE("hungarian solves easy assignments") {
  Matrix ident(3, 3, 1);
  for (std::size_t i = 0; i < 3; ++i) ident(i, i) = 0;
  const auto a = hungarian(ident);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a[i] == i);
  CHECK(assignment_cost(ident, a) == 0);

  Matrix two(2, 2);
  two(0, 0) = 5; two(0, 1) = 1;
  two(1, 0) = 2; two(1, 1) = 9;
  const auto b = hungarian(two);
  CHECK(b[0] == 1);
  CHECK(b[1] == 0);
  CHECK(assignment_cost(two, b) == 3);
}

TEST_CASE("hungarian matches brute force on random instances") {
  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(5);  // up to 6x6
    Matrix cost(n, n);
    for (std::size_t i = 0; i < cost.size(); ++i)
      cost.data()[i] = static_cast<real>(rng.uniform(-10.0, 10.0));
    const auto asg = hungarian(cost);

    // Assignment must be a permutation.
    std::vector<bool> used(n, false);
    for (const std::size_t c : asg) {
      CHECK(c < n);
      CHECK(!used[c]);
      used[c] = true;
    }
    CHECK(assignment_cost(cost, asg) ==
          doctest::Approx(oracles::brute_assignment_cost(cost)).epsilon(1e-9));
  }
}

TEST_CASE("hungarian rejects bad matrices") {
  Matrix rect(2, 3, 0);
  CHECK_THROWS_AS(hungarian(rect), DataError);
  Matrix empty;
  CHECK_THROWS_AS(hungarian(empty), DataError);
  Matrix inf(2, 2, 0);
  inf(0, 0) = std::numeric_limits<real>::infinity();
  CHECK_THROWS_AS(hungarian(inf), DataError);
}

TEST_CASE("accuracy finds the best relabeling") {
  const LabelVector swapped_pred = {0, 0, 1, 1};
  const LabelVector swapped_truth = {1, 1, 0, 0};
  const AccuracyResult swap = clustering_accuracy(swapped_pred, swapped_truth, 2);
  CHECK(swap.acc == 1.0);
  CHECK(swap.mapping[0] == 1);
  CHECK(swap.mapping[1] == 0);

  const LabelVector pred = {1, 0, 0, 0};
  const LabelVector truth = {0, 0, 1, 1};
  const AccuracyResult r = clustering_accuracy(pred, truth, 2);
  CHECK(r.acc == doctest::Approx(0.75).epsilon(1e-12));

  const LabelVector same = {0, 1, 2, 0};
  const AccuracyResult ident = clustering_accuracy(same, same, 3);
  CHECK(ident.acc == 1.0);
  for (std::size_t c = 0; c < 3; ++c) CHECK(ident.mapping[c] == c);
}

TEST_CASE("accuracy is invariant under relabelings of either side") {
  Rng rng(67);
  const std::size_t n = 60, k = 4;
  LabelVector pred(n), truth(n);
  for (std::size_t i = 0; i < n; ++i) {
    pred[i] = static_cast<std::uint32_t>(rng.below(k));
    truth[i] = static_cast<std::uint32_t>(rng.below(k));
  }
  const real base = clustering_accuracy(pred, truth, k).acc;

  std::vector<std::uint32_t> perm = {2, 0, 3, 1};
  LabelVector pred2(n), truth2(n);
  for (std::size_t i = 0; i < n; ++i) {
    pred2[i] = perm[pred[i]];
    truth2[i] = perm[truth[i]];
  }
  CHECK(clustering_accuracy(pred2, truth, k).acc == base);
  CHECK(clustering_accuracy(pred, truth2, k).acc == base);
  CHECK(clustering_accuracy(pred2, truth2, k).acc == base);
}

TEST_CASE("single-cluster predictions score the majority class") {
  const LabelVector pred(10, 0);
  LabelVector truth = {0, 0, 0, 0, 1, 1, 1, 2, 2, 2};
  const AccuracyResult r = clustering_accuracy(pred, truth, 3);
  CHECK(r.acc == doctest::Approx(0.4).epsilon(1e-12));  // 4 of 10 in class 0
}

TEST_CASE("accuracy handles more classes than clusters") {
  // Two clusters against three true classes: padding keeps it solvable.
  const LabelVector pred = {0, 0, 1, 1, 0, 1};
  const LabelVector truth = {0, 0, 1, 1, 2, 2};
  const AccuracyResult r = clustering_accuracy(pred, truth, 2);
  CHECK(r.acc == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK(r.mapping.size() == 2);
}

TEST_CASE("accuracy validates inputs") {
  const LabelVector a = {0, 1};
  const LabelVector b = {0};
  CHECK_THROWS_AS(clustering_accuracy(a, b, 2), DataError);
  const LabelVector big = {0, 5};
  CHECK_THROWS_AS(clustering_accuracy(big, a, 2), DataError);
  const LabelVector empty;
  CHECK_THROWS_AS(clustering_accuracy(empty, empty, 2), DataError);
}

TEST_CASE("confusion matrix agrees with the accuracy") {
  const LabelVector pred = {1, 0, 0, 0};
  const LabelVector truth = {0, 0, 1, 1};
  const AccuracyResult r = clustering_accuracy(pred, truth, 2);
  const Mat<std::size_t> m = confusion(pred, truth, r.mapping, 2);

  std::size_t trace = 0, total = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (i == j) trace += m(i, j);
      total += m(i, j);
    }
  CHECK(total == 4);
  CHECK(trace == 3);
  CHECK(static_cast<real>(trace) / 4 == r.acc);

  // Column sums recover the true class counts.
  for (std::size_t y = 0; y < 2; ++y) {
    std::size_t col = 0, want = 0;
    for (std::size_t i = 0; i < m.rows(); ++i) col += m(i, y);
    for (const auto t : truth) want += t == y ? 1 : 0;
    CHECK(col == want);
  }

  // Perfect predictions give a diagonal matrix.
  const LabelVector perfect = {0, 0, 1, 1};
  const AccuracyResult pr = clustering_accuracy(perfect, perfect, 2);
  const Mat<std::size_t> pm = confusion(perfect, perfect, pr.mapping, 2);
  CHECK(pm(0, 0) == 2);
  CHECK(pm(1, 1) == 2);
  CHECK(pm(0, 1) == 0);
  CHECK(pm(1, 0) == 0);
}

TEST_CASE("confusion csv has a header of mapped cluster names") {
  const LabelVector pred = {0, 1, 1};
  const LabelVector truth = {0, 1, 1};
  const AccuracyResult r = clustering_accuracy(pred, truth, 2);
  const Mat<std::size_t> m = confusion(pred, truth, r.mapping, 2);
  const std::string path = "eval_test_confusion.csv";
  write_confusion_csv(path, m);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header.find("true_0") != std::string::npos);
  std::string row;
  std::getline(is, row);
  CHECK(row.substr(0, 6) == "class_");
  std::remove(path.c_str());
}

TEST_CASE("confident subset uses a strict threshold on the max") {
  Matrix probs(3, 2);
  probs(0, 0) = real(0.95); probs(0, 1) = real(0.05);
  probs(1, 0) = real(0.5);  probs(1, 1) = real(0.5);
  probs(2, 0) = real(0.1);  probs(2, 1) = real(0.9);  // == threshold: excluded
  const auto idx = confident_subset(probs, real(0.9));
  REQUIRE(idx.size() == 1);
  CHECK(idx[0] == 0);

  Matrix uniform(1, 10, real(0.1));
  CHECK(confident_subset(uniform, real(0.9)).empty());

  Rng rng(71);
  Matrix rand(50, 4);
  for (std::size_t i = 0; i < 50; ++i) {
    real s = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      rand(i, j) = static_cast<real>(rng.uniform(0.01, 1.0));
      s += rand(i, j);
    }
    for (std::size_t j = 0; j < 4; ++j) rand(i, j) /= s;
  }
  const auto got = confident_subset(rand, real(0.4));
  std::vector<std::size_t> want;
  for (std::size_t i = 0; i < 50; ++i) {
    real mx = 0;
    for (std::size_t j = 0; j < 4; ++j) mx = std::max(mx, rand(i, j));
    if (mx > real(0.4)) want.push_back(i);
  }
  CHECK(got == want);

  CHECK_THROWS_AS(confident_subset(rand, real(1.5)), ConfigError);
  CHECK_THROWS_AS(confident_subset(rand, real(-0.1)), ConfigError);
}

TEST_CASE("argmax rows keep the lower index on ties") {
  Matrix p(2, 3, 0);
  p(0, 0) = real(0.2); p(0, 1) = real(0.5); p(0, 2) = real(0.3);
  p(1, 0) = real(0.4); p(1, 1) = real(0.4); p(1, 2) = real(0.2);
  const LabelVector got = argmax_rows(p);
  CHECK(got == LabelVector{1, 0});
}
