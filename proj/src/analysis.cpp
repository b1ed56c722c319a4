#include "patchattn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace patchattn {

std::vector<std::vector<int>> top_c_sets(const Eigen::MatrixXd& A, int C) {
  const int D = static_cast<int>(A.cols());
  if (C < 1 || C > D) throw std::invalid_argument("top_c_sets: need 1 <= C <= D");
  std::vector<std::vector<int>> out(A.rows());
  std::vector<int> idx(D);
  for (int i = 0; i < A.rows(); ++i) {
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + C, idx.end(),
                      [&](int a, int b) {
                        if (A(i, a) != A(i, b)) return A(i, a) > A(i, b);
                        return a < b;
                      });
    out[i].assign(idx.begin(), idx.begin() + C);
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

PatchAssocReport patch_association_score(const Eigen::MatrixXd& A,
                                         const Partition& part) {
  if (A.rows() != part.D || A.cols() != part.D)
    throw std::invalid_argument("patch_association_score: A/partition mismatch");
  PatchAssocReport rep;
  rep.per_row_top_sets = top_c_sets(A, part.C);
  rep.per_row_hit.resize(part.D);
  int hits = 0, empties = 0;
  for (int i = 0; i < part.D; ++i) {
    const std::vector<int>& truth = part.sets[part.membership[i]];  // sorted
    const std::vector<int>& top = rep.per_row_top_sets[i];          // sorted
    const bool hit = top == truth;
    rep.per_row_hit[i] = hit;
    hits += hit;
    std::vector<int> inter;
    std::set_intersection(top.begin(), top.end(), truth.begin(), truth.end(),
                          std::back_inserter(inter));
    empties += inter.empty();
  }
  rep.score = static_cast<double>(hits) / part.D;
  rep.intersection_empty_fraction = static_cast<double>(empties) / part.D;
  return rep;
}

double cosine_sim(const Eigen::VectorXd& v, const Eigen::VectorXd& w_star) {
  const double nv = v.norm();
  const double nw = w_star.norm();
  if (nv == 0.0 || nw == 0.0)
    throw std::invalid_argument("cosine_sim: zero vector");
  return v.dot(w_star) / (nv * nw);
}

double residual_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w_star) {
  return (v - v.dot(w_star) * w_star).norm();
}

AccuracyEstimate test_accuracy(const ModelParams& params,
                               const DistributionSpec& spec,
                               const Partition& part, long M, Rng& rng) {
  if (M < 1) throw std::invalid_argument("test_accuracy: M must be >= 1");
  long good = 0;
  for (long m = 0; m < M; ++m) {
    const DataPoint pt = sample_datapoint(spec, part, rng);
    const double fs = label_fn(pt.X, part, spec);
    const double F = forward(params, pt.X).F;
    if (fs * F > 0.0) ++good;
  }
  AccuracyEstimate est;
  est.samples = M;
  est.accuracy = static_cast<double>(good) / static_cast<double>(M);
  est.std_error = std::sqrt(est.accuracy * (1.0 - est.accuracy) /
                            static_cast<double>(M));
  return est;
}

}  // namespace patchattn
