#pragma once

#include <Eigen/Core>
#include <vector>

#include "patchattn/model.hpp"
#include "patchattn/partition.hpp"

namespace patchattn {

// Row-wise Top-C report against a partition (patch association per row).
struct PatchAssocReport {
  std::vector<std::vector<int>> per_row_top_sets;  // sorted, size C each
  std::vector<bool> per_row_hit;                   // Top-C == set of row i
  double score = 0.0;                              // hit fraction
  double intersection_empty_fraction = 0.0;        // Top-C disjoint from set
};

// Indices of the C largest entries per row; ties broken by smallest index.
std::vector<std::vector<int>> top_c_sets(const Eigen::MatrixXd& A, int C);

PatchAssocReport patch_association_score(const Eigen::MatrixXd& A,
                                         const Partition& part);

// <v,w>/(|v||w|); rejects a zero v.
double cosine_sim(const Eigen::VectorXd& v, const Eigen::VectorXd& w_star);

// Norm of the component of v orthogonal to the unit vector w*.
double residual_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w_star);

struct AccuracyEstimate {
  double accuracy = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

// Monte-Carlo estimate of P[f*(X) F(X) > 0] over fresh samples; a tie
// (product == 0, e.g. F identically zero) counts as an error.
AccuracyEstimate test_accuracy(const ModelParams& params,
                               const DistributionSpec& spec,
                               const Partition& part, long M, Rng& rng);

}  // namespace patchattn
