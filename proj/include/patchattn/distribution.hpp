#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "patchattn/partition.hpp"
#include "patchattn/rng.hpp"

namespace patchattn {

// Population parameters of the spatially structured distribution.
struct DistributionSpec {
  int d = 128;                 // patch dimension
  int D = 96;                  // patch count
  int C = 6;                   // set size
  int L = 16;                  // set count
  double q = 0.3;              // feature-noise probability
  double sigma2 = 1.0 / 128;   // noise variance
  double threshold_frac = 0.9; // labeling threshold fraction of C
  Eigen::VectorXd w_star;      // unit feature vector

  void validate() const;
};

// One sample: patch matrix X (column j = patch j), label, signal set index
// and the feature-noise signs.  delta[j] holds the sampled sign for
// non-signal patches and the label for signal patches (metadata only; the
// signal patches are always built from y).
struct DataPoint {
  Eigen::MatrixXd X;  // d x D
  int y = 1;
  int signal_set = 0;
  std::vector<int> delta;
};

struct Dataset {
  DistributionSpec spec;
  Partition partition;
  std::vector<DataPoint> points;
  std::uint64_t seed = 0;
};

// Uniform on the unit sphere in R^d.
Eigen::VectorXd sample_feature(int d, Rng& rng);

// Draw order per point: y, signal index, delta for each non-signal patch in
// increasing patch order, then d gaussians per patch j = 0..D-1.
DataPoint sample_datapoint(const DistributionSpec& spec, const Partition& part,
                           Rng& rng);

// Point i uses stream (seed, kDataPointBase + i).
Dataset sample_dataset(const DistributionSpec& spec, const Partition& part,
                       int N, std::uint64_t seed);

// f*(X) = sum_l Threshold(sum_{i in S_l} <w*, X_i>), threshold = frac * C.
double label_fn(const Eigen::MatrixXd& X, const Partition& part,
                const DistributionSpec& spec);

// Monte-Carlo estimate of P[y f*(X) > 0] over M fresh samples.
double label_consistency(const DistributionSpec& spec, const Partition& part,
                         long M, Rng& rng);

// Exact P[y f*(X) > 0]: each of the L-1 non-signal sets independently crosses
// the threshold with the same sign probability, and the signal set always
// contributes +C; the trinomial count of opposing crossings decides the sign.
double label_consistency_exact(const DistributionSpec& spec);

// Exact probability that a single non-signal set crosses the labeling
// threshold with one fixed sign.
double set_flip_probability(const DistributionSpec& spec);

}  // namespace patchattn
