#include "patchattn/distribution.hpp"

#include <cmath>
#include <stdexcept>

namespace patchattn {

void DistributionSpec::validate() const {
  if (d <= 0 || D <= 0 || C <= 0 || L <= 0)
    throw std::invalid_argument("spec: sizes must be positive");
  if (L * C != D) throw std::invalid_argument("spec: L*C != D");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("spec: q must be in [0,1]");
  if (sigma2 <= 0.0) throw std::invalid_argument("spec: sigma2 must be positive");
  if (threshold_frac <= 0.0 || threshold_frac >= 1.0)
    throw std::invalid_argument("spec: threshold_frac must be in (0,1)");
  if (w_star.size() != d) throw std::invalid_argument("spec: w_star dimension != d");
  if (std::abs(w_star.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("spec: w_star must be a unit vector");
}

Eigen::VectorXd sample_feature(int d, Rng& rng) {
  if (d <= 0) throw std::invalid_argument("sample_feature: d must be positive");
  Eigen::VectorXd w(d);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) w[i] = rng.gaussian();
    norm2 = w.squaredNorm();
  } while (norm2 == 0.0);
  w /= std::sqrt(norm2);
  return w;
}

DataPoint sample_datapoint(const DistributionSpec& spec, const Partition& part,
                           Rng& rng) {
  if (spec.D != part.D || spec.C != part.C || spec.L != part.L)
    throw std::invalid_argument("sample_datapoint: spec/partition size mismatch");
  DataPoint pt;
  pt.y = rng.sign();
  pt.signal_set = static_cast<int>(rng.below(spec.L));
  pt.delta.assign(spec.D, 0);
  for (int j = 0; j < spec.D; ++j) {
    if (part.membership[j] == pt.signal_set) {
      pt.delta[j] = pt.y;  // metadata; X uses y directly on the signal set
    } else {
      const double u = rng.uniform01();
      pt.delta[j] = (u < spec.q / 2) ? 1 : (u < spec.q) ? -1 : 0;
    }
  }
  const Eigen::VectorXd& w = spec.w_star;
  const double sigma = std::sqrt(spec.sigma2);
  pt.X.resize(spec.d, spec.D);
  Eigen::VectorXd g(spec.d);
  for (int j = 0; j < spec.D; ++j) {
    for (int i = 0; i < spec.d; ++i) g[i] = rng.gaussian();
    g -= g.dot(w) * w;  // noise lives in the orthogonal complement of w*
    const double coef = (part.membership[j] == pt.signal_set)
                            ? static_cast<double>(pt.y)
                            : static_cast<double>(pt.delta[j]);
    pt.X.col(j) = coef * w + sigma * g;
  }
  return pt;
}

Dataset sample_dataset(const DistributionSpec& spec, const Partition& part,
                       int N, std::uint64_t seed) {
  if (N < 0) throw std::invalid_argument("sample_dataset: N must be >= 0");
  Dataset ds;
  ds.spec = spec;
  ds.partition = part;
  ds.seed = seed;
  ds.points.reserve(N);
  for (int i = 0; i < N; ++i) {
    Rng stream(seed, streams::kDataPointBase + static_cast<std::uint64_t>(i));
    ds.points.push_back(sample_datapoint(spec, part, stream));
  }
  return ds;
}

double label_fn(const Eigen::MatrixXd& X, const Partition& part,
                const DistributionSpec& spec) {
  if (X.cols() != part.D)
    throw std::invalid_argument("label_fn: X has wrong number of patches");
  const double thr = spec.threshold_frac * spec.C;
  const Eigen::VectorXd inner = X.transpose() * spec.w_star;
  double f = 0.0;
  for (const auto& set : part.sets) {
    double s = 0.0;
    for (int j : set) s += inner[j];
    if (std::abs(s) > thr) f += s;
  }
  return f;
}

double label_consistency(const DistributionSpec& spec, const Partition& part,
                         long M, Rng& rng) {
  if (M < 1) throw std::invalid_argument("label_consistency: M must be >= 1");
  // Noise is orthogonal to w*, so <w*, X_j> is exactly y or delta_j; only the
  // discrete signs are needed.  The sampler below mirrors sample_datapoint's
  // delta draws.
  const double thr = spec.threshold_frac * spec.C;
  long good = 0;
  for (long m = 0; m < M; ++m) {
    const int y = rng.sign();
    const int sig = static_cast<int>(rng.below(spec.L));
    double f = 0.0;
    for (int l = 0; l < spec.L; ++l) {
      double s = 0.0;
      if (l == sig) {
        s = spec.C * static_cast<double>(y);
      } else {
        for (int k = 0; k < spec.C; ++k) {
          const double u = rng.uniform01();
          s += (u < spec.q / 2) ? 1.0 : (u < spec.q) ? -1.0 : 0.0;
        }
      }
      if (std::abs(s) > thr) f += s;
    }
    if (y * f > 0.0) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(M);
}

namespace {

// pmf of the sum of C iid delta's over offsets -C..C (index s + C).
std::vector<double> set_sum_pmf(int C, double q) {
  std::vector<double> pmf = {1.0};
  int off = 0;
  for (int k = 0; k < C; ++k) {
    std::vector<double> nxt(pmf.size() + 2, 0.0);
    for (size_t i = 0; i < pmf.size(); ++i) {
      nxt[i] += pmf[i] * (q / 2);        // -1
      nxt[i + 1] += pmf[i] * (1.0 - q);  // 0
      nxt[i + 2] += pmf[i] * (q / 2);    // +1
    }
    pmf.swap(nxt);
    ++off;
  }
  return pmf;  // index i corresponds to sum i - C
}

}  // namespace

double set_flip_probability(const DistributionSpec& spec) {
  const double thr = spec.threshold_frac * spec.C;
  const auto pmf = set_sum_pmf(spec.C, spec.q);
  double p = 0.0;
  for (int i = 0; i < static_cast<int>(pmf.size()); ++i) {
    const int s = i - spec.C;
    if (s < 0 && std::abs(s) > thr) p += pmf[i];
  }
  return p;
}

double label_consistency_exact(const DistributionSpec& spec) {
  const double thr = spec.threshold_frac * spec.C;
  const auto pmf = set_sum_pmf(spec.C, spec.q);
  // Thresholded contribution of one non-signal set, relative to the label
  // direction (the delta signs are symmetric, so conditioning on y is free).
  const int C = spec.C;
  std::vector<double> contrib(2 * C + 1, 0.0);  // index t + C
  for (int i = 0; i < static_cast<int>(pmf.size()); ++i) {
    const int s = i - C;
    if (std::abs(s) > thr)
      contrib[s + C] += pmf[i];
    else
      contrib[C] += pmf[i];
  }
  // Convolve over the L-1 non-signal sets, then add the signal set's +C.
  const int m = spec.L - 1;
  std::vector<double> total = {1.0};
  int off = 0;
  for (int k = 0; k < m; ++k) {
    std::vector<double> nxt(total.size() + 2 * C, 0.0);
    for (size_t i = 0; i < total.size(); ++i) {
      if (total[i] == 0.0) continue;
      for (int t = -C; t <= C; ++t)
        nxt[i + t + C] += total[i] * contrib[t + C];
    }
    total.swap(nxt);
    off += C;
  }
  // total index i corresponds to sum i - off ; y f* > 0  <=>  C + sum > 0.
  double good = 0.0;
  for (int i = 0; i < static_cast<int>(total.size()); ++i) {
    if (C + (i - off) > 0) good += total[i];
  }
  return good;
}

}  // namespace patchattn
