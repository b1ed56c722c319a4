#pragma once

#include <cstdint>
#include <vector>

#include "patchattn/analysis.hpp"
#include "patchattn/model.hpp"

namespace patchattn {

enum class TrainMode { realistic, value_only };

struct TrainConfig {
  double eta = 1e-3;
  long T = 1500;
  double omega = 1e-4;   // init scale for v and off-diagonal A
  double sigma_A = 0.0;  // frozen diagonal
  std::uint64_t seed = 0;
  long eval_every = 25;
  TrainMode mode = TrainMode::realistic;

  void validate() const;
};

struct ModelHyper {
  int p = 3;
  double nu = 0.01;
  double tau = 1.0;
};

struct RunRecord {
  long step = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double cosine_sim = 0.0;
  double patch_assoc_score = 0.0;
  double gamma_hat = 0.0;
  double rho_hat = 0.0;
  double eps_v = 0.0;
};

// Metric context for the periodic evaluations.  A fixed evaluation dataset
// of eval_M points is sampled once per run from (seed, kEvalPointBase + i)
// streams, so the metric history is deterministic and cheap.
struct EvalSpec {
  DistributionSpec spec;
  Partition partition;
  long eval_M = 2000;
  std::uint64_t seed = 0;
};

struct TrainResult {
  ModelParams params;
  std::vector<RunRecord> records;
  bool diverged = false;
  long steps_run = 0;
};

// Diagonal fixed at sigma_A; off-diagonal A and v i.i.d. N(0, omega^2).
// Draw order: v coordinates, then A off-diagonal entries row-major.
ModelParams init_params(const TrainConfig& cfg, const ModelHyper& hyper,
                        int d, int D, Rng& rng);

// One full-batch GD step; returns the loss at the *input* parameters.
// Throws std::runtime_error on a non-finite gradient.
double gd_step(ModelParams& params, const Dataset& data, double eta,
               TrainMode mode = TrainMode::realistic);

TrainResult train(const TrainConfig& cfg, const Dataset& data,
                  const EvalSpec& eval_spec);

// GD on v only; A is bit-identical before and after.  v is re-initialized
// from N(0, omega^2 I) with the config seed.
TrainResult finetune_value(const ModelParams& pretrained, const Dataset& data,
                           const TrainConfig& cfg, const EvalSpec& eval_spec);

// v <- g / ||g|| where g is the summed descent direction -sum_i grad_v L(X[i])
// evaluated at v = 0 (so sigma' == nu).  Rejects a degenerate ||g|| = 0 and
// checks that the step correlates positively with the dataset's feature.
ModelParams one_step_normalized_transfer(const ModelParams& pretrained,
                                         const Dataset& downstream);

}  // namespace patchattn
