#include "patchattn/trainer.hpp"

#include <cmath>
#include <stdexcept>

#include "patchattn/idealized.hpp"

namespace patchattn {

void TrainConfig::validate() const {
  if (eta <= 0) throw std::invalid_argument("train config: eta must be positive");
  if (T < 0) throw std::invalid_argument("train config: T must be >= 0");
  if (omega < 0) throw std::invalid_argument("train config: omega must be >= 0");
  if (eval_every < 1)
    throw std::invalid_argument("train config: eval_every must be >= 1");
}

ModelParams init_params(const TrainConfig& cfg, const ModelHyper& hyper,
                        int d, int D, Rng& rng) {
  cfg.validate();
  ModelParams params;
  params.p = hyper.p;
  params.nu = hyper.nu;
  params.tau = hyper.tau;
  params.sigma_A = cfg.sigma_A;
  params.v.resize(d);
  for (int i = 0; i < d; ++i) params.v[i] = cfg.omega * rng.gaussian();
  params.A.resize(D, D);
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) {
      params.A(i, j) = (i == j) ? cfg.sigma_A : cfg.omega * rng.gaussian();
    }
  }
  params.validate();
  return params;
}

double gd_step(ModelParams& params, const Dataset& data, double eta,
               TrainMode mode) {
  const BatchGrads g = batch_loss_and_grads(params, data);
  if (!g.grad_v.allFinite() || !g.grad_A.allFinite())
    throw std::runtime_error("gd_step: non-finite gradient (loss=" +
                             std::to_string(g.loss) + ")");
  params.v -= eta * g.grad_v;
  if (mode == TrainMode::realistic) {
    params.A -= eta * g.grad_A;  // grad_A has zero diagonal
    params.A.diagonal().setConstant(params.sigma_A);
  }
  return g.loss;
}

namespace {

Dataset sample_eval_set(const EvalSpec& es) {
  Dataset ds;
  ds.spec = es.spec;
  ds.partition = es.partition;
  ds.seed = es.seed;
  ds.points.reserve(es.eval_M);
  for (long i = 0; i < es.eval_M; ++i) {
    Rng stream(es.seed, streams::kEvalPointBase + static_cast<std::uint64_t>(i));
    ds.points.push_back(sample_datapoint(es.spec, es.partition, stream));
  }
  return ds;
}

RunRecord make_record(long step, double loss, const ModelParams& params,
                      const EvalSpec& es, const Dataset& eval_set) {
  RunRecord rec;
  rec.step = step;
  rec.train_loss = loss;
  long good = 0;
  for (const DataPoint& pt : eval_set.points) {
    const double fs = label_fn(pt.X, es.partition, es.spec);
    const double F = forward(params, pt.X).F;
    if (fs * F > 0.0) ++good;
  }
  rec.test_accuracy =
      eval_set.points.empty()
          ? 0.0
          : static_cast<double>(good) /
                static_cast<double>(eval_set.points.size());
  const double nv = params.v.norm();
  rec.cosine_sim = nv > 0 ? params.v.dot(es.spec.w_star) / nv : 0.0;
  rec.eps_v = residual_norm(params.v, es.spec.w_star);
  rec.patch_assoc_score = patch_association_score(params.A, es.partition).score;
  const AttentionReduction red = reduce_attention(params.A, es.partition);
  rec.gamma_hat = red.gamma_hat;
  rec.rho_hat = red.rho_hat;
  return rec;
}

// Shared loop: records metrics at step t before the t-th update (so step 0
// reflects the initialization) plus one final record at the last step.
TrainResult run_loop(ModelParams params, const TrainConfig& cfg,
                     const Dataset& data, const EvalSpec& es, TrainMode mode) {
  TrainResult out;
  const Dataset eval_set = sample_eval_set(es);
  for (long t = 0; t < cfg.T; ++t) {
    const BatchGrads g = batch_loss_and_grads(params, data);
    if (t % cfg.eval_every == 0)
      out.records.push_back(make_record(t, g.loss, params, es, eval_set));
    if (!g.grad_v.allFinite() || !g.grad_A.allFinite() ||
        !std::isfinite(g.loss) || g.loss > 1e6) {
      out.diverged = true;
      out.params = std::move(params);
      out.steps_run = t;
      return out;
    }
    params.v -= cfg.eta * g.grad_v;
    if (mode == TrainMode::realistic) {
      params.A -= cfg.eta * g.grad_A;
      params.A.diagonal().setConstant(params.sigma_A);
    }
    out.steps_run = t + 1;
  }
  const double final_loss = batch_loss_and_grads(params, data).loss;
  out.records.push_back(make_record(cfg.T, final_loss, params, es, eval_set));
  if (!std::isfinite(final_loss) || final_loss > 1e6) out.diverged = true;
  out.params = std::move(params);
  return out;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, const ModelHyper& hyper,
                  const Dataset& data, const EvalSpec& eval_spec) {
  cfg.validate();
  if (data.points.empty()) throw std::invalid_argument("train: empty dataset");
  if (cfg.mode != TrainMode::realistic)
    throw std::invalid_argument("train: config mode must be realistic");
  const int d = static_cast<int>(data.points[0].X.rows());
  const int D = data.partition.D;
  Rng init_rng(cfg.seed, streams::kInitParams);
  ModelParams params = init_params(cfg, hyper, d, D, init_rng);
  return run_loop(std::move(params), cfg, data, eval_spec, TrainMode::realistic);
}

TrainResult finetune_value(const ModelParams& pretrained, const Dataset& data,
                           const TrainConfig& cfg, const EvalSpec& eval_spec) {
  cfg.validate();
  if (cfg.mode != TrainMode::value_only)
    throw std::invalid_argument("finetune_value: config mode must be value_only");
  if (data.points.empty())
    throw std::invalid_argument("finetune_value: empty dataset");
  ModelParams params = pretrained;
  Rng init_rng(cfg.seed, streams::kInitParams);
  for (int i = 0; i < params.v.size(); ++i)
    params.v[i] = cfg.omega * init_rng.gaussian();
  return run_loop(std::move(params), cfg, data, eval_spec, TrainMode::value_only);
}

ModelParams one_step_normalized_transfer(const ModelParams& pretrained,
                                         const Dataset& downstream) {
  if (downstream.points.empty())
    throw std::invalid_argument("one_step_normalized_transfer: empty dataset");
  ModelParams params = pretrained;
  params.v.setZero();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(params.v.size());
  for (const DataPoint& pt : downstream.points)
    g -= grad_v(params, pt.X, pt.y);  // summed descent direction at v = 0
  const double norm = g.norm();
  if (norm == 0.0)
    throw std::invalid_argument(
        "one_step_normalized_transfer: degenerate dataset (zero gradient)");
  params.v = g / norm;
  if (params.v.dot(downstream.spec.w_star) <= 0.0)
    throw std::runtime_error(
        "one_step_normalized_transfer: step anti-correlated with the feature");
  return params;
}

}  // namespace patchattn
