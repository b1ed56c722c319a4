#include "patchattn/idealized.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace patchattn {

void DynHyper::validate() const {
  if (eta <= 0 || C <= 0 || D <= 0 || nu <= 0 || c_gamma <= 0 || c_rho <= 0 ||
      c_alpha <= 0)
    throw std::invalid_argument("DynHyper: all fields must be positive");
  if (C > D) throw std::invalid_argument("DynHyper: C must be <= D");
  if (p < 3 || p % 2 == 0)
    throw std::invalid_argument("DynHyper: p must be odd and >= 3");
}

ScalarState init_scalar_state(int p, double nu, double sigma_A) {
  if (p < 3 || p % 2 == 0)
    throw std::invalid_argument("init_scalar_state: p must be odd and >= 3");
  if (nu <= 0) throw std::invalid_argument("init_scalar_state: nu must be positive");
  ScalarState st;
  st.alpha = std::pow(nu, 1.0 / (p - 1));
  st.beta = sigma_A;
  st.gamma = 0.0;
  st.rho = 0.0;
  st.t = 0;
  return st;
}

Aggregates softmax_aggregates(const ScalarState& state, int C, int D) {
  if (C < 1 || C > D) throw std::invalid_argument("softmax_aggregates: need 1 <= C <= D");
  const double m = std::max({state.beta, state.gamma, state.rho});
  const double eb = std::exp(state.beta - m);
  const double eg = std::exp(state.gamma - m);
  const double er = std::exp(state.rho - m);
  const double denom = eb + (C - 1) * eg + (D - C) * er;
  Aggregates agg;
  agg.Lambda = eb / denom;
  agg.Gamma = eg / denom;
  agg.Xi = er / denom;
  agg.G = D * (agg.Lambda + (C - 1) * agg.Gamma);
  agg.lambda0 = std::pow(static_cast<double>(D), 0.01);
  return agg;
}

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

ScalarState step_impl(const ScalarState& state, const DynHyper& hyper,
                      bool update_alpha) {
  const Aggregates agg = softmax_aggregates(state, hyper.C, hyper.D);
  const double ap = ipow(state.alpha, hyper.p);
  const double gp1 = ipow(agg.G, hyper.p - 1);
  ScalarState next = state;
  next.gamma = state.gamma +
               hyper.c_gamma * hyper.C * hyper.eta * ap * agg.Gamma * gp1;
  next.rho = state.rho + hyper.c_rho * hyper.eta * ap *
                             (1.0 / hyper.D + agg.Gamma * gp1 / hyper.D);
  if (update_alpha) {
    next.alpha = state.alpha + hyper.c_alpha * hyper.C * hyper.eta *
                                   ipow(agg.G, hyper.p) *
                                   ipow(state.alpha, hyper.p - 1);
  }
  next.t = state.t + 1;
  if (!std::isfinite(next.alpha) || !std::isfinite(next.gamma) ||
      !std::isfinite(next.rho))
    throw std::runtime_error("step_scalar: non-finite state");
  return next;
}

}  // namespace

ScalarState step_scalar(const ScalarState& state, const DynHyper& hyper) {
  hyper.validate();
  return step_impl(state, hyper, true);
}

ScalarTrajectory run_scalar(ScalarState state, const DynHyper& hyper,
                            const RunScalarOptions& opts) {
  hyper.validate();
  if (opts.T < 1) throw std::invalid_argument("run_scalar: T must be >= 1");
  ScalarTrajectory out;
  out.lambda0 = opts.lambda0 > 0
                    ? opts.lambda0
                    : std::pow(static_cast<double>(hyper.D), 0.01);
  out.alpha_threshold = 1.0 / (static_cast<double>(hyper.C) * hyper.C * out.lambda0);
  out.gamma_mass_threshold = out.lambda0 / hyper.D;
  out.alpha_cap = opts.alpha_cap > 0 ? opts.alpha_cap
                                     : 100.0 * out.alpha_threshold;
  long stride = opts.snapshot_stride;
  if (stride <= 0) stride = std::max<long>(1, opts.T / 4000);

  Aggregates agg = softmax_aggregates(state, hyper.C, hyper.D);
  out.max_norm_violation =
      std::abs(agg.Lambda + (hyper.C - 1) * agg.Gamma +
               (hyper.D - hyper.C) * agg.Xi - 1.0);
  out.min_xi_D = out.max_xi_D = agg.Xi * hyper.D;
  out.states.push_back(state);
  out.aggs.push_back(agg);

  for (long t = 0; t < opts.T; ++t) {
    if (out.T0 < 0 && state.alpha >= out.alpha_threshold) out.T0 = state.t;
    if (out.T0 >= 0 && out.T1 < 0 &&
        hyper.C * agg.Gamma >= out.gamma_mass_threshold)
      out.T1 = state.t;
    if (out.T1 >= 0 && state.alpha >= out.alpha_cap) {
      out.converged = true;
      break;
    }
    // Event I and III move alpha; during event II only the attention
    // scalars progress (the plateau of the three-phase narrative).
    const bool update_alpha = out.T0 < 0 || out.T1 >= 0;
    state = step_impl(state, hyper, update_alpha);
    agg = softmax_aggregates(state, hyper.C, hyper.D);
    out.max_norm_violation = std::max(
        out.max_norm_violation,
        std::abs(agg.Lambda + (hyper.C - 1) * agg.Gamma +
                 (hyper.D - hyper.C) * agg.Xi - 1.0));
    out.min_xi_D = std::min(out.min_xi_D, agg.Xi * hyper.D);
    out.max_xi_D = std::max(out.max_xi_D, agg.Xi * hyper.D);
    if (state.t % stride == 0) {
      out.states.push_back(state);
      out.aggs.push_back(agg);
    }
  }
  if (out.states.back().t != state.t) {
    out.states.push_back(state);
    out.aggs.push_back(agg);
  }
  out.steps = state.t;
  return out;
}

AttentionReduction reduce_attention(const Eigen::MatrixXd& A,
                                    const Partition& part) {
  if (A.rows() != part.D || A.cols() != part.D)
    throw std::invalid_argument("reduce_attention: A/partition mismatch");
  double sum_in = 0.0, sum2_in = 0.0, sum_x = 0.0, sum2_x = 0.0;
  long n_in = 0, n_x = 0;
  for (int i = 0; i < part.D; ++i) {
    for (int j = 0; j < part.D; ++j) {
      if (i == j) continue;
      const double a = A(i, j);
      if (part.membership[i] == part.membership[j]) {
        sum_in += a;
        sum2_in += a * a;
        ++n_in;
      } else {
        sum_x += a;
        sum2_x += a * a;
        ++n_x;
      }
    }
  }
  AttentionReduction red;
  if (n_in > 0) {
    red.gamma_hat = sum_in / n_in;
    red.within_set_std =
        std::sqrt(std::max(0.0, sum2_in / n_in - red.gamma_hat * red.gamma_hat));
  }
  if (n_x > 0) {
    red.rho_hat = sum_x / n_x;
    red.cross_set_std =
        std::sqrt(std::max(0.0, sum2_x / n_x - red.rho_hat * red.rho_hat));
  }
  return red;
}

}  // namespace patchattn
