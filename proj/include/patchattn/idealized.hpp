#pragma once

#include <Eigen/Core>
#include <vector>

#include "patchattn/partition.hpp"

namespace patchattn {

// Scalar coordinates of the symmetric (population) learning process:
// alpha = <v, w*>, beta = frozen diagonal, gamma = shared in-set entry,
// rho = shared cross-set entry.
struct ScalarState {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  long t = 0;
};

// Softmax masses of the three entry classes plus the in-set mass scale
// G = D (Lambda + (C-1) Gamma).
struct Aggregates {
  double Lambda = 0.0;
  double Gamma = 0.0;
  double Xi = 0.0;
  double G = 0.0;
  double lambda0 = 0.0;  // event-threshold scale, default D^0.01
};

// Recursion hyperparameters.  The c_* constants absorb the analysis'
// unspecified Theta(.) and polylog factors; all default to 1.
struct DynHyper {
  double eta = 1e-3;
  int C = 6;
  int D = 96;
  int p = 3;
  double nu = 1e-4;
  double c_gamma = 1.0;
  double c_rho = 1.0;
  double c_alpha = 1.0;

  void validate() const;
};

// alpha(0) = nu^{1/(p-1)}, gamma(0) = rho(0) = 0, beta = sigma_A.
ScalarState init_scalar_state(int p, double nu, double sigma_A);

Aggregates softmax_aggregates(const ScalarState& state, int C, int D);

// One synchronous update:
//   gamma += c_gamma * C * eta * alpha^p * Gamma * G^(p-1)
//   rho   += c_rho * eta * alpha^p * (1/D + Gamma * G^(p-1) / D)
//   alpha += c_alpha * C * eta * G^p * alpha^(p-1)
// rho moves by its worst-case bound magnitude, sign fixed positive.
ScalarState step_scalar(const ScalarState& state, const DynHyper& hyper);

struct ScalarTrajectory {
  std::vector<ScalarState> states;  // strided snapshots, first and last kept
  std::vector<Aggregates> aggs;     // aggregates at the same snapshots
  long T0 = -1;        // first t with alpha >= 1/(C^2 lambda0)
  long T1 = -1;        // first t >= T0 with C*Gamma >= lambda0/D
  long steps = 0;      // steps actually simulated
  bool converged = false;  // alpha reached alpha_cap before T ran out
  double lambda0 = 0.0;
  double alpha_threshold = 0.0;
  double gamma_mass_threshold = 0.0;
  double alpha_cap = 0.0;
  double max_norm_violation = 0.0;  // |Lambda+(C-1)Gamma+(D-C)Xi - 1| max
  double min_xi_D = 0.0, max_xi_D = 0.0;  // range of D*Xi over the run
};

struct RunScalarOptions {
  long T = 1000000;
  double lambda0 = -1.0;    // <= 0: use D^0.01
  double alpha_cap = -1.0;  // <= 0: use 100 / (C^2 lambda0)
  long snapshot_stride = 0; // 0: auto so at most ~4000 snapshots are kept
};

// Simulates the three-phase process: alpha and the attention scalars all
// update until alpha crosses its threshold (event I ends at T0); between T0
// and T1 only gamma and rho move while alpha holds its plateau (event II);
// once C*Gamma crosses lambda0/D (event III) alpha resumes until it reaches
// alpha_cap or T runs out.
ScalarTrajectory run_scalar(ScalarState state, const DynHyper& hyper,
                            const RunScalarOptions& opts);

struct AttentionReduction {
  double gamma_hat = 0.0;
  double rho_hat = 0.0;
  double within_set_std = 0.0;
  double cross_set_std = 0.0;
};

// Projects a realistic attention matrix onto the symmetric coordinates:
// means and standard deviations of the off-diagonal in-set entries and the
// cross-set entries.
AttentionReduction reduce_attention(const Eigen::MatrixXd& A,
                                    const Partition& part);

}  // namespace patchattn
