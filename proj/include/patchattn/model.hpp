#pragma once

#include <Eigen/Core>

#include "patchattn/distribution.hpp"

namespace patchattn {

// One-layer positional-attention transformer:
//   F(X) = sum_i sigma(D * sum_j S_ij <v, X_j>),   sigma(x) = x^p + nu x,
//   S = row-softmax(A / tau).
// The diagonal of A is frozen at sigma_A; only the off-diagonal entries and
// v are trainable.
struct ModelParams {
  Eigen::MatrixXd A;  // D x D, diagonal == sigma_A at all times
  Eigen::VectorXd v;  // value vector in R^d
  int p = 3;          // odd, >= 3
  double nu = 0.01;   // linear coefficient
  double tau = 1.0;   // softmax temperature
  double sigma_A = 0.0;

  void validate() const;
};

struct ForwardTrace {
  Eigen::MatrixXd S;  // row-stochastic score matrix
  Eigen::MatrixXd O;  // d x D pooled patches, column i = sum_j S_ij X_j
  Eigen::VectorXd z;  // pre-activations z_i = D * <v, O_i>
  double F = 0.0;
};

// Row softmax of A / tau with row-max subtraction.  Throws on non-finite
// input entries.
Eigen::MatrixXd score_matrix(const Eigen::MatrixXd& A, double tau);

double activation(double x, int p, double nu);
double activation_deriv(double x, int p, double nu);

ForwardTrace forward(const ModelParams& params, const Eigen::MatrixXd& X);

// log(1 + exp(-y F)) evaluated stably.
double logistic_loss(int y, double F);

// Exact gradient of the per-sample loss with respect to v:
//   grad_v L = -D y sig(-yF) sum_i sigma'(z_i) sum_j S_ij X_j.
Eigen::VectorXd grad_v(const ModelParams& params, const Eigen::MatrixXd& X, int y);

// Exact derivative with respect to the off-diagonal A entries:
//   dL/dA_ij = -(y/tau) sig(-yF) sigma'(z_i) D S_ij sum_{r != j} S_ir <v, X_j - X_r>.
// The diagonal is frozen, so the returned matrix has zero diagonal.
Eigen::MatrixXd grad_A(const ModelParams& params, const Eigen::MatrixXd& X, int y);

struct BatchGrads {
  double loss = 0.0;
  Eigen::VectorXd grad_v;
  Eigen::MatrixXd grad_A;
};

// Arithmetic means over the dataset, accumulated in point order so repeated
// runs are bit-identical.  Throws on an empty dataset.
BatchGrads batch_loss_and_grads(const ModelParams& params, const Dataset& data);

// Max relative error between the analytic gradients and central finite
// differences of the loss over all trainable coordinates.  Coordinates whose
// gradient magnitude is below 1e-4 are compared against that floor.
double finite_diff_check(const ModelParams& params, const Eigen::MatrixXd& X,
                         int y, double h);

}  // namespace patchattn
