#include "patchattn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace patchattn {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

}  // namespace

void ModelParams::validate() const {
  if (A.rows() != A.cols()) throw std::invalid_argument("params: A must be square");
  if (p < 3 || p % 2 == 0) throw std::invalid_argument("params: p must be odd and >= 3");
  if (tau <= 0.0) throw std::invalid_argument("params: tau must be positive");
  if (nu < 0.0) throw std::invalid_argument("params: nu must be >= 0");
  for (int i = 0; i < A.rows(); ++i) {
    if (A(i, i) != sigma_A)
      throw std::invalid_argument("params: diagonal of A must equal sigma_A");
  }
}

Eigen::MatrixXd score_matrix(const Eigen::MatrixXd& A, double tau) {
  if (A.rows() != A.cols()) throw std::invalid_argument("score_matrix: A must be square");
  if (tau <= 0.0) throw std::invalid_argument("score_matrix: tau must be positive");
  if (!A.allFinite()) throw std::invalid_argument("score_matrix: non-finite entries in A");
  const int D = static_cast<int>(A.rows());
  Eigen::MatrixXd S(D, D);
  for (int i = 0; i < D; ++i) {
    const double m = A.row(i).maxCoeff() / tau;
    double denom = 0.0;
    for (int j = 0; j < D; ++j) {
      const double e = std::exp(A(i, j) / tau - m);
      S(i, j) = e;
      denom += e;
    }
    S.row(i) /= denom;
  }
  return S;
}

double activation(double x, int p, double nu) { return ipow(x, p) + nu * x; }

double activation_deriv(double x, int p, double nu) {
  return p * ipow(x, p - 1) + nu;
}

ForwardTrace forward(const ModelParams& params, const Eigen::MatrixXd& X) {
  const int D = static_cast<int>(params.A.rows());
  if (X.cols() != D) throw std::invalid_argument("forward: X has wrong patch count");
  if (X.rows() != params.v.size())
    throw std::invalid_argument("forward: X and v dimension mismatch");
  ForwardTrace tr;
  tr.S = score_matrix(params.A, params.tau);
  tr.O = X * tr.S.transpose();  // column i = sum_j S_ij X_j
  tr.z = static_cast<double>(D) * (tr.O.transpose() * params.v);
  tr.F = 0.0;
  for (int i = 0; i < D; ++i) tr.F += activation(tr.z[i], params.p, params.nu);
  return tr;
}

double logistic_loss(int y, double F) {
  if (y != 1 && y != -1) throw std::invalid_argument("logistic_loss: y must be +-1");
  const double m = -static_cast<double>(y) * F;
  if (m > 0.0) return m + std::log1p(std::exp(-m));
  return std::log1p(std::exp(m));
}

Eigen::VectorXd grad_v(const ModelParams& params, const Eigen::MatrixXd& X, int y) {
  const ForwardTrace tr = forward(params, X);
  const int D = static_cast<int>(params.A.rows());
  const double r = sigmoid(-static_cast<double>(y) * tr.F);
  Eigen::VectorXd sp(D);
  for (int i = 0; i < D; ++i)
    sp[i] = activation_deriv(tr.z[i], params.p, params.nu);
  // sum_i sigma'(z_i) O_i = O * sp
  return (-static_cast<double>(D) * y * r) * (tr.O * sp);
}

Eigen::MatrixXd grad_A(const ModelParams& params, const Eigen::MatrixXd& X, int y) {
  const ForwardTrace tr = forward(params, X);
  const int D = static_cast<int>(params.A.rows());
  const double r = sigmoid(-static_cast<double>(y) * tr.F);
  const Eigen::VectorXd u = X.transpose() * params.v;   // u_j = <v, X_j>
  const Eigen::VectorXd s = tr.z / static_cast<double>(D);  // s_i = sum_j S_ij u_j
  const double scale = -static_cast<double>(y) * r * static_cast<double>(D) / params.tau;
  Eigen::MatrixXd g(D, D);
  for (int i = 0; i < D; ++i) {
    const double wi = scale * activation_deriv(tr.z[i], params.p, params.nu);
    for (int j = 0; j < D; ++j) {
      // sum_{r != j} S_ir <v, X_j - X_r> = u_j - s_i  (rows of S sum to 1)
      g(i, j) = wi * tr.S(i, j) * (u[j] - s[i]);
    }
    g(i, i) = 0.0;  // frozen diagonal
  }
  return g;
}

BatchGrads batch_loss_and_grads(const ModelParams& params, const Dataset& data) {
  const int N = static_cast<int>(data.points.size());
  if (N == 0) throw std::invalid_argument("batch_loss_and_grads: empty dataset");
  const int D = static_cast<int>(params.A.rows());
  const int d = static_cast<int>(params.v.size());
  const Eigen::MatrixXd S = score_matrix(params.A, params.tau);
  const Eigen::MatrixXd St = S.transpose();

  BatchGrads out;
  out.grad_v = Eigen::VectorXd::Zero(d);
  out.grad_A = Eigen::MatrixXd::Zero(D, D);
  double loss_sum = 0.0;
  // Factored accumulators for grad_A: the per-sample matrix is
  // w_i S_ij (u_j - s_i) with w_i = -(y r D / tau) sigma'(z_i), so only
  // sum_n w u^T and sum_n w .* s need to be accumulated.
  Eigen::MatrixXd T1 = Eigen::MatrixXd::Zero(D, D);
  Eigen::VectorXd T2 = Eigen::VectorXd::Zero(D);
  Eigen::VectorXd u(D), s(D), z(D), sp(D), w(D), coef(D);

  for (int n = 0; n < N; ++n) {
    const DataPoint& pt = data.points[n];
    u.noalias() = pt.X.transpose() * params.v;
    s.noalias() = S * u;
    z = static_cast<double>(D) * s;
    double F = 0.0;
    for (int i = 0; i < D; ++i) F += activation(z[i], params.p, params.nu);
    loss_sum += logistic_loss(pt.y, F);
    const double r = sigmoid(-static_cast<double>(pt.y) * F);
    for (int i = 0; i < D; ++i)
      sp[i] = activation_deriv(z[i], params.p, params.nu);
    const double yr = static_cast<double>(pt.y) * r;
    // grad_v contribution: -D y r X (S^T sp)
    coef.noalias() = St * sp;
    out.grad_v.noalias() -=
        (static_cast<double>(D) * yr) * (pt.X * coef);
    w = (-yr * static_cast<double>(D) / params.tau) * sp;
    T1.noalias() += w * u.transpose();
    T2.noalias() += w.cwiseProduct(s);
  }
  out.loss = loss_sum / N;
  out.grad_v /= N;
  out.grad_A = S.cwiseProduct(T1.colwise() - T2) / N;
  out.grad_A.diagonal().setZero();
  return out;
}

double finite_diff_check(const ModelParams& params, const Eigen::MatrixXd& X,
                         int y, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_check: h must be positive");
  const int D = static_cast<int>(params.A.rows());
  const int d = static_cast<int>(params.v.size());
  const auto loss_at = [&](const ModelParams& p) {
    return logistic_loss(y, forward(p, X).F);
  };
  const auto rel = [](double ga, double gf) {
    const double denom = std::max({std::abs(ga), std::abs(gf), 1e-4});
    return std::abs(ga - gf) / denom;
  };
  double worst = 0.0;
  const Eigen::VectorXd gv = grad_v(params, X, y);
  ModelParams probe = params;
  for (int i = 0; i < d; ++i) {
    probe.v[i] = params.v[i] + h;
    const double lp = loss_at(probe);
    probe.v[i] = params.v[i] - h;
    const double lm = loss_at(probe);
    probe.v[i] = params.v[i];
    worst = std::max(worst, rel(gv[i], (lp - lm) / (2 * h)));
  }
  const Eigen::MatrixXd gA = grad_A(params, X, y);
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) {
      if (i == j) continue;  // frozen coordinate, derivative reported as 0
      probe.A(i, j) = params.A(i, j) + h;
      const double lp = loss_at(probe);
      probe.A(i, j) = params.A(i, j) - h;
      const double lm = loss_at(probe);
      probe.A(i, j) = params.A(i, j);
      worst = std::max(worst, rel(gA(i, j), (lp - lm) / (2 * h)));
    }
  }
  return worst;
}

}  // namespace patchattn
