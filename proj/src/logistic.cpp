/*
 * Copyright 2026 The pregtte Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pregtte/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "pregtte/errors.hpp"

namespace pregtte {

namespace {

double log1pexp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double weighted_loglik(const Eigen::VectorXd& eta, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += w[i] * (y[i] * eta[i] - log1pexp(eta[i]));
  return ll;
}

Eigen::VectorXd expit_vec(const Eigen::VectorXd& eta) {
  return eta.unaryExpr([](double e) { return e >= 0 ? 1.0 / (1.0 + std::exp(-e)) : std::exp(e) / (1.0 + std::exp(e)); });
}

}  // namespace

LogisticFit fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                         const LogisticOptions& options) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (y.size() != n || weights.size() != n) throw PreconditionError("fit_logistic: size mismatch");
  if (p == 0) throw StructuralError("fit_logistic: empty design matrix");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw PreconditionError("fit_logistic: responses must be 0 or 1");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw PreconditionError("fit_logistic: weights must be finite and >= 0");
  }
  const double total_weight = weights.sum();
  if (total_weight <= 0.0) throw StructuralError("fit_logistic: all weights are zero");

  const Eigen::MatrixXd xw = weights.cwiseSqrt().asDiagonal() * x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) throw StructuralError("fit_logistic: design matrix is rank deficient");

  LogisticFit fit;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd eta = x * beta;
  double ll = weighted_loglik(eta, y, weights);
  for (int it = 0; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd mu = expit_vec(eta);
    const Eigen::VectorXd score = x.transpose() * (weights.cwiseProduct(y - mu));
    fit.max_score = score.cwiseAbs().maxCoeff() / total_weight;
    fit.iterations = it;
    if (fit.max_score < options.tolerance) {
      fit.converged = true;
      break;
    }
    if (it == options.max_iterations) break;
    const Eigen::VectorXd v = weights.cwiseProduct(mu.cwiseProduct((1.0 - mu.array()).matrix()));
    const Eigen::MatrixXd info = x.transpose() * v.asDiagonal() * x;
    const Eigen::VectorXd step = info.ldlt().solve(score);
    if (!step.allFinite()) {
      fit.separation = true;
      break;
    }
    double scale = 1.0;
    Eigen::VectorXd next;
    double next_ll = ll;
    for (int half = 0; half < 30; ++half) {
      next = beta + scale * step;
      next_ll = weighted_loglik(x * next, y, weights);
      if (next_ll >= ll - 1e-12 * std::abs(ll)) break;
      scale *= 0.5;
    }
    beta = next;
    eta = x * beta;
    ll = next_ll;
    if (beta.cwiseAbs().maxCoeff() > options.divergence_bound) {
      fit.separation = true;
      break;
    }
  }
  // The score can vanish on a separated design before the coefficients pass the
  // divergence bound; every residual being negligible gives that case away.
  if (fit.converged) {
    const Eigen::VectorXd mu = expit_vec(eta);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (weights[i] > 0.0) worst = std::max(worst, std::abs(y[i] - mu[i]));
    if (worst < 1e-6) {
      fit.separation = true;
      fit.converged = false;
    }
  }
  fit.coefficients = beta;
  fit.log_likelihood = ll;
  return fit;
}

Eigen::VectorXd predict_probability(const LogisticFit& fit, const Eigen::MatrixXd& x) {
  return expit_vec(x * fit.coefficients);
}

}  // namespace pregtte
