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

#pragma once

#include <Eigen/Dense>

namespace pregtte {

struct LogisticOptions {
  /// Convergence when max |score| / sum(weights) falls below this.
  double tolerance = 1e-12;
  int max_iterations = 50;
  /// |coefficient| beyond this is treated as divergence (separation).
  double divergence_bound = 25.0;
};

struct LogisticFit {
  Eigen::VectorXd coefficients;
  bool converged = false;
  bool separation = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  double max_score = 0.0;
};

/// Weighted logistic regression by IRLS (Newton with step halving).
/// `x` carries its own intercept column. Throws StructuralError on a
/// rank-deficient design and PreconditionError on non-binary responses,
/// negative weights or mismatched sizes. Separation yields converged=false.
LogisticFit fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                         const LogisticOptions& options = {});

/// Fitted probabilities expit(x * coefficients).
Eigen::VectorXd predict_probability(const LogisticFit& fit, const Eigen::MatrixXd& x);

}  // namespace pregtte
