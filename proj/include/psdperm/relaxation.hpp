/*
 * Copyright 2026 The psdperm Authors
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

#include <cstddef>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "psdperm/matrix.hpp"
#include "psdperm/psd.hpp"

namespace psdperm {

/// Euler-Mascheroni constant, 0.5772156649015328606...
inline constexpr double kEulerGamma = std::numbers::egamma_v<double>;

/// Hermitian positive definite point with its Cholesky factor cached.
class PDPoint {
public:
    /// Empty 0 x 0 point.
    PDPoint() = default;

    /// Throws NotPositiveDefinite if X is not Hermitian within herm_tol or
    /// Cholesky fails.
    explicit PDPoint(ComplexMatrix x, double herm_tol = 1e-10);

    /// Same checks, no exception.
    static std::optional<PDPoint> try_make(ComplexMatrix x);

    std::size_t d() const noexcept { return x_.rows(); }
    const ComplexMatrix& x() const noexcept { return x_; }
    const ComplexMatrix& chol() const noexcept { return chol_; }
    double log_det() const { return cholesky_log_det(chol_); }
    ComplexMatrix inverse() const { return cholesky_inverse(chol_); }

private:
    PDPoint(ComplexMatrix x, ComplexMatrix chol) : x_(std::move(x)), chol_(std::move(chol)) {}

    ComplexMatrix x_;
    ComplexMatrix chol_;
};

enum class InitPolicy {
    TraceNormalized,  // ((n + d) / d) * I
    Identity,
};

struct SolverOptions {
    double grad_tol = 1e-9;
    int max_iters = 500;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    int max_backtracks = 60;
    // Stall rule: stop when the objective gains less than stall_tol over
    // stall_window consecutive iterations.
    double stall_tol = 1e-12;
    int stall_window = 5;
    InitPolicy init_scale = InitPolicy::TraceNormalized;
    bool record_history = false;

    /// Throws BadArgument when a field is out of range.
    void validate() const;
};

enum class SolveStatus { Converged, Stalled, MaxItersExceeded };

struct BoundResult {
    double phi = 0.0;  // log of the relaxation value
    PDPoint x_star;
    int iterations = 0;
    double grad_norm = 0.0;
    double trace_residual = 0.0;  // |tr X* - (n + d)|
    // Newton decrement lambda at X*; when lambda <= 0.68, self-concordance of
    // -phi gives Phi - phi <= lambda^2 (otherwise the bound is +inf).
    double newton_decrement = 0.0;
    double suboptimality_bound = 0.0;
    double log_lower = 0.0;
    double log_upper = 0.0;
    double gamma = kEulerGamma;
    std::size_t n = 0;
    std::size_t d = 0;
    SolveStatus status = SolveStatus::Converged;
    std::vector<double> history;  // objective per accepted iterate, if requested

    bool converged() const noexcept { return status == SolveStatus::Converged; }
    double trace_check_tol() const noexcept { return 1e-6 * static_cast<double>(n + d); }
};

/// phi_V(X) = sum_i log(v_i^dagger X v_i) + log det X - tr X + d.
/// Returns -inf if some v_i^dagger X v_i is not positive. Throws ZeroRow.
double objective(const GramFactor& v, const PDPoint& x);

/// sum_i v_i v_i^dagger / (v_i^dagger X v_i) + X^{-1} - I.
ComplexMatrix gradient(const GramFactor& v, const PDPoint& x);

/**
 * Maximize phi_V by damped Newton with Armijo backtracking.
 *
 * Newton directions use the analytic Hessian in an orthonormal real basis of
 * d x d Hermitian matrices; if that system is not numerically positive
 * definite the step falls back to the gradient. Trial points that fail
 * Cholesky are rejected by the line search.
 *
 * On MaxItersExceeded or Stalled the best iterate is returned with the status
 * set; call require_converged() to turn that into an exception.
 */
BoundResult solve(const GramFactor& v, const SolverOptions& opts = {});

/// Throws MaxItersExceeded unless r.converged().
void require_converged(const BoundResult& r);

/// (phi - gamma * n, phi).
std::pair<double, double> certified_interval(double phi, std::size_t n);

/// log Q = phi_tilde + eps * n / 2. Throws BadArgument unless eps > 0.
double bound_with_epsilon(double phi_tilde, std::size_t n, double eps);

}  // namespace psdperm
