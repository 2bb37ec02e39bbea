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

#include "psdperm/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "psdperm/error.hpp"

namespace psdperm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Coordinates of a d x d Hermitian matrix in the orthonormal basis
//   E_aa,  (E_ab + E_ba)/sqrt2,  i(E_ab - E_ba)/sqrt2   (a < b)
// for the inner product Re tr(AB). Layout: d diagonals, then the (a, b) pairs
// in row order, each contributing a real and an imaginary coordinate.
std::vector<double> to_coords(const ComplexMatrix& m) {
    const std::size_t d = m.rows();
    std::vector<double> x;
    x.reserve(d * d);
    for (std::size_t a = 0; a < d; ++a) x.push_back(m(a, a).real());
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            x.push_back(std::numbers::sqrt2 * m(a, b).real());
            x.push_back(std::numbers::sqrt2 * m(a, b).imag());
        }
    }
    return x;
}

ComplexMatrix from_coords(const std::vector<double>& x, std::size_t d) {
    ComplexMatrix m(d, d);
    std::size_t k = 0;
    for (std::size_t a = 0; a < d; ++a) m(a, a) = x[k++];
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            const Complex z(x[k] * kInvSqrt2, x[k + 1] * kInvSqrt2);
            k += 2;
            m(a, b) = z;
            m(b, a) = std::conj(z);
        }
    }
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// v_i^dagger X v_i for every row r_i = v_i^dagger of V.
std::vector<double> quadratic_forms(const GramFactor& v, const ComplexMatrix& x) {
    const std::size_t d = v.d();
    std::vector<double> q(v.n());
    std::vector<Complex> xr(d);
    for (std::size_t i = 0; i < v.n(); ++i) {
        auto r = v.v.row(i);
        for (std::size_t a = 0; a < d; ++a) {
            Complex s = 0.0;
            for (std::size_t b = 0; b < d; ++b) s += x(a, b) * std::conj(r[b]);
            xr[a] = s;
        }
        Complex s = 0.0;
        for (std::size_t a = 0; a < d; ++a) s += r[a] * xr[a];
        q[i] = s.real();
    }
    return q;
}

void check_rows(const GramFactor& v) {
    if (v.dropped_rows())
        throw Error(ErrorCode::ZeroRow, "factor was built from a matrix with zero diagonal entries");
    for (std::size_t i = 0; i < v.n(); ++i) {
        if (v.row_norms_sq[i] == 0.0)
            throw Error(ErrorCode::ZeroRow, "row " + std::to_string(i) + " of the Gram factor is zero");
    }
}

void check_dims(const GramFactor& v, const PDPoint& x) {
    if (x.d() != v.d()) {
        throw Error(ErrorCode::DimensionMismatch, "X is " + std::to_string(x.d()) +
                                                      "-dimensional, factor has d = " +
                                                      std::to_string(v.d()));
    }
}

double objective_from(const GramFactor& v, const PDPoint& x, const std::vector<double>& q) {
    double s = 0.0;
    for (double qi : q) {
        if (!(qi > 0.0)) return kNegInf;
        s += std::log(qi);
    }
    return s + x.log_det() - x.x().trace().real() + static_cast<double>(v.d());
}

ComplexMatrix gradient_from(const GramFactor& v, const PDPoint& x, const std::vector<double>& q) {
    const std::size_t d = v.d();
    ComplexMatrix g = x.inverse();
    for (std::size_t a = 0; a < d; ++a) g(a, a) -= 1.0;
    for (std::size_t i = 0; i < v.n(); ++i) {
        auto r = v.v.row(i);
        const double w = 1.0 / q[i];
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) g(a, b) += w * std::conj(r[a]) * r[b];
    }
    return g;
}

// Negative Hessian of phi in the coordinates above (symmetric positive
// definite in exact arithmetic), row-major d^2 x d^2:
//   H_kl = sum_i c_ik c_il / q_i^2 + Re tr(B_k Y B_l Y),   Y = X^{-1},
// where c_ik = v_i^dagger B_k v_i.
std::vector<double> negative_hessian(const GramFactor& v, const ComplexMatrix& y,
                                     const std::vector<double>& q) {
    const std::size_t d = v.d();
    const std::size_t m = d * d;
    std::vector<double> h(m * m, 0.0);

    ComplexMatrix proj(d, d);
    for (std::size_t i = 0; i < v.n(); ++i) {
        auto r = v.v.row(i);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) proj(a, b) = std::conj(r[a]) * r[b];
        auto c = to_coords(proj);
        const double w = 1.0 / (q[i] * q[i]);
        for (std::size_t k = 0; k < m; ++k) {
            const double ck = w * c[k];
            if (ck == 0.0) continue;
            for (std::size_t l = 0; l < m; ++l) h[k * m + l] += ck * c[l];
        }
    }

    // Y B_l Y for a basis element with entries beta at (a, b): sum beta Y[:, a] Y[b, :].
    ComplexMatrix ybY(d, d);
    auto add_outer = [&](std::size_t a, std::size_t b, Complex beta) {
        for (std::size_t i = 0; i < d; ++i) {
            const Complex left = beta * y(i, a);
            for (std::size_t j = 0; j < d; ++j) ybY(i, j) += left * y(b, j);
        }
    };
    std::size_t l = 0;
    auto add_column = [&]() {
        auto col = to_coords(ybY);
        for (std::size_t k = 0; k < m; ++k) h[k * m + l] += col[k];
        ++l;
    };
    for (std::size_t a = 0; a < d; ++a) {
        ybY = ComplexMatrix(d, d);
        add_outer(a, a, 1.0);
        add_column();
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a + 1; b < d; ++b) {
            ybY = ComplexMatrix(d, d);
            add_outer(a, b, kInvSqrt2);
            add_outer(b, a, kInvSqrt2);
            add_column();
            ybY = ComplexMatrix(d, d);
            add_outer(a, b, Complex(0.0, kInvSqrt2));
            add_outer(b, a, Complex(0.0, -kInvSqrt2));
            add_column();
        }
    }
    return h;
}

// Solves H x = g for symmetric positive definite H by Cholesky; nullopt when
// a pivot is not safely positive.
std::optional<std::vector<double>> spd_solve(std::vector<double> h, const std::vector<double>& g) {
    const std::size_t m = g.size();
    double max_diag = 0.0;
    for (std::size_t k = 0; k < m; ++k) max_diag = std::max(max_diag, h[k * m + k]);
    const double floor = 1e-14 * max_diag;
    for (std::size_t j = 0; j < m; ++j) {
        double diag = h[j * m + j];
        for (std::size_t k = 0; k < j; ++k) diag -= h[j * m + k] * h[j * m + k];
        if (!(diag > floor) || !std::isfinite(diag)) return std::nullopt;
        const double ljj = std::sqrt(diag);
        h[j * m + j] = ljj;
        for (std::size_t i = j + 1; i < m; ++i) {
            double s = h[i * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= h[i * m + k] * h[j * m + k];
            h[i * m + j] = s / ljj;
        }
    }
    std::vector<double> x(g);
    for (std::size_t i = 0; i < m; ++i) {
        double s = x[i];
        for (std::size_t k = 0; k < i; ++k) s -= h[i * m + k] * x[k];
        x[i] = s / h[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < m; ++k) s -= h[k * m + i] * x[k];
        x[i] = s / h[i * m + i];
    }
    return x;
}

struct Direction {
    std::vector<double> step;
    double slope = 0.0;  // <grad, step>
    bool newton = false;
};

Direction ascent_direction(const GramFactor& v, const PDPoint& x, const std::vector<double>& q,
                           const std::vector<double>& g) {
    auto h = negative_hessian(v, x.inverse(), q);
    if (auto step = spd_solve(std::move(h), g)) {
        const double slope = dot(g, *step);
        if (slope > 0.0 && std::isfinite(slope)) return {std::move(*step), slope, true};
    }
    return {g, dot(g, g), false};
}

ComplexMatrix initial_point(const GramFactor& v, InitPolicy policy) {
    const double d = static_cast<double>(v.d());
    const double n = static_cast<double>(v.n());
    ComplexMatrix x = ComplexMatrix::identity(v.d());
    if (policy == InitPolicy::TraceNormalized) x *= (n + d) / d;
    return x;
}

}  // namespace

PDPoint::PDPoint(ComplexMatrix x, double herm_tol) {
    if (!x.square()) throw Error(ErrorCode::NotSquare, "PD point must be square");
    if (!x.all_finite()) throw Error(ErrorCode::NonFinite, "PD point has non-finite entries");
    if (hermitian_defect(x) > herm_tol * std::max(1.0, x.max_abs()))
        throw Error(ErrorCode::NotPositiveDefinite, "X is not Hermitian");
    auto l = cholesky(x);
    if (!l) throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization of X failed");
    x_ = std::move(x);
    chol_ = std::move(*l);
}

std::optional<PDPoint> PDPoint::try_make(ComplexMatrix x) {
    if (!x.square() || !x.all_finite()) return std::nullopt;
    auto l = cholesky(x);
    if (!l) return std::nullopt;
    return PDPoint(std::move(x), std::move(*l));
}

void SolverOptions::validate() const {
    auto bad = [](const char* what) { throw Error(ErrorCode::BadArgument, what); };
    if (!(grad_tol > 0.0)) bad("grad_tol must be positive");
    if (max_iters < 0) bad("max_iters must be nonnegative");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) bad("armijo_c must lie in (0, 1)");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) bad("backtrack_factor must lie in (0, 1)");
    if (max_backtracks < 1) bad("max_backtracks must be at least 1");
    if (stall_window < 1) bad("stall_window must be at least 1");
}

double objective(const GramFactor& v, const PDPoint& x) {
    check_dims(v, x);
    check_rows(v);
    return objective_from(v, x, quadratic_forms(v, x.x()));
}

ComplexMatrix gradient(const GramFactor& v, const PDPoint& x) {
    check_dims(v, x);
    check_rows(v);
    return gradient_from(v, x, quadratic_forms(v, x.x()));
}

BoundResult solve(const GramFactor& v, const SolverOptions& opts) {
    opts.validate();
    if (v.d() == 0) throw Error(ErrorCode::BadArgument, "Gram factor has no columns");
    check_rows(v);

    const std::size_t d = v.d();
    PDPoint x(initial_point(v, opts.init_scale));
    auto q = quadratic_forms(v, x.x());
    double phi = objective_from(v, x, q);

    BoundResult result;
    result.n = v.n();
    result.d = d;
    result.status = SolveStatus::MaxItersExceeded;
    std::vector<double> trail{phi};

    int iter = 0;
    for (;; ++iter) {
        const ComplexMatrix g = gradient_from(v, x, q);
        result.grad_norm = g.frobenius_norm();
        if (result.grad_norm <= opts.grad_tol) {
            result.status = SolveStatus::Converged;
            break;
        }
        if (iter >= opts.max_iters) break;
        const auto window = static_cast<std::size_t>(opts.stall_window);
        if (trail.size() > window && trail.back() - trail[trail.size() - 1 - window] < opts.stall_tol) {
            result.status = SolveStatus::Stalled;
            break;
        }

        const auto gc = to_coords(g);
        const Direction dir = ascent_direction(v, x, q, gc);
        const ComplexMatrix step = from_coords(dir.step, d);

        // In the quadratic phase (lambda <= 1/4) the Armijo margin c * lambda^2
        // drops below the resolution of phi. There a full step is accepted when
        // it shrinks the gradient and phi moves only within rounding.
        const bool quadratic_phase = dir.newton && dir.slope <= 0.0625;
        if (quadratic_phase) {
            if (auto trial = PDPoint::try_make(hermitian_part(x.x() + step))) {
                auto trial_q = quadratic_forms(v, trial->x());
                const double trial_phi = objective_from(v, *trial, trial_q);
                const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                                     (1.0 + std::abs(phi));
                if (trial_phi >= phi - noise &&
                    gradient_from(v, *trial, trial_q).frobenius_norm() < result.grad_norm) {
                    x = std::move(*trial);
                    q = std::move(trial_q);
                    phi = trial_phi;
                    trail.push_back(phi);
                    continue;
                }
            }
        }
        bool accepted = false;
        double t = 1.0;
        for (int k = 0; k < opts.max_backtracks; ++k, t *= opts.backtrack_factor) {
            auto trial = PDPoint::try_make(hermitian_part(x.x() + t * step));
            if (!trial) continue;
            auto trial_q = quadratic_forms(v, trial->x());
            const double trial_phi = objective_from(v, *trial, trial_q);
            if (trial_phi >= phi + opts.armijo_c * t * dir.slope) {
                x = std::move(*trial);
                q = std::move(trial_q);
                phi = trial_phi;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            result.status = SolveStatus::Stalled;
            break;
        }
        trail.push_back(phi);
    }

    const auto gc = to_coords(gradient_from(v, x, q));
    if (auto step = spd_solve(negative_hessian(v, x.inverse(), q), gc)) {
        result.newton_decrement = std::sqrt(std::max(0.0, dot(gc, *step)));
    } else {
        result.newton_decrement = std::numeric_limits<double>::infinity();
    }
    result.suboptimality_bound = result.newton_decrement <= 0.68
                                     ? result.newton_decrement * result.newton_decrement
                                     : std::numeric_limits<double>::infinity();

    result.iterations = iter;
    result.phi = phi;
    result.trace_residual =
        std::abs(x.x().trace().real() - static_cast<double>(v.n() + d));
    std::tie(result.log_lower, result.log_upper) = certified_interval(phi, v.n());
    result.x_star = std::move(x);
    if (opts.record_history) result.history = std::move(trail);
    return result;
}

void require_converged(const BoundResult& r) {
    if (r.converged()) return;
    std::ostringstream os;
    os << (r.status == SolveStatus::Stalled ? "solver stalled" : "iteration limit reached")
       << " after " << r.iterations << " iterations with gradient norm " << r.grad_norm;
    throw Error(ErrorCode::MaxItersExceeded, os.str());
}

std::pair<double, double> certified_interval(double phi, std::size_t n) {
    return {phi - kEulerGamma * static_cast<double>(n), phi};
}

double bound_with_epsilon(double phi_tilde, std::size_t n, double eps) {
    if (!(eps > 0.0)) throw Error(ErrorCode::BadArgument, "eps must be positive");
    return phi_tilde + eps * static_cast<double>(n) / 2.0;
}

}  // namespace psdperm
