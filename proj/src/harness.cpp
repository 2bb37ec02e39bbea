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

#include "psdperm/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "psdperm/error.hpp"
#include "psdperm/permanent.hpp"
#include "psdperm/rng.hpp"

namespace psdperm {

using json = nlohmann::ordered_json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class Stopwatch {
public:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Prepared {
    HermitianPSD a;
    std::optional<GramFactor> factor;  // absent for zero-diagonal inputs
};

Prepared bound_into(CertReport& r, const InstanceFile& input, const RunConfig& cfg) {
    r.n = input.n();
    Prepared p{validate_hermitian_psd(input.matrix, cfg.tol), std::nullopt};
    r.d = p.a.rank();
    r.zero_diagonal_indices = p.a.zero_diagonal_indices();

    if (r.zero_diagonal()) {
        // per(A) = 0 and P-hat(A) = 0 by convention.
        r.phi = r.log_lower = r.log_upper = kNegInf;
        if (cfg.eps) {
            r.log_q = kNegInf;
            r.eps_certified = true;
        }
        return p;
    }

    Stopwatch clock;
    p.factor = gram_factor(p.a);
    const BoundResult res = solve(*p.factor, cfg.solver);
    r.timings.solve_ms = clock.elapsed_ms();

    r.phi = res.phi;
    r.log_lower = res.log_lower;
    r.log_upper = res.log_upper;
    r.solver = SolverDiagnostics{res.status,           res.iterations,
                                 res.grad_norm,        res.trace_residual,
                                 res.trace_check_tol(), res.newton_decrement,
                                 res.suboptimality_bound};
    if (cfg.eps) {
        r.log_q = bound_with_epsilon(res.phi, r.n, *cfg.eps);
        r.eps_certified = res.converged() &&
                          res.suboptimality_bound <= *cfg.eps * static_cast<double>(r.n) / 2.0;
    }
    return p;
}

std::string_view status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::Stalled: return "stalled";
        case SolveStatus::MaxItersExceeded: return "max_iters_exceeded";
    }
    return "unknown";
}

}  // namespace

CertReport cmd_bound(const InstanceFile& input, const RunConfig& cfg, std::string source) {
    CertReport r;
    r.command = "bound";
    r.source = std::move(source);
    bound_into(r, input, cfg);
    return r;
}

CertReport cmd_certify(const InstanceFile& input, const RunConfig& cfg, std::string source) {
    if (input.n() > kRyserMaxN) {
        throw Error(ErrorCode::TooLarge, "certify needs the exact permanent; n = " +
                                             std::to_string(input.n()) + " exceeds " +
                                             std::to_string(kRyserMaxN));
    }
    CertReport r;
    r.command = "certify";
    r.source = std::move(source);
    const Prepared p = bound_into(r, input, cfg);

    Stopwatch exact_clock;
    const ExactResult exact = permanent_ryser(p.a.matrix());
    r.timings.exact_ms = exact_clock.elapsed_ms();
    r.per_exact = exact.value;
    r.log_per_exact = exact.log_abs;

    if (r.zero_diagonal()) {
        r.sandwich_ok = std::abs(exact.value) <= kSandwichSlack;
    } else {
        r.sandwich_ok = r.log_lower - kSandwichSlack <= exact.log_abs &&
                        exact.log_abs <= r.log_upper + kSandwichSlack;
    }

    if (cfg.mc_samples > 0) {
        Stopwatch mc_clock;
        EstimatorOptions opts;
        opts.threads = cfg.threads;
        if (p.factor) {
            r.mc = estimate_permanent(*p.factor, cfg.mc_samples, cfg.seed, opts);
        } else {
            if (cfg.mc_samples < 2) throw Error(ErrorCode::BadArgument, "at least 2 samples are required");
            r.mc = EstimateResult{0.0, 0.0, cfg.mc_samples, cfg.seed, false, opts.chunk_size, 0};
        }
        r.timings.mc_ms = mc_clock.elapsed_ms();
    }
    return r;
}

int exit_code_for(const CertReport& report) {
    if (report.sandwich_ok && !*report.sandwich_ok) return kExitSandwichViolation;
    if (report.solver && report.solver->status != SolveStatus::Converged) return kExitNotConverged;
    return kExitOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotSquare:
        case ErrorCode::NotHermitian:
        case ErrorCode::NotPSD:
        case ErrorCode::NonFinite:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::ZeroMatrix:
        case ErrorCode::BadRank:
        case ErrorCode::BadArgument:
        case ErrorCode::ParseError:
        case ErrorCode::SchemaError:
        case ErrorCode::IoError:
            return kExitInvalidInput;
        case ErrorCode::TooLarge:
            return kExitSizeGuard;
        case ErrorCode::MaxItersExceeded:
            return kExitNotConverged;
        default:
            return kExitFailure;
    }
}

json log_value(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x < 0 ? "-inf" : "inf";
}

json report_to_json(const CertReport& r, const RunConfig& cfg) {
    json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = r.command;
    if (!r.source.empty()) j["source"] = r.source;
    j["n"] = r.n;
    j["d"] = r.d;
    j["zero_diagonal_indices"] = r.zero_diagonal_indices;
    j["phi"] = log_value(r.phi);
    j["log_lower"] = log_value(r.log_lower);
    j["log_upper"] = log_value(r.log_upper);
    j["gamma"] = kEulerGamma;

    // P-hat in log form with a decimal mantissa/exponent; exp(phi) is only
    // printed where it cannot overflow.
    json p_hat = {{"log", log_value(r.phi)}};
    if (std::isfinite(r.phi)) {
        const double l10 = r.phi / std::numbers::ln10;
        const double e10 = std::floor(l10);
        p_hat["log10"] = l10;
        p_hat["mantissa"] = std::pow(10.0, l10 - e10);
        p_hat["exponent10"] = static_cast<long long>(e10);
        if (r.phi <= 700.0) p_hat["value"] = std::exp(r.phi);
    } else if (r.phi < 0) {
        p_hat["value"] = 0.0;
    }
    j["p_hat"] = std::move(p_hat);

    if (r.log_q) {
        j["log_q"] = log_value(*r.log_q);
        j["eps"] = *cfg.eps;
        j["eps_certified"] = *r.eps_certified;
    }
    if (r.solver) {
        const auto& s = *r.solver;
        j["solver"] = {{"status", status_name(s.status)},
                       {"converged", s.status == SolveStatus::Converged},
                       {"iterations", s.iterations},
                       {"grad_norm", s.grad_norm},
                       {"trace_residual", s.trace_residual},
                       {"trace_check_tol", s.trace_check_tol},
                       {"newton_decrement", log_value(s.newton_decrement)},
                       {"suboptimality_bound", log_value(s.suboptimality_bound)}};
    }
    if (r.log_per_exact) {
        j["log_per_exact"] = log_value(*r.log_per_exact);
        j["per_exact"] = {{"re", r.per_exact->real()}, {"im", r.per_exact->imag()}};
        j["sandwich_ok"] = *r.sandwich_ok;
        j["sandwich_slack"] = kSandwichSlack;
    }
    if (r.mc) {
        const auto& mc = *r.mc;
        j["mc_mean"] = mc.mean;
        j["mc_std_error"] = mc.std_error;
        j["mc"] = {{"samples", mc.samples},
                   {"seed", mc.seed},
                   {"relative_std_error", log_value(mc.relative_std_error())},
                   {"high_variance", mc.high_variance()},
                   {"rng", RngStream::algorithm},
                   {"chunk_size", mc.chunk_size},
                   {"chunks", mc.chunks}};
    }
    j["timings_ms"] = {{"solve", r.timings.solve_ms},
                       {"exact", r.timings.exact_ms},
                       {"mc", r.timings.mc_ms}};
    j["config"] = {{"herm_tol", cfg.tol.herm_tol},
                   {"psd_tol", cfg.tol.psd_tol},
                   {"rank_tol", cfg.tol.rank_tol},
                   {"diag_tol", cfg.tol.diag_tol},
                   {"recon_tol", cfg.tol.recon_tol},
                   {"grad_tol", cfg.solver.grad_tol},
                   {"max_iters", cfg.solver.max_iters},
                   {"mc_samples", cfg.mc_samples},
                   {"seed", cfg.seed}};
    return j;
}

void serialize_report(const CertReport& report, const RunConfig& cfg, std::ostream& out) {
    out << report_to_json(report, cfg).dump(2) << "\n";
}

}  // namespace psdperm
