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

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psdperm/error.hpp"
#include "psdperm/estimator.hpp"
#include "psdperm/instance.hpp"
#include "psdperm/psd.hpp"
#include "psdperm/relaxation.hpp"

namespace psdperm {

inline constexpr const char* kToolName = "psdperm";
inline constexpr const char* kToolVersion = "0.1.0";

/// Log-domain slack allowed on both ends of the sandwich check.
inline constexpr double kSandwichSlack = 1e-6;

/// Process exit statuses of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitInvalidInput = 2,
    kExitSandwichViolation = 3,
    kExitSizeGuard = 4,
    kExitNotConverged = 5,
};

struct RunConfig {
    Tolerances tol;
    SolverOptions solver;
    std::optional<double> eps;
    std::uint64_t mc_samples = 0;  // 0 disables the Monte Carlo column
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct SolverDiagnostics {
    SolveStatus status = SolveStatus::Converged;
    int iterations = 0;
    double grad_norm = 0.0;
    double trace_residual = 0.0;
    double trace_check_tol = 0.0;
    double newton_decrement = 0.0;
    double suboptimality_bound = 0.0;
};

struct Timings {
    double solve_ms = 0.0;
    double exact_ms = 0.0;
    double mc_ms = 0.0;
};

/**
 * Outcome of bound/certify on one instance. Log-domain values may be -inf;
 * a zero diagonal entry short-circuits to phi = -inf (P-hat = 0) with no
 * solver diagnostics.
 */
struct CertReport {
    std::string command;
    std::string source;
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<std::size_t> zero_diagonal_indices;
    double phi = 0.0;
    double log_lower = 0.0;
    double log_upper = 0.0;
    std::optional<double> log_q;
    std::optional<bool> eps_certified;  // solver accuracy covers eps * n / 2
    std::optional<SolverDiagnostics> solver;
    std::optional<double> log_per_exact;
    std::optional<Complex> per_exact;
    std::optional<EstimateResult> mc;
    std::optional<bool> sandwich_ok;
    Timings timings;

    bool zero_diagonal() const noexcept { return !zero_diagonal_indices.empty(); }
};

/// Relaxation bound. Validation errors propagate as Error.
CertReport cmd_bound(const InstanceFile& input, const RunConfig& cfg, std::string source = {});

/// Bound plus exact Ryser permanent (and Monte Carlo when cfg.mc_samples > 0).
/// Throws TooLarge when n exceeds the Ryser limit.
CertReport cmd_certify(const InstanceFile& input, const RunConfig& cfg, std::string source = {});

/// Exit status a report maps to (sandwich violation, non-convergence, ok).
int exit_code_for(const CertReport& report);

/// Exit status for a library error.
int exit_code_for(ErrorCode code);

/// Log-domain values as JSON: finite numbers as-is, -inf as the string "-inf".
nlohmann::ordered_json log_value(double x);

nlohmann::ordered_json report_to_json(const CertReport& report, const RunConfig& cfg);
void serialize_report(const CertReport& report, const RunConfig& cfg, std::ostream& out);

/// Entry point behind the psdperm executable; returns the exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psdperm
