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

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "psdperm/error.hpp"
#include "psdperm/harness.hpp"
#include "psdperm/instance.hpp"

namespace psdperm {

using json = nlohmann::ordered_json;

namespace {

struct Emitter {
    std::ostream& out;
    std::string path;

    void emit(const json& doc) const {
        if (path.empty()) {
            out << doc.dump(2) << "\n";
            return;
        }
        std::ofstream file(path, std::ios::binary);
        if (!file) throw Error(ErrorCode::IoError, "cannot write " + path);
        file << doc.dump(2) << "\n";
    }
};

// Runs `one` over every input, `jobs` at a time. Each slot holds either a
// report document or an error document; the overall status is the worst one.
int run_batch(const std::vector<std::string>& inputs, unsigned jobs, const RunConfig& cfg,
              const std::function<CertReport(const InstanceFile&, const RunConfig&, std::string)>& one,
              const Emitter& emitter, std::ostream& err) {
    std::vector<json> docs(inputs.size());
    std::vector<int> codes(inputs.size(), kExitOk);
    std::vector<std::string> messages(inputs.size());

    auto process = [&](std::size_t k) {
        try {
            const InstanceFile file = parse_instance(inputs[k]);
            const CertReport report = one(file, cfg, inputs[k]);
            docs[k] = report_to_json(report, cfg);
            codes[k] = exit_code_for(report);
        } catch (const Error& e) {
            codes[k] = exit_code_for(e.code());
            messages[k] = inputs[k] + ": " + e.what();
            docs[k] = {{"source", inputs[k]}, {"error", to_string(e.code())}, {"message", e.what()}};
        }
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < inputs.size(); k = next++) process(k);
    };
    const unsigned pool_size = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
    if (pool_size == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < pool_size; ++t) pool.emplace_back(worker);
    }

    int status = kExitOk;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        if (!messages[k].empty()) err << "psdperm: " << messages[k] << "\n";
        if (codes[k] == kExitSandwichViolation)
            err << "psdperm: " << inputs[k] << ": sandwich violated (this indicates a bug)\n";
        if (codes[k] == kExitNotConverged)
            err << "psdperm: " << inputs[k] << ": solver did not reach grad_tol\n";
        status = std::max(status, codes[k]);
    }

    const bool single_failed = inputs.size() == 1 && !messages[0].empty();
    if (!single_failed) emitter.emit(inputs.size() == 1 ? docs[0] : json(docs));
    return status;
}

json selfcheck(const RunConfig& cfg, bool& all_ok) {
    json checks = json::array();
    all_ok = true;
    auto record = [&](std::string name, bool ok, json detail) {
        detail["name"] = std::move(name);
        detail["ok"] = ok;
        all_ok = all_ok && ok;
        checks.push_back(std::move(detail));
    };

    for (std::size_t n = 1; n <= 6; ++n) {
        InstanceFile f{ComplexMatrix::identity(n), {}};
        const auto r = cmd_certify(f, cfg);
        const double expected = static_cast<double>(n) * (2.0 * std::log(2.0) - 1.0);
        record("identity_" + std::to_string(n),
               std::abs(r.phi - expected) <= 1e-8 && r.sandwich_ok.value_or(false) &&
                   std::abs(*r.log_per_exact) <= 1e-12,
               {{"phi", r.phi}, {"expected_phi", expected}});
    }
    for (std::size_t n = 1; n <= 6; ++n) {
        InstanceFile f{ComplexMatrix::constant(n, n, 1.0), {}};
        const auto r = cmd_certify(f, cfg);
        const double m = static_cast<double>(n);
        const double expected = (m + 1.0) * std::log(m + 1.0) - m;
        const double log_fact = std::lgamma(m + 1.0);
        record("all_ones_" + std::to_string(n),
               std::abs(r.phi - expected) <= 1e-8 && r.sandwich_ok.value_or(false) &&
                   std::abs(*r.log_per_exact - log_fact) <= 1e-10,
               {{"phi", r.phi},
                {"expected_phi", expected},
                {"log_per_exact", *r.log_per_exact},
                {"expected_log_per", log_fact}});
    }
    {
        InstanceFile f{ComplexMatrix(2, 2, {1.0, 0.0, 0.0, 0.0}), {}};
        const auto r = cmd_certify(f, cfg);
        record("zero_diagonal", std::isinf(r.phi) && r.phi < 0 && *r.per_exact == Complex{} &&
                                    r.sandwich_ok.value_or(false),
               {{"phi", log_value(r.phi)}, {"per_exact", r.per_exact->real()}});
    }
    {
        const auto a = gen_instance(8, 4, 1, Ensemble::GaussianGram, cfg.tol);
        InstanceFile f{a.matrix(), {}};
        const auto r = cmd_certify(f, cfg);
        record("gaussian_gram_n8_d4_seed1", r.sandwich_ok.value_or(false) && r.solver->status == SolveStatus::Converged,
               {{"phi", r.phi}, {"log_lower", r.log_lower}, {"log_per_exact", *r.log_per_exact}});
    }
    return checks;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Log-domain bounds for permanents of PSD matrices", kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    RunConfig cfg;
    std::vector<std::string> inputs;
    std::string out_path;
    unsigned jobs = 1;
    double eps = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("inputs", inputs, "instance files")->required()->check(CLI::ExistingFile);
        sub->add_option("--rank-tol", cfg.tol.rank_tol, "relative eigenvalue cut for the rank")
            ->capture_default_str();
        sub->add_option("--grad-tol", cfg.solver.grad_tol, "Frobenius gradient tolerance")
            ->capture_default_str();
        sub->add_option("--max-iters", cfg.solver.max_iters, "Newton iteration limit")
            ->capture_default_str();
        sub->add_option("--eps", eps, "report log Q = phi + eps * n / 2")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", out_path, "write the report here instead of stdout");
        sub->add_option("--jobs", jobs, "instances processed in parallel")->capture_default_str();
    };

    auto* gen = app.add_subcommand("gen", "generate a PSD instance file");
    std::size_t gen_n = 0;
    std::size_t gen_d = 0;
    std::string ensemble_name = "gaussian-gram";
    std::string label;
    gen->add_option("--n", gen_n, "dimension")->required();
    gen->add_option("--d", gen_d, "rank (defaults to the ensemble's natural rank)");
    gen->add_option("--seed", cfg.seed, "generator seed")->capture_default_str();
    gen->add_option("--ensemble", ensemble_name, "gaussian-gram | identity | all-ones | diagonal")
        ->capture_default_str();
    gen->add_option("--label", label, "metadata label");
    gen->add_option("--out", out_path, "write the instance here instead of stdout");

    auto* bound = app.add_subcommand("bound", "compute phi and the certified log interval");
    add_common(bound);

    auto* certify = app.add_subcommand("certify", "bound plus the exact permanent (n <= 22)");
    add_common(certify);
    certify->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples (0 disables)")
        ->capture_default_str();
    certify->add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
    certify->add_option("--threads", cfg.threads, "Monte Carlo worker threads")->capture_default_str();

    auto* estimate = app.add_subcommand("estimate", "Monte Carlo permanent estimate or gamma calibration");
    bool gamma_only = false;
    std::string estimate_input;
    std::uint64_t estimate_samples = 100000;
    estimate->add_option("input", estimate_input, "instance file")->check(CLI::ExistingFile);
    estimate->add_flag("--gamma", gamma_only, "estimate E log|g|^2 = -gamma instead");
    estimate->add_option("--mc-samples", estimate_samples, "samples")->capture_default_str();
    estimate->add_option("--seed", cfg.seed, "seed")->capture_default_str();
    estimate->add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
    estimate->add_option("--rank-tol", cfg.tol.rank_tol, "relative eigenvalue cut for the rank");
    estimate->add_option("--out", out_path, "write the report here instead of stdout");

    auto* check = app.add_subcommand("selfcheck", "run the analytic-instance suite");
    check->add_option("--out", out_path, "write the report here instead of stdout");

    std::vector<const char*> argv{kToolName};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidInput;
    }

    const Emitter emitter{out, out_path};
    try {
        if (bound->parsed() || certify->parsed()) {
            cfg.solver.validate();
            if (eps > 0.0) cfg.eps = eps;
            if (certify->parsed()) {
                return run_batch(inputs, jobs, cfg, cmd_certify, emitter, err);
            }
            return run_batch(inputs, jobs, cfg, cmd_bound, emitter, err);
        }

        if (gen->parsed()) {
            const Ensemble ensemble = parse_ensemble(ensemble_name);
            if (gen_d == 0) {
                gen_d = ensemble == Ensemble::AllOnes ? 1 : gen_n;
            }
            const auto a = gen_instance(gen_n, gen_d, cfg.seed, ensemble, cfg.tol);
            InstanceFile file{a.matrix(), {}};
            if (!label.empty()) file.metadata.label = label;
            file.metadata.ensemble = std::string(to_string(ensemble));
            file.metadata.seed = cfg.seed;
            file.metadata.rank = a.rank();
            if (out_path.empty()) {
                out << serialize_instance(file);
            } else {
                write_instance(file, out_path);
            }
            return kExitOk;
        }

        if (estimate->parsed()) {
            EstimatorOptions opts;
            opts.threads = cfg.threads;
            json doc = {{"tool", kToolName}, {"version", kToolVersion}, {"command", "estimate"}};
            EstimateResult res;
            if (gamma_only) {
                res = calibrate_gamma(estimate_samples, cfg.seed, opts);
                doc["quantity"] = "E log|g|^2";
                doc["expected"] = -kEulerGamma;
                doc["z_score"] = (res.mean + kEulerGamma) / res.std_error;
            } else {
                if (estimate_input.empty())
                    throw Error(ErrorCode::BadArgument, "estimate needs an input file or --gamma");
                const InstanceFile file = parse_instance(estimate_input);
                const auto a = validate_hermitian_psd(file.matrix, cfg.tol);
                doc["source"] = estimate_input;
                doc["n"] = a.n();
                doc["d"] = a.rank();
                doc["quantity"] = "per(A)";
                if (a.has_zero_diagonal()) {
                    if (estimate_samples < 2) throw Error(ErrorCode::BadArgument, "at least 2 samples are required");
                    res = EstimateResult{0.0, 0.0, estimate_samples, cfg.seed, false, opts.chunk_size, 0};
                } else {
                    res = estimate_permanent(gram_factor(a), estimate_samples, cfg.seed, opts);
                }
                if (res.high_variance())
                    err << "psdperm: relative standard error " << res.relative_std_error()
                        << " exceeds " << EstimateResult::kHighVarianceThreshold
                        << "; a few draws dominate the estimate\n";
            }
            doc["mc_mean"] = res.mean;
            doc["mc_std_error"] = res.std_error;
            doc["mc"] = {{"samples", res.samples},
                         {"seed", res.seed},
                         {"log_domain", res.log_domain},
                         {"relative_std_error", log_value(res.relative_std_error())},
                         {"high_variance", res.high_variance()},
                         {"rng", RngStream::algorithm},
                         {"chunk_size", res.chunk_size},
                         {"chunks", res.chunks}};
            emitter.emit(doc);
            return kExitOk;
        }

        if (check->parsed()) {
            bool ok = false;
            json checks = selfcheck(cfg, ok);
            emitter.emit({{"tool", kToolName}, {"version", kToolVersion}, {"command", "selfcheck"},
                          {"checks", std::move(checks)}, {"ok", ok}});
            if (!ok) err << "psdperm: selfcheck failed\n";
            return ok ? kExitOk : kExitSandwichViolation;
        }
    } catch (const Error& e) {
        err << "psdperm: " << e.what() << "\n";
        return exit_code_for(e.code());
    }
    return kExitFailure;
}

}  // namespace psdperm
