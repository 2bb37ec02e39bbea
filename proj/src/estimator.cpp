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

#include "psdperm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "psdperm/error.hpp"
#include "psdperm/rng.hpp"

namespace psdperm {

void MomentAccumulator::push(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double total = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / total;
    m2_ += other.m2_ + delta * delta * na * nb / total;
    count_ += other.count_;
}

double MomentAccumulator::variance() const noexcept {
    return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

double MomentAccumulator::std_error() const noexcept {
    return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_));
}

double EstimateResult::relative_std_error() const noexcept {
    if (mean == 0.0) return std_error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std_error / std::abs(mean);
}

namespace {

template <typename Draw>
EstimateResult run_chunks(std::uint64_t samples, std::uint64_t seed, const EstimatorOptions& opts,
                          bool log_domain, Draw draw) {
    if (samples < 2) throw Error(ErrorCode::BadArgument, "at least 2 samples are required");
    if (opts.chunk_size == 0) throw Error(ErrorCode::BadArgument, "chunk_size must be positive");

    const std::uint64_t chunks = (samples + opts.chunk_size - 1) / opts.chunk_size;
    std::vector<MomentAccumulator> partial(chunks);

    auto work = [&](std::uint64_t first, std::uint64_t stride) {
        for (std::uint64_t c = first; c < chunks; c += stride) {
            RngStream rng(seed, c);
            const std::uint64_t begin = c * opts.chunk_size;
            const std::uint64_t end = std::min(samples, begin + opts.chunk_size);
            MomentAccumulator acc;
            for (std::uint64_t k = begin; k < end; ++k) acc.push(draw(rng));
            partial[c] = acc;
        }
    };

    const auto threads = static_cast<std::uint64_t>(
        std::clamp<std::uint64_t>(opts.threads, 1, std::max<std::uint64_t>(chunks, 1)));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::uint64_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }

    MomentAccumulator total;
    for (const auto& p : partial) total.merge(p);
    return {total.mean(), total.std_error(), samples, seed, log_domain, opts.chunk_size, chunks};
}

}  // namespace

EstimateResult estimate_permanent(const GramFactor& v, std::uint64_t samples, std::uint64_t seed,
                                  const EstimatorOptions& opts) {
    const bool zero_row = v.dropped_rows() ||
                          std::any_of(v.row_norms_sq.begin(), v.row_norms_sq.end(),
                                      [](double x) { return x == 0.0; });
    if (zero_row) {
        if (samples < 2) throw Error(ErrorCode::BadArgument, "at least 2 samples are required");
        return {0.0, 0.0, samples, seed, false, opts.chunk_size, 0};
    }

    const std::size_t n = v.n();
    const std::size_t d = v.d();
    return run_chunks(samples, seed, opts, false, [&](RngStream& rng) {
        // Per-thread scratch; every worker shares this lambda.
        thread_local std::vector<Complex> z;
        z.resize(d);
        for (auto& x : z) x = rng.next_complex_normal();
        double prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto r = v.v.row(i);
            Complex s = 0.0;
            for (std::size_t a = 0; a < d; ++a) s += r[a] * z[a];
            prod *= std::norm(s);
        }
        return prod;
    });
}

EstimateResult calibrate_gamma(std::uint64_t samples, std::uint64_t seed,
                               const EstimatorOptions& opts) {
    return run_chunks(samples, seed, opts, true,
                      [](RngStream& rng) { return std::log(rng.next_exponential()); });
}

}  // namespace psdperm
