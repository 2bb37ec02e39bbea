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
#include <cstdint>

#include "psdperm/psd.hpp"

namespace psdperm {

/// Single-pass mean/variance (Welford), mergeable with Chan's pairwise update.
class MomentAccumulator {
public:
    void push(double x) noexcept;
    void merge(const MomentAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const noexcept;
    double std_error() const noexcept;

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct EstimateResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    bool log_domain = false;  // samples were logarithms (gamma calibration)
    // Partition plan: chunk k draws from stream id k and chunks are reduced
    // in index order, so the result does not depend on the thread count.
    std::uint64_t chunk_size = 0;
    std::uint64_t chunks = 0;

    double relative_std_error() const noexcept;
    /// For nonnegative samples std_error / mean never exceeds 1 (one sample
    /// carrying the whole sum), so half of that already marks an estimate
    /// dominated by a few draws.
    bool high_variance() const noexcept { return relative_std_error() > kHighVarianceThreshold; }

    static constexpr double kHighVarianceThreshold = 0.5;
};

struct EstimatorOptions {
    std::uint64_t chunk_size = 1u << 16;
    unsigned threads = 1;
};

/**
 * Monte Carlo mean of prod_i |v_i^dagger z|^2 over z ~ CN(0, I_d), an unbiased
 * estimate of per(V V^dagger). Returns an exact zero when the factor has a
 * zero or dropped row. Throws BadArgument when samples < 2.
 */
EstimateResult estimate_permanent(const GramFactor& v, std::uint64_t samples, std::uint64_t seed,
                                  const EstimatorOptions& opts = {});

/// Monte Carlo mean of log|g|^2 for g ~ CN(0, 1); its expectation is -gamma.
EstimateResult calibrate_gamma(std::uint64_t samples, std::uint64_t seed,
                               const EstimatorOptions& opts = {});

}  // namespace psdperm
