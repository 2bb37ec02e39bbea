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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "psdperm/error.hpp"
#include "psdperm/estimator.hpp"
#include "psdperm/instance.hpp"
#include "psdperm/permanent.hpp"
#include "psdperm/rng.hpp"

namespace psdperm {
namespace {

using Block = std::array<std::uint32_t, 4>;

GramFactor factor_of(const ComplexMatrix& a) { return gram_factor(validate_hermitian_psd(a)); }

// Published Philox4x32-10 known-answer vectors.
TEST(Philox, KnownAnswers) {
    EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}),
              (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                         {0xffffffffu, 0xffffffffu}),
              (Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u}),
              (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, CounterLayout) {
    RngStream rng(0x0000000500000007ull, 0x0000000900000003ull);
    EXPECT_EQ(rng.next_block(), philox4x32({0, 0, 3, 9}, {7, 5}));
    EXPECT_EQ(rng.next_block(), philox4x32({1, 0, 3, 9}, {7, 5}));
    EXPECT_EQ(rng.position(), 2u);
    EXPECT_EQ(RngStream::algorithm, "philox4x32-10");
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
    RngStream a(11, 0), b(11, 0), c(11, 1), e(12, 0);
    for (int k = 0; k < 100; ++k) {
        const auto x = a.next_block();
        EXPECT_EQ(x, b.next_block());
        EXPECT_NE(x, c.next_block());
        EXPECT_NE(x, e.next_block());
    }
}

TEST(Rng, UniformsInOpenInterval) {
    RngStream rng(1, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int count = 200000;
    for (int k = 0; k < count / 2; ++k) {
        for (double u : rng.next_uniform_pair()) {
            lo = std::min(lo, u);
            hi = std::max(hi, u);
            sum += u;
        }
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / count, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / count));
}

TEST(Rng, ComplexNormalMoments) {
    RngStream rng(2, 0);
    const int count = 400000;
    MomentAccumulator norm2;
    Complex mean = 0.0, pseudo = 0.0, cross = 0.0;
    for (int k = 0; k < count; ++k) {
        const auto z = sample_standard_complex_gaussian(rng, 2);
        norm2.push(std::norm(z[0]));
        mean += z[0];
        pseudo += z[0] * z[0];
        cross += z[0] * std::conj(z[1]);
    }
    const double se = 1.0 / std::sqrt(static_cast<double>(count));
    EXPECT_NEAR(norm2.mean(), 1.0, 5.0 * se);     // Exp(1): mean 1, variance 1
    EXPECT_NEAR(norm2.variance(), 1.0, 0.02);
    EXPECT_LT(std::abs(mean) / count, 5.0 * se);  // E z = 0
    EXPECT_LT(std::abs(pseudo) / count, 5.0 * se);  // E z^2 = 0 (circular)
    EXPECT_LT(std::abs(cross) / count, 5.0 * se);   // independent coordinates
}

TEST(Rng, ExponentialMatchesComplexNormalModulus) {
    RngStream a(3, 4), b(3, 4);
    for (int k = 0; k < 1000; ++k) {
        const double e = a.next_exponential();
        const double m = std::norm(b.next_complex_normal());
        EXPECT_NEAR(e, m, 1e-12 * std::max(1.0, e));
    }
}

TEST(Moments, MatchesTwoPass) {
    RngStream rng(9, 0);
    std::vector<double> xs(10001);
    for (auto& x : xs) x = 1e6 + rng.next_uniform_pair()[0];
    MomentAccumulator acc;
    for (double x : xs) acc.push(x);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(acc.mean(), mean, 1e-8);
    EXPECT_NEAR(acc.variance(), ss / static_cast<double>(xs.size() - 1), 1e-9);
}

TEST(Moments, MergeEqualsSequential) {
    RngStream rng(10, 0);
    MomentAccumulator all, left, right;
    for (int k = 0; k < 5000; ++k) {
        const double x = std::exp(3.0 * rng.next_uniform_pair()[0]);
        all.push(x);
        (k < 1234 ? left : right).push(x);
    }
    left.merge(right);
    EXPECT_EQ(left.count(), all.count());
    EXPECT_NEAR(left.mean(), all.mean(), 1e-12 * all.mean());
    EXPECT_NEAR(left.variance(), all.variance(), 1e-10 * all.variance());
    MomentAccumulator empty;
    empty.merge(all);
    EXPECT_EQ(empty.mean(), all.mean());
    all.merge(MomentAccumulator{});
    EXPECT_EQ(empty.count(), all.count());
}

TEST(Moments, SmallCounts) {
    MomentAccumulator acc;
    EXPECT_EQ(acc.variance(), 0.0);
    EXPECT_EQ(acc.std_error(), 0.0);
    acc.push(3.0);
    EXPECT_EQ(acc.mean(), 3.0);
    EXPECT_EQ(acc.variance(), 0.0);
    acc.push(5.0);
    EXPECT_EQ(acc.variance(), 2.0);
    EXPECT_EQ(acc.std_error(), 1.0);
}

TEST(Estimate, ScalarOne) {
    const auto r = estimate_permanent(factor_of(ComplexMatrix::identity(1)), 200000, 1);
    EXPECT_NEAR(r.mean, 1.0, 4.0 * r.std_error);
    EXPECT_NEAR(r.std_error, 1.0 / std::sqrt(200000.0), 2e-4);
    EXPECT_EQ(r.samples, 200000u);
    EXPECT_EQ(r.seed, 1u);
    EXPECT_FALSE(r.log_domain);
}

TEST(Estimate, IdentityAndOnes) {
    const auto id = estimate_permanent(factor_of(ComplexMatrix::identity(2)), 200000, 2);
    EXPECT_NEAR(id.mean, 1.0, 4.0 * id.std_error);
    const auto ones = estimate_permanent(factor_of(ComplexMatrix::constant(2, 2, 1.0)), 200000, 3);
    EXPECT_NEAR(ones.mean, 2.0, 4.0 * ones.std_error);
}

TEST(Estimate, ZeroDiagonalIsExactZero) {
    ComplexMatrix a = ComplexMatrix::identity(3);
    a(1, 1) = 0.0;
    const auto r = estimate_permanent(factor_of(a), 1000, 5);
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_EQ(r.std_error, 0.0);
}

TEST(Estimate, RejectsTooFewSamples) {
    const auto v = factor_of(ComplexMatrix::identity(2));
    EXPECT_THROW(estimate_permanent(v, 1, 0), Error);
    EXPECT_THROW(calibrate_gamma(0, 0), Error);
    EXPECT_THROW(calibrate_gamma(1, 0), Error);
    EXPECT_NO_THROW(calibrate_gamma(2, 0));
}

TEST(Estimate, DeterministicAndThreadInvariant) {
    const auto v = gram_factor(gen_instance(5, 3, 21, Ensemble::GaussianGram));
    EstimatorOptions one{.chunk_size = 4096, .threads = 1};
    EstimatorOptions four{.chunk_size = 4096, .threads = 4};
    const auto a = estimate_permanent(v, 50000, 99, one);
    const auto b = estimate_permanent(v, 50000, 99, one);
    const auto c = estimate_permanent(v, 50000, 99, four);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_EQ(a.mean, c.mean);
    EXPECT_EQ(a.std_error, c.std_error);
    EXPECT_EQ(a.chunks, 13u);
    EXPECT_NE(a.mean, estimate_permanent(v, 50000, 100, one).mean);
}

TEST(Estimate, UnbiasedOnSmallInstances) {
    int within = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 2 + seed % 4;
        const std::size_t d = 1 + seed % n;
        const auto a = gen_instance(n, d, 700 + seed, Ensemble::GaussianGram);
        const double exact = permanent_ryser(a.matrix()).value.real();
        const auto r = estimate_permanent(gram_factor(a), 200000, seed, {.threads = 4});
        if (std::abs(r.mean - exact) <= 4.0 * r.std_error) ++within;
    }
    EXPECT_GE(within, 19);
}

TEST(Estimate, HighVarianceFlag) {
    // Rank one, equal rows: relative variance C(2n, n) - 1, about 1.2e17 at n = 30.
    const auto v = factor_of(ComplexMatrix::constant(30, 30, 1.0));
    const auto r = estimate_permanent(v, 100000, 1, {.threads = 4});
    EXPECT_TRUE(r.high_variance()) << r.relative_std_error();
    const auto small = estimate_permanent(factor_of(ComplexMatrix::identity(1)), 2000, 1);
    EXPECT_FALSE(small.high_variance());
}

TEST(Estimate, RelativeErrorBoundedForNonnegativeSamples) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto v = gram_factor(gen_instance(12, 1 + seed % 3, seed, Ensemble::GaussianGram));
        EXPECT_LE(estimate_permanent(v, 5000, seed).relative_std_error(), 1.0);
    }
}

// E[log E] and Var[log E] for E ~ Exp(1), by the trapezoid rule after t = e^u.
std::pair<double, double> log_exponential_moments() {
    const double lo = -40.0, hi = 4.0;
    const int steps = 400000;
    const double h = (hi - lo) / steps;
    double m1 = 0.0, m2 = 0.0;
    for (int k = 0; k <= steps; ++k) {
        const double u = lo + h * k;
        const double w = (k == 0 || k == steps ? 0.5 : 1.0) * std::exp(u - std::exp(u));
        m1 += w * u;
        m2 += w * u * u;
    }
    m1 *= h;
    m2 *= h;
    return {m1, m2 - m1 * m1};
}

TEST(Gamma, QuadratureOracle) {
    const auto [mean, var] = log_exponential_moments();
    EXPECT_NEAR(mean, -std::numbers::egamma, 1e-10);
    EXPECT_NEAR(var, std::numbers::pi * std::numbers::pi / 6.0, 1e-10);
}

TEST(Gamma, Calibration) {
    const auto [mean, var] = log_exponential_moments();
    const std::uint64_t samples = 400000;
    const auto r = calibrate_gamma(samples, 17, {.threads = 4});
    EXPECT_TRUE(r.log_domain);
    EXPECT_NEAR(r.mean, mean, 3.0 * r.std_error);
    EXPECT_NEAR(r.std_error, std::sqrt(var / samples), 0.05 * std::sqrt(var / samples));
    const auto again = calibrate_gamma(samples, 17, {.threads = 1});
    EXPECT_EQ(r.mean, again.mean);
    EXPECT_EQ(r.std_error, again.std_error);
}

}  // namespace
}  // namespace psdperm
