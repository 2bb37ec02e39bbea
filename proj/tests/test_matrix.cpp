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
#include <limits>

#include "psdperm/error.hpp"
#include "psdperm/instance.hpp"
#include "psdperm/matrix.hpp"
#include "psdperm/psd.hpp"
#include "test_support.hpp"

namespace psdperm {
namespace {

using testing::random_complex;
using testing::random_psd;

constexpr Complex I{0.0, 1.0};

template <typename F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no psdperm::Error thrown";
    return ErrorCode::IoError;
}

double reconstruction_error(const HermitianEigen& eig, const ComplexMatrix& a) {
    const std::size_t n = a.rows();
    ComplexMatrix scaled = eig.vectors;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) scaled(i, k) *= eig.values[k];
    return (multiply_adjoint(scaled, eig.vectors) - a).frobenius_norm();
}

TEST(HermitianEigen, RandomHermitianReconstructs) {
    RngStream rng(11, 0);
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 13u, 24u}) {
        const ComplexMatrix a = hermitian_part(random_complex(n, n, rng));
        const auto eig = hermitian_eigen(a);
        EXPECT_LE(reconstruction_error(eig, a), 1e-12 * std::max(1.0, a.frobenius_norm())) << n;
        const double defect =
            (eig.vectors.adjoint() * eig.vectors - ComplexMatrix::identity(n)).max_abs();
        EXPECT_LE(defect, 1e-13) << n;
        for (std::size_t k = 1; k < n; ++k) EXPECT_GE(eig.values[k - 1], eig.values[k]);
    }
}

TEST(HermitianEigen, DegenerateSpectrum) {
    // I + u u^dagger has eigenvalues {1 + |u|^2, 1, 1, 1}.
    ComplexMatrix u(4, 1, {1.0, I, -1.0, 0.5 * I});
    const ComplexMatrix a = ComplexMatrix::identity(4) + multiply_adjoint(u, u);
    const auto eig = hermitian_eigen(a);
    EXPECT_NEAR(eig.values[0], 1.0 + 3.25, 1e-13);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(eig.values[k], 1.0, 1e-13);
    EXPECT_LE(reconstruction_error(eig, a), 1e-13);
}

TEST(Cholesky, InverseAndFailure) {
    RngStream rng(5, 0);
    const ComplexMatrix x = testing::random_pd(6, rng);
    const auto l = cholesky(x);
    ASSERT_TRUE(l.has_value());
    EXPECT_LE((multiply_adjoint(*l, *l) - x).max_abs(), 1e-13);
    EXPECT_LE((cholesky_inverse(*l) * x - ComplexMatrix::identity(6)).max_abs(), 1e-12);

    const ComplexMatrix indefinite(2, 2, {1.0, 2.0, 2.0, 1.0});
    EXPECT_FALSE(cholesky(indefinite).has_value());
}

TEST(ValidateHermitianPSD, ScalarAccepted) {
    const auto a = validate_hermitian_psd(ComplexMatrix(1, 1, {2.0}));
    ASSERT_EQ(a.eigenvalues().size(), 1u);
    EXPECT_DOUBLE_EQ(a.eigenvalues()[0], 2.0);
    EXPECT_EQ(a.rank(), 1u);
    EXPECT_TRUE(a.zero_diagonal_indices().empty());
}

TEST(ValidateHermitianPSD, ComplexRankOne) {
    // Characteristic polynomial lambda^2 - 2 lambda.
    const auto a = validate_hermitian_psd(ComplexMatrix(2, 2, {1.0, I, -I, 1.0}));
    EXPECT_NEAR(a.eigenvalues()[0], 2.0, 1e-14);
    EXPECT_NEAR(a.eigenvalues()[1], 0.0, 1e-14);
    EXPECT_GE(a.eigenvalues()[1], 0.0);
    EXPECT_EQ(a.rank(), 1u);
}

TEST(ValidateHermitianPSD, Rejections) {
    EXPECT_EQ(code_of([] { validate_hermitian_psd(ComplexMatrix(2, 2, {1.0, 2.0, 2.0, 1.0})); }),
              ErrorCode::NotPSD);
    EXPECT_EQ(code_of([] { validate_hermitian_psd(ComplexMatrix(2, 2, {1.0, 1.0, 0.0, 1.0})); }),
              ErrorCode::NotHermitian);
    EXPECT_EQ(code_of([] { validate_hermitian_psd(ComplexMatrix(2, 3)); }), ErrorCode::NotSquare);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(code_of([&] { validate_hermitian_psd(ComplexMatrix(1, 1, {nan})); }),
              ErrorCode::NonFinite);
}

TEST(ValidateHermitianPSD, TinyNegativeEigenvalueIsClipped) {
    // J_2 - 1e-12 I has eigenvalues {2 - 1e-12, -1e-12}: inside psd_tol.
    const auto a = validate_hermitian_psd(ComplexMatrix(2, 2, {1.0 - 1e-12, 1.0, 1.0, 1.0 - 1e-12}));
    EXPECT_EQ(a.eigenvalues()[1], 0.0);
    EXPECT_EQ(a.rank(), 1u);
}

TEST(GramFactor, Scalar) {
    const auto g = gram_factor(validate_hermitian_psd(ComplexMatrix(1, 1, {4.0})));
    ASSERT_EQ(g.d(), 1u);
    EXPECT_NEAR(g.v(0, 0).real(), 2.0, 1e-15);
    EXPECT_EQ(g.v(0, 0).imag(), 0.0);
}

TEST(GramFactor, AllOnesRankOne) {
    const auto g = gram_factor(validate_hermitian_psd(ComplexMatrix::constant(2, 2, 1.0)));
    ASSERT_EQ(g.d(), 1u);
    // Phase convention: largest-modulus entry real and nonnegative.
    EXPECT_NEAR(std::abs(g.v(0, 0) - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(g.v(1, 0) - 1.0), 0.0, 1e-14);
}

TEST(GramFactor, IdentityIsUnitary) {
    const auto g = gram_factor(validate_hermitian_psd(ComplexMatrix::identity(2)));
    ASSERT_EQ(g.d(), 2u);
    EXPECT_LE((multiply_adjoint(g.v, g.v) - ComplexMatrix::identity(2)).max_abs(), 1e-15);
    EXPECT_LE((g.v.adjoint() * g.v - ComplexMatrix::identity(2)).max_abs(), 1e-15);
}

TEST(GramFactor, RoundTripAndRankOnRandomInstances) {
    RngStream rng(2024, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 11;
        const std::size_t d = 1 + (trial * 7) % n;
        const ComplexMatrix m = random_psd(n, d, rng);
        const auto a = validate_hermitian_psd(m);
        const auto g = gram_factor(a);
        EXPECT_EQ(a.rank(), d);
        EXPECT_EQ(g.d(), d);
        const double cut = a.tolerances().rank_tol * a.eigenvalues().front();
        std::size_t above = 0;
        for (double x : a.eigenvalues()) above += x > cut;
        EXPECT_EQ(g.d(), above);
        EXPECT_LE((multiply_adjoint(g.v, g.v) - m).frobenius_norm(), 1e-8 * m.frobenius_norm());
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(g.row_norms_sq[i], m(i, i).real(), 1e-8);
    }
}

TEST(GramFactor, DeterministicBytes) {
    RngStream rng(99, 0);
    const ComplexMatrix m = random_psd(7, 4, rng);
    const auto g1 = gram_factor(validate_hermitian_psd(m));
    const auto g2 = gram_factor(validate_hermitian_psd(m));
    EXPECT_TRUE(g1.v == g2.v);
    EXPECT_EQ(g1.row_norms_sq, g2.row_norms_sq);
}

TEST(GramFactor, ZeroDiagonalRowsAreDropped) {
    const auto a = validate_hermitian_psd(ComplexMatrix(2, 2, {1.0, 0.0, 0.0, 0.0}));
    ASSERT_EQ(a.zero_diagonal_indices(), std::vector<std::size_t>{1});
    const auto g = gram_factor(a);
    EXPECT_EQ(g.n(), 1u);
    EXPECT_EQ(g.d(), 1u);
    EXPECT_EQ(g.source_rows, std::vector<std::size_t>{0});
    EXPECT_TRUE(g.dropped_rows());
}

TEST(GramFactor, ZeroDiagonalCauchySchwarzBound) {
    // Row 2 has A_22 = 1e-14 <= diag_tol; its off-diagonal entries must obey
    // |A_2j| <= sqrt(diag_tol * lambda_max).
    ComplexMatrix u(3, 2, {1.0, 0.3, I, 0.2, 1e-7, 0.0});
    const ComplexMatrix m = hermitian_part(multiply_adjoint(u, u));
    const auto a = validate_hermitian_psd(m);
    ASSERT_EQ(a.zero_diagonal_indices(), std::vector<std::size_t>{2});
    const double bound = std::sqrt(a.tolerances().diag_tol * a.eigenvalues().front());
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(std::abs(m(2, j)), bound);
}

TEST(GramFactor, ZeroMatrix) {
    const auto a = validate_hermitian_psd(ComplexMatrix(3, 3));
    EXPECT_EQ(a.rank(), 0u);
    EXPECT_EQ(a.zero_diagonal_indices().size(), 3u);
    EXPECT_EQ(code_of([&] { gram_factor(a); }), ErrorCode::ZeroMatrix);
}

TEST(GramFactor, ReconstructionFailureIsReported) {
    RngStream rng(3, 0);
    Tolerances tol;
    tol.recon_tol = 0.0;
    const auto a = validate_hermitian_psd(random_psd(6, 3, rng), tol);
    EXPECT_EQ(code_of([&] { gram_factor(a); }), ErrorCode::ReconstructionFailure);
}

TEST(ApplyUnitary, IdentityAndSwap) {
    const auto v = GramFactor::from_rows(ComplexMatrix::identity(2));
    EXPECT_TRUE(apply_unitary(v, ComplexMatrix::identity(2)).v == v.v);

    const ComplexMatrix swap(2, 2, {0.0, 1.0, 1.0, 0.0});
    const auto w = apply_unitary(v, swap);
    EXPECT_TRUE(w.v == swap);
    EXPECT_LE((multiply_adjoint(w.v, w.v) - ComplexMatrix::identity(2)).max_abs(), 0.0);
}

TEST(ApplyUnitary, RandomUnitaryPreservesGram) {
    RngStream rng(17, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + trial % 6;
        const auto v = GramFactor::from_rows(random_complex(d + 3, d, rng));
        const ComplexMatrix u = random_unitary(d, rng);
        const auto w = apply_unitary(v, u);
        const ComplexMatrix a = multiply_adjoint(v.v, v.v);
        EXPECT_LE((multiply_adjoint(w.v, w.v) - a).frobenius_norm(), 1e-8 * a.frobenius_norm());
    }
}

TEST(ApplyUnitary, RejectsNonUnitary) {
    const auto v = GramFactor::from_rows(ComplexMatrix::identity(2));
    const ComplexMatrix scaled = ComplexMatrix::identity(2) * Complex(2.0);
    EXPECT_EQ(code_of([&] { apply_unitary(v, scaled); }), ErrorCode::NotUnitary);
    EXPECT_EQ(code_of([&] { apply_unitary(v, ComplexMatrix::identity(3)); }),
              ErrorCode::DimensionMismatch);
}

}  // namespace
}  // namespace psdperm
