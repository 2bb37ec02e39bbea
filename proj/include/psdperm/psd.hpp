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
#include <vector>

#include "psdperm/matrix.hpp"

namespace psdperm {

/// Numerical thresholds used when validating and factoring input matrices.
struct Tolerances {
    double herm_tol = 1e-10;   // relative asymmetry allowed
    double psd_tol = 1e-9;     // most negative eigenvalue, relative to lambda_max
    double rank_tol = 1e-10;   // eigenvalues above rank_tol * lambda_max count toward rank
    double diag_tol = 1e-12;   // absolute threshold for a zero diagonal entry
    double recon_tol = 1e-8;   // relative Frobenius error of V V^dagger
};

/**
 * A validated Hermitian positive semidefinite matrix.
 *
 * Only validate_hermitian_psd() produces instances. The stored matrix is the
 * Hermitian part of the input; eigenvalues are clipped at zero when they fall
 * inside the PSD tolerance.
 */
class HermitianPSD {
public:
    std::size_t n() const noexcept { return matrix_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    /// Descending, clipped at zero.
    const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
    const ComplexMatrix& eigenvectors() const noexcept { return eigenvectors_; }
    std::size_t rank() const noexcept { return rank_; }
    const std::vector<std::size_t>& zero_diagonal_indices() const noexcept { return zero_diagonal_; }
    bool has_zero_diagonal() const noexcept { return !zero_diagonal_.empty(); }
    const Tolerances& tolerances() const noexcept { return tol_; }

private:
    friend HermitianPSD validate_hermitian_psd(const ComplexMatrix&, const Tolerances&);
    HermitianPSD() = default;

    ComplexMatrix matrix_;
    std::vector<double> eigenvalues_;
    ComplexMatrix eigenvectors_;
    std::size_t rank_ = 0;
    std::vector<std::size_t> zero_diagonal_;
    Tolerances tol_;
};

/**
 * Full-column-rank factor V with A = V V^dagger.
 *
 * Row i of V is v_i^dagger in the usual notation, so A_ij = v_i^dagger v_j.
 * When the source matrix has zero diagonal entries those rows are dropped:
 * `source_rows[k]` is the row of A that row k of V reproduces, and n() counts
 * only the retained rows.
 */
struct GramFactor {
    ComplexMatrix v;
    std::vector<double> row_norms_sq;
    std::vector<std::size_t> source_rows;
    std::size_t source_dim = 0;  // dimension of the matrix that was factored

    std::size_t n() const noexcept { return v.rows(); }
    bool dropped_rows() const noexcept { return source_dim > v.rows(); }
    std::size_t d() const noexcept { return v.cols(); }

    /// Wraps an explicit factor (rows in order, nothing dropped).
    static GramFactor from_rows(ComplexMatrix v);
};

/// Throws NotSquare, NonFinite, NotHermitian or NotPSD.
HermitianPSD validate_hermitian_psd(const ComplexMatrix& m, const Tolerances& tol = {});

/**
 * Spectral Gram factor V = U_d diag(sqrt(lambda)) of the nonzero-diagonal part
 * of A. Columns follow descending eigenvalues and each column's phase is fixed
 * so its largest-modulus entry is real and nonnegative.
 *
 * Throws ZeroMatrix when rank is 0 and ReconstructionFailure when V V^dagger
 * misses A by more than recon_tol (relative Frobenius).
 */
GramFactor gram_factor(const HermitianPSD& a);

/// Rows v_i^dagger -> v_i^dagger U. Throws NotUnitary unless U^dagger U = I within tol.
GramFactor apply_unitary(const GramFactor& v, const ComplexMatrix& u, double tol = 1e-8);

}  // namespace psdperm
