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

#include "psdperm/psd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "psdperm/error.hpp"

namespace psdperm {

namespace {

std::size_t count_rank(const std::vector<double>& values, double rank_tol) {
    if (values.empty() || !(values.front() > 0.0)) return 0;
    const double cut = rank_tol * values.front();
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [cut](double x) { return x > cut; }));
}

ComplexMatrix principal_submatrix(const ComplexMatrix& a, const std::vector<std::size_t>& keep) {
    ComplexMatrix sub(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) sub(i, j) = a(keep[i], keep[j]);
    return sub;
}

}  // namespace

GramFactor GramFactor::from_rows(ComplexMatrix v) {
    GramFactor g;
    g.row_norms_sq.resize(v.rows());
    g.source_rows.resize(v.rows());
    for (std::size_t i = 0; i < v.rows(); ++i) {
        double s = 0.0;
        for (const auto& z : v.row(i)) s += std::norm(z);
        g.row_norms_sq[i] = s;
        g.source_rows[i] = i;
    }
    g.source_dim = v.rows();
    g.v = std::move(v);
    return g;
}

HermitianPSD validate_hermitian_psd(const ComplexMatrix& m, const Tolerances& tol) {
    if (!m.square()) {
        throw Error(ErrorCode::NotSquare, "matrix is " + std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
    }
    if (!m.all_finite()) throw Error(ErrorCode::NonFinite, "matrix has NaN or Inf entries");

    const double defect = hermitian_defect(m);
    if (defect > tol.herm_tol * std::max(1.0, m.max_abs())) {
        std::ostringstream os;
        os << "max |A_ij - conj(A_ji)| = " << defect;
        throw Error(ErrorCode::NotHermitian, os.str());
    }

    HermitianPSD out;
    out.tol_ = tol;
    out.matrix_ = hermitian_part(m);
    auto eig = hermitian_eigen(out.matrix_);

    const double lambda_max = eig.values.empty() ? 0.0 : eig.values.front();
    const double lambda_min = eig.values.empty() ? 0.0 : eig.values.back();
    if (lambda_min < -tol.psd_tol * std::max(1.0, lambda_max)) {
        std::ostringstream os;
        os << "smallest eigenvalue " << lambda_min;
        throw Error(ErrorCode::NotPSD, os.str());
    }
    for (auto& x : eig.values) x = std::max(x, 0.0);

    out.rank_ = count_rank(eig.values, tol.rank_tol);
    out.eigenvalues_ = std::move(eig.values);
    out.eigenvectors_ = std::move(eig.vectors);
    for (std::size_t i = 0; i < out.n(); ++i)
        if (out.matrix_(i, i).real() <= tol.diag_tol) out.zero_diagonal_.push_back(i);
    return out;
}

GramFactor gram_factor(const HermitianPSD& a) {
    const auto& tol = a.tolerances();
    if (a.rank() == 0) throw Error(ErrorCode::ZeroMatrix, "matrix has rank 0");

    std::vector<std::size_t> keep;
    for (std::size_t i = 0, z = 0; i < a.n(); ++i) {
        if (z < a.zero_diagonal_indices().size() && a.zero_diagonal_indices()[z] == i) {
            ++z;
            continue;
        }
        keep.push_back(i);
    }

    ComplexMatrix source;
    std::vector<double> values;
    ComplexMatrix vectors;
    std::size_t rank = 0;
    if (keep.size() == a.n()) {
        source = a.matrix();
        values = a.eigenvalues();
        vectors = a.eigenvectors();
        rank = a.rank();
    } else {
        source = principal_submatrix(a.matrix(), keep);
        auto eig = hermitian_eigen(source);
        for (auto& x : eig.values) x = std::max(x, 0.0);
        rank = count_rank(eig.values, tol.rank_tol);
        values = std::move(eig.values);
        vectors = std::move(eig.vectors);
    }
    if (rank == 0) throw Error(ErrorCode::ZeroMatrix, "nonzero-diagonal part has rank 0");

    const std::size_t n = keep.size();
    ComplexMatrix v(n, rank);
    for (std::size_t k = 0; k < rank; ++k) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::abs(vectors(i, k));
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        const Complex unphase = best > 0.0 ? std::conj(vectors(arg, k)) / best : Complex{1.0};
        const double root = std::sqrt(values[k]);
        for (std::size_t i = 0; i < n; ++i) v(i, k) = vectors(i, k) * unphase * root;
        v(arg, k) = std::abs(v(arg, k));
    }

    const double err = (multiply_adjoint(v, v) - source).frobenius_norm();
    const double scale = source.frobenius_norm();
    if (err > tol.recon_tol * scale) {
        std::ostringstream os;
        os << "||V V^dagger - A||_F = " << err << " exceeds " << tol.recon_tol << " * " << scale;
        throw Error(ErrorCode::ReconstructionFailure, os.str());
    }

    GramFactor g = GramFactor::from_rows(std::move(v));
    g.source_rows = std::move(keep);
    g.source_dim = a.n();
    return g;
}

GramFactor apply_unitary(const GramFactor& v, const ComplexMatrix& u, double tol) {
    if (!u.square() || u.rows() != v.d()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "unitary must be " + std::to_string(v.d()) + "x" + std::to_string(v.d()));
    }
    const double defect = (u.adjoint() * u - ComplexMatrix::identity(u.rows())).max_abs();
    if (defect > tol) {
        std::ostringstream os;
        os << "max |U^dagger U - I| = " << defect;
        throw Error(ErrorCode::NotUnitary, os.str());
    }
    GramFactor out = GramFactor::from_rows(v.v * u);
    out.source_rows = v.source_rows;
    out.source_dim = v.source_dim;
    return out;
}

}  // namespace psdperm
