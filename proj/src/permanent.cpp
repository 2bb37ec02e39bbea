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

#include "psdperm/permanent.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "psdperm/error.hpp"

namespace psdperm {

namespace {

void check_input(const ComplexMatrix& m, std::size_t limit, const char* method) {
    if (!m.square()) {
        throw Error(ErrorCode::NotSquare, "permanent of a " + std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()) + " matrix");
    }
    if (m.rows() > limit) {
        throw Error(ErrorCode::TooLarge, std::string(method) + " permanent is limited to n <= " +
                                             std::to_string(limit) + ", got n = " +
                                             std::to_string(m.rows()));
    }
}

ExactResult make_result(Complex value, PermanentMethod method, std::size_t n) {
    const double mag = std::abs(value);
    return {value, mag > 0.0 ? std::log(mag) : -std::numeric_limits<double>::infinity(), method, n};
}

Complex expand(const ComplexMatrix& m, std::size_t row, std::uint32_t used) {
    const std::size_t n = m.rows();
    if (row == n) return 1.0;
    Complex s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (used & (1u << j)) continue;
        const Complex a = m(row, j);
        if (a == Complex{}) continue;
        s += a * expand(m, row + 1, used | (1u << j));
    }
    return s;
}

}  // namespace

ExactResult permanent_naive(const ComplexMatrix& m) {
    check_input(m, kNaiveMaxN, "naive");
    return make_result(expand(m, 0, 0), PermanentMethod::Naive, m.rows());
}

ExactResult permanent_ryser(const ComplexMatrix& m) {
    check_input(m, kRyserMaxN, "Ryser");
    const std::size_t n = m.rows();
    if (n == 0) return make_result(1.0, PermanentMethod::Ryser, 0);

    // per(M) = (-1)^n sum_{S != {}} (-1)^{|S|} prod_i sum_{j in S} M_ij.
    // Subsets are visited in reflected Gray order, so each step toggles one
    // column in the running row sums.
    std::vector<Complex> row_sums(n, 0.0);
    Complex total = 0.0;
    std::uint32_t gray = 0;
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const int col = std::countr_zero(k);
        const std::uint32_t bit = 1u << col;
        gray ^= bit;
        if (gray & bit) {
            for (std::size_t i = 0; i < n; ++i) row_sums[i] += m(i, col);
        } else {
            for (std::size_t i = 0; i < n; ++i) row_sums[i] -= m(i, col);
        }
        Complex prod = row_sums[0];
        for (std::size_t i = 1; i < n; ++i) prod *= row_sums[i];
        if (std::popcount(gray) % 2 == 1) {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if (n % 2 == 1) total = -total;
    return make_result(total, PermanentMethod::Ryser, n);
}

}  // namespace psdperm
