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

#include <cmath>
#include <cstdint>

#include "psdperm/matrix.hpp"
#include "psdperm/rng.hpp"

namespace psdperm::testing {

inline ComplexMatrix random_complex(std::size_t rows, std::size_t cols, RngStream& rng) {
    ComplexMatrix m(rows, cols);
    for (auto& z : m.data()) z = rng.next_complex_normal();
    return m;
}

/// G G^dagger for an n x d complex Gaussian G (rank d almost surely).
inline ComplexMatrix random_psd(std::size_t n, std::size_t d, RngStream& rng) {
    const ComplexMatrix g = random_complex(n, d, rng);
    return hermitian_part(multiply_adjoint(g, g));
}

/// B B^dagger / d + shift * I, comfortably positive definite.
inline ComplexMatrix random_pd(std::size_t d, RngStream& rng, double shift = 0.5) {
    ComplexMatrix x = random_psd(d, d, rng);
    x *= 1.0 / static_cast<double>(d);
    for (std::size_t a = 0; a < d; ++a) x(a, a) += shift;
    return hermitian_part(x);
}

/// Random Hermitian direction with unit Frobenius norm.
inline ComplexMatrix random_hermitian_direction(std::size_t d, RngStream& rng) {
    ComplexMatrix h = hermitian_part(random_complex(d, d, rng));
    h *= 1.0 / h.frobenius_norm();
    return h;
}

}  // namespace psdperm::testing
