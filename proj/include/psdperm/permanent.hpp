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

#include "psdperm/matrix.hpp"

namespace psdperm {

enum class PermanentMethod { Naive, Ryser };

struct ExactResult {
    Complex value;
    double log_abs = 0.0;  // log |value|, -inf when value == 0
    PermanentMethod method = PermanentMethod::Naive;
    std::size_t n = 0;
};

inline constexpr std::size_t kNaiveMaxN = 9;
inline constexpr std::size_t kRyserMaxN = 22;

/// Sum over all n! permutations by recursive row expansion. Throws NotSquare,
/// TooLarge (n > 9).
ExactResult permanent_naive(const ComplexMatrix& m);

/// Ryser inclusion-exclusion with reflected Gray-code subset order, O(2^n n).
/// Throws NotSquare, TooLarge (n > 22).
ExactResult permanent_ryser(const ComplexMatrix& m);

}  // namespace psdperm
