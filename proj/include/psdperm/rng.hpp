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

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "psdperm/matrix.hpp"

namespace psdperm {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/**
 * Deterministic counter-based stream. The 64-bit seed is the Philox key; the
 * stream id fills the upper half of the counter and the block index the lower
 * half, so distinct (seed, stream_id) pairs never share blocks and any block
 * can be computed independently of the others.
 */
class RngStream {
public:
    static constexpr std::string_view algorithm = "philox4x32-10";

    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    std::uint64_t position() const noexcept { return block_; }

    std::array<std::uint32_t, 4> next_block() noexcept;

    /// Two uniforms in the open interval (0, 1), 53 bits each, from one block.
    std::array<double, 2> next_uniform_pair() noexcept;

    /// (g1 + i g2) / sqrt2 with g1, g2 independent standard normals, so that
    /// E|z|^2 = 1 and |z|^2 ~ Exp(1). One block per sample (Box-Muller).
    Complex next_complex_normal() noexcept;

    /// Squared modulus of the next complex normal, drawn without the angle.
    double next_exponential() noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
};

/// d independent CN(0, 1) coordinates.
std::vector<Complex> sample_standard_complex_gaussian(RngStream& rng, std::size_t d);

}  // namespace psdperm
