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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "psdperm/matrix.hpp"
#include "psdperm/psd.hpp"
#include "psdperm/rng.hpp"

namespace psdperm {

enum class Ensemble { GaussianGram, Identity, AllOnes, Diagonal };

std::string_view to_string(Ensemble e) noexcept;
/// Accepts "gaussian-gram", "identity", "all-ones", "diagonal". Throws BadArgument.
Ensemble parse_ensemble(std::string_view name);

/**
 * Random or structured PSD test instance, deterministic in (n, d, seed).
 *
 *   gaussian-gram  A = G G^dagger, G an n x d matrix of CN(0, 1) entries,
 *                  scaled so the largest diagonal entry is 1; rank d is
 *                  verified against the eigenvalue count
 *   identity       I_n (requires d = n)
 *   all-ones       J_n (requires d = 1)
 *   diagonal       random positive diagonal, max entry 1 (requires d = n)
 *
 * Throws BadRank when d is outside [1, n] or does not fit the ensemble.
 */
HermitianPSD gen_instance(std::size_t n, std::size_t d, std::uint64_t seed, Ensemble ensemble,
                          const Tolerances& tol = {});

/// Haar-distributed d x d unitary (QR of a complex Gaussian matrix with the
/// phases of R's diagonal absorbed).
ComplexMatrix random_unitary(std::size_t d, RngStream& rng);

struct InstanceMetadata {
    std::optional<std::string> label;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> rank;
    std::optional<std::string> ensemble;

    bool empty() const noexcept { return !label && !seed && !rank && !ensemble; }
    friend bool operator==(const InstanceMetadata&, const InstanceMetadata&) = default;
};

/// On-disk matrix instance:
///   {"n": 2, "entries": [[{"re": 1, "im": 0}, ...], ...], "metadata": {...}}
struct InstanceFile {
    ComplexMatrix matrix;
    InstanceMetadata metadata;

    std::size_t n() const noexcept { return matrix.rows(); }
};

/// Throws ParseError (with line, column and byte offset) for malformed text and
/// SchemaError naming the offending field. `source` prefixes messages.
InstanceFile parse_instance_text(std::string_view text, std::string_view source = "<input>");
/// Throws IoError if the file cannot be read.
InstanceFile parse_instance(const std::filesystem::path& path);

/// Shortest round-trip decimal for every double, so parsing restores the
/// matrix bit for bit.
std::string serialize_instance(const InstanceFile& instance);
void write_instance(const InstanceFile& instance, const std::filesystem::path& path);

}  // namespace psdperm
