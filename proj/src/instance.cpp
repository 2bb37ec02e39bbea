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

#include "psdperm/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "psdperm/error.hpp"

namespace psdperm {

using nlohmann::json;

std::string_view to_string(Ensemble e) noexcept {
    switch (e) {
        case Ensemble::GaussianGram: return "gaussian-gram";
        case Ensemble::Identity: return "identity";
        case Ensemble::AllOnes: return "all-ones";
        case Ensemble::Diagonal: return "diagonal";
    }
    return "unknown";
}

Ensemble parse_ensemble(std::string_view name) {
    for (auto e : {Ensemble::GaussianGram, Ensemble::Identity, Ensemble::AllOnes, Ensemble::Diagonal})
        if (name == to_string(e)) return e;
    throw Error(ErrorCode::BadArgument, "unknown ensemble '" + std::string(name) + "'");
}

HermitianPSD gen_instance(std::size_t n, std::size_t d, std::uint64_t seed, Ensemble ensemble,
                          const Tolerances& tol) {
    if (d < 1 || d > n) {
        throw Error(ErrorCode::BadRank, "need 1 <= d <= n, got n = " + std::to_string(n) +
                                            ", d = " + std::to_string(d));
    }
    auto need = [&](std::size_t want) {
        if (d != want) {
            throw Error(ErrorCode::BadRank, std::string(to_string(ensemble)) + " ensemble has rank " +
                                                std::to_string(want) + ", requested d = " +
                                                std::to_string(d));
        }
    };

    RngStream rng(seed, 0);
    ComplexMatrix a;
    switch (ensemble) {
        case Ensemble::Identity:
            need(n);
            a = ComplexMatrix::identity(n);
            break;
        case Ensemble::AllOnes:
            need(1);
            a = ComplexMatrix::constant(n, n, 1.0);
            break;
        case Ensemble::Diagonal: {
            need(n);
            std::vector<double> diag(n);
            for (auto& x : diag) x = rng.next_uniform_pair()[0];
            const double top = *std::max_element(diag.begin(), diag.end());
            for (auto& x : diag) x /= top;
            a = ComplexMatrix::diagonal(diag);
            break;
        }
        case Ensemble::GaussianGram: {
            ComplexMatrix g(n, d);
            for (auto& z : g.data()) z = rng.next_complex_normal();
            a = multiply_adjoint(g, g);
            double top = 0.0;
            for (std::size_t i = 0; i < n; ++i) top = std::max(top, a(i, i).real());
            a *= 1.0 / top;
            a = hermitian_part(a);
            break;
        }
    }

    HermitianPSD out = validate_hermitian_psd(a, tol);
    if (out.rank() != d) {
        throw Error(ErrorCode::BadRank, "generated instance has numerical rank " +
                                            std::to_string(out.rank()) + ", expected " +
                                            std::to_string(d));
    }
    return out;
}

ComplexMatrix random_unitary(std::size_t d, RngStream& rng) {
    ComplexMatrix q(d, d);
    for (auto& z : q.data()) z = rng.next_complex_normal();
    // Modified Gram-Schmidt on columns; R's diagonal comes out real positive,
    // which makes the result Haar distributed.
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            Complex proj = 0.0;
            for (std::size_t i = 0; i < d; ++i) proj += std::conj(q(i, j)) * q(i, k);
            for (std::size_t i = 0; i < d; ++i) q(i, k) -= proj * q(i, j);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < d; ++i) norm += std::norm(q(i, k));
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < d; ++i) q(i, k) /= norm;
    }
    return q;
}

namespace {

[[noreturn]] void schema_error(std::string_view source, const std::string& field,
                               const std::string& what) {
    throw Error(ErrorCode::SchemaError, std::string(source) + ": field '" + field + "': " + what);
}

double number_field(const json& obj, const char* key, const std::string& path, std::string_view source) {
    const auto it = obj.find(key);
    const std::string field = path + "." + key;
    if (it == obj.end()) schema_error(source, field, "missing");
    if (!it->is_number()) schema_error(source, field, "expected a number, got " + std::string(it->type_name()));
    const double x = it->get<double>();
    if (!std::isfinite(x)) schema_error(source, field, "not finite");
    return x;
}

}  // namespace

InstanceFile parse_instance_text(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
        std::size_t line = 1;
        std::size_t col = 1;
        for (std::size_t k = 0; k + 1 < byte; ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << source << ":" << line << ":" << col << " (byte " << e.byte << "): " << e.what();
        throw Error(ErrorCode::ParseError, os.str());
    }

    if (!doc.is_object()) schema_error(source, "$", "top level must be an object");

    const auto n_it = doc.find("n");
    if (n_it == doc.end()) schema_error(source, "n", "missing");
    if (!n_it->is_number_integer()) schema_error(source, "n", "expected an integer");
    const auto n_signed = n_it->get<std::int64_t>();
    if (n_signed < 1) schema_error(source, "n", "must be at least 1");
    const auto n = static_cast<std::size_t>(n_signed);

    const auto e_it = doc.find("entries");
    if (e_it == doc.end()) schema_error(source, "entries", "missing");
    if (!e_it->is_array() || e_it->size() != n)
        schema_error(source, "entries", "expected an array of " + std::to_string(n) + " rows");

    InstanceFile out;
    out.matrix = ComplexMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = (*e_it)[i];
        const std::string row_path = "entries[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != n)
            schema_error(source, row_path, "expected an array of " + std::to_string(n) + " entries");
        for (std::size_t j = 0; j < n; ++j) {
            const auto& cell = row[j];
            const std::string path = row_path + "[" + std::to_string(j) + "]";
            if (!cell.is_object()) schema_error(source, path, "expected an object {re, im}");
            out.matrix(i, j) = Complex(number_field(cell, "re", path, source),
                                       number_field(cell, "im", path, source));
        }
    }

    if (const auto m_it = doc.find("metadata"); m_it != doc.end() && !m_it->is_null()) {
        if (!m_it->is_object()) schema_error(source, "metadata", "expected an object");
        const auto& m = *m_it;
        auto& md = out.metadata;
        if (auto it = m.find("label"); it != m.end()) {
            if (!it->is_string()) schema_error(source, "metadata.label", "expected a string");
            md.label = it->get<std::string>();
        }
        if (auto it = m.find("ensemble"); it != m.end()) {
            if (!it->is_string()) schema_error(source, "metadata.ensemble", "expected a string");
            md.ensemble = it->get<std::string>();
        }
        if (auto it = m.find("seed"); it != m.end()) {
            if (!it->is_number_unsigned()) schema_error(source, "metadata.seed", "expected a nonnegative integer");
            md.seed = it->get<std::uint64_t>();
        }
        if (auto it = m.find("rank"); it != m.end()) {
            if (!it->is_number_unsigned()) schema_error(source, "metadata.rank", "expected a nonnegative integer");
            md.rank = it->get<std::size_t>();
        }
    }
    return out;
}

InstanceFile parse_instance(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_instance_text(buf.str(), path.string());
}

std::string serialize_instance(const InstanceFile& instance) {
    const std::size_t n = instance.n();
    json entries = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) {
            const Complex z = instance.matrix(i, j);
            row.push_back({{"re", z.real()}, {"im", z.imag()}});
        }
        entries.push_back(std::move(row));
    }
    json doc = {{"n", n}, {"entries", std::move(entries)}};
    const auto& md = instance.metadata;
    if (!md.empty()) {
        json m = json::object();
        if (md.label) m["label"] = *md.label;
        if (md.ensemble) m["ensemble"] = *md.ensemble;
        if (md.seed) m["seed"] = *md.seed;
        if (md.rank) m["rank"] = *md.rank;
        doc["metadata"] = std::move(m);
    }
    return doc.dump(2) + "\n";
}

void write_instance(const InstanceFile& instance, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << serialize_instance(instance);
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace psdperm
