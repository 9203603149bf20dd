// Copyright 2026 The dissim-knn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#pragma once

// Set-based similarity measures and their dissimilarity-adjusted variants.
//
// Every measure is a function of three counts for a pair (i, j) of entities:
// |S(i)|, |S(j)| and |S(i) ∩ S(j)|, where S is U(·) for items and I(·) for
// users. A measure is composed from
//   - a base similarity (Jaccard, Sørensen, asymmetric Jaccard, or the
//     AJS×SOR baseline),
//   - a dissimilarity of the same family, either asymmetric (members of
//     S(j) outside S(i)) or symmetric (members outside the intersection on
//     both sides), normalized by the family's denominator,
//   - a combiner: additive  sim − λ·dis,
//                 multiplicative  sim / max(dis, 1/denominator).
//
// The asymmetric dissimilarity reads as the probability that a user who
// experienced j never experienced i; the symmetric one is the sum of both
// directions, so JSD(i,j) = JAD(i,j) + JAD(j,i).
//
// The symmetric asymmetric-Jaccard dissimilarity (n_i + n_j − 2·n_both)/n_i
// is an extension chosen here; ASOR is taken as AJS·SOR.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "dissim/dataset.hpp"
#include "dissim/errors.hpp"

namespace dissim {

struct PairCounts {
    std::uint64_t n_i = 0;
    std::uint64_t n_j = 0;
    std::uint64_t n_both = 0;

    std::uint64_t union_size() const { return n_i + n_j - n_both; }

    /// Counts of the reversed pair (j, i).
    PairCounts swapped() const { return {n_j, n_i, n_both}; }

    bool valid() const { return n_both <= std::min(n_i, n_j); }

    friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

enum class Family { jaccard, sorensen, asym_jaccard, asor };
enum class Adjustment {
    none,
    additive,
    multiplicative,
    product ///< sim · dis, only reachable through the literal table compositions
};
enum class DissimSymmetry { none, asymmetric, symmetric };

inline std::string_view to_string(Family f) {
    switch (f) {
    case Family::jaccard: return "jaccard";
    case Family::sorensen: return "sorensen";
    case Family::asym_jaccard: return "asym-jaccard";
    case Family::asor: return "asor";
    }
    return "?";
}

inline std::string_view to_string(Adjustment a) {
    switch (a) {
    case Adjustment::none: return "none";
    case Adjustment::additive: return "additive";
    case Adjustment::multiplicative: return "multiplicative";
    case Adjustment::product: return "product";
    }
    return "?";
}

inline std::string_view to_string(DissimSymmetry s) {
    switch (s) {
    case DissimSymmetry::none: return "n/a";
    case DissimSymmetry::asymmetric: return "asymmetric";
    case DissimSymmetry::symmetric: return "symmetric";
    }
    return "?";
}

struct MeasureSpec {
    Family family = Family::jaccard;
    Adjustment adjustment = Adjustment::none;
    DissimSymmetry symmetry = DissimSymmetry::none;
    double lambda = 0.0; ///< additive only, in (0, 1]
    /// Family the dissimilarity is taken from; unset means `family`.
    std::optional<Family> dissim_family;

    Family effective_dissim_family() const { return dissim_family.value_or(family); }

    friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

inline void validate(const MeasureSpec& spec) {
    if (spec.adjustment == Adjustment::none) {
        if (spec.symmetry != DissimSymmetry::none) {
            throw ConfigError("unadjusted measure cannot carry a dissimilarity symmetry");
        }
        return;
    }
    if (spec.family == Family::asor) {
        throw ConfigError("ASOR is a baseline and takes no adjustment");
    }
    if (spec.effective_dissim_family() == Family::asor) {
        throw ConfigError("ASOR has no dissimilarity");
    }
    if (spec.symmetry == DissimSymmetry::none) {
        throw ConfigError("adjusted measure needs a dissimilarity symmetry");
    }
    if (spec.adjustment == Adjustment::additive && !(spec.lambda > 0.0 && spec.lambda <= 1.0)) {
        throw ConfigError("lambda must be in (0, 1], got " + std::to_string(spec.lambda));
    }
}

/// Normalizer of a family: union for Jaccard, |S(i)|+|S(j)| for Sørensen,
/// |S(i)| for asymmetric Jaccard.
inline std::uint64_t family_denominator(Family family, const PairCounts& c) {
    switch (family) {
    case Family::jaccard:
    case Family::asor: return c.union_size();
    case Family::sorensen: return c.n_i + c.n_j;
    case Family::asym_jaccard: return c.n_i;
    }
    return 0;
}

namespace detail {

inline double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace detail

/// JS, SOR, AJS or ASOR. Empty denominators give 0.
inline double base_similarity(Family family, const PairCounts& c) {
    switch (family) {
    case Family::jaccard: return detail::ratio(c.n_both, c.union_size());
    case Family::sorensen: return detail::ratio(c.n_both, c.n_i + c.n_j);
    case Family::asym_jaccard: return detail::ratio(c.n_both, c.n_i);
    case Family::asor:
        return base_similarity(Family::asym_jaccard, c) * base_similarity(Family::sorensen, c);
    }
    return 0.0;
}

/// Members outside the intersection: of S(j) only (asymmetric) or of both
/// sides (symmetric).
inline std::uint64_t dissimilarity_numerator(DissimSymmetry symmetry, const PairCounts& c) {
    switch (symmetry) {
    case DissimSymmetry::asymmetric: return c.n_j - c.n_both;
    case DissimSymmetry::symmetric: return c.n_i + c.n_j - 2 * c.n_both;
    case DissimSymmetry::none: break;
    }
    throw ConfigError("dissimilarity needs a symmetry");
}

/// JAD/JSD, ASD and its symmetric form, AJD and its symmetric form.
inline double dissimilarity(Family family, DissimSymmetry symmetry, const PairCounts& c) {
    if (family == Family::asor) {
        throw ConfigError("ASOR has no dissimilarity");
    }
    return detail::ratio(dissimilarity_numerator(symmetry, c), family_denominator(family, c));
}

/// Lower bound applied to the dissimilarity before dividing by it:
/// one over the family denominator, or 0 when that denominator is empty.
inline double clamp_floor(Family family, const PairCounts& c) {
    const auto den = family_denominator(family, c);
    return den == 0 ? 0.0 : 1.0 / static_cast<double>(den);
}

inline double combine(Adjustment adjustment, double sim, double dis, double lambda, double floor) {
    switch (adjustment) {
    case Adjustment::none: return sim;
    case Adjustment::additive:
        if (!(lambda > 0.0 && lambda <= 1.0)) {
            throw ConfigError("lambda must be in (0, 1], got " + std::to_string(lambda));
        }
        return sim - lambda * dis;
    case Adjustment::multiplicative:
        if (!(floor > 0.0)) {
            throw ConfigError("clamp floor must be positive");
        }
        return sim / std::max(dis, floor);
    case Adjustment::product: return sim * dis;
    }
    return sim;
}

/// Value of `spec` for a pair with counts `c`. Pairs whose denominators are
/// empty score 0.
inline double similarity(const MeasureSpec& spec, const PairCounts& c) {
    const double sim = base_similarity(spec.family, c);
    if (spec.adjustment == Adjustment::none) {
        return sim;
    }
    const Family df = spec.effective_dissim_family();
    if (family_denominator(spec.family, c) == 0 || family_denominator(df, c) == 0) {
        return 0.0;
    }
    const double dis = dissimilarity(df, spec.symmetry, c);
    return combine(spec.adjustment, sim, dis, spec.lambda, clamp_floor(df, c));
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Canonical: every multiplicative variant divides by its own family's
/// dissimilarity. Literal: MAS, MAAJ, S-MAS and S-MAAJ follow the formulas
/// as printed in the variant tables (cross-family inverses, and a plain
/// product for MAS).
enum class Composition { canonical, literal_tables };

struct PresetInfo {
    std::string_view name;
    Family family;
    Adjustment adjustment;
    DissimSymmetry symmetry;
};

/// Presets in report order: Jaccard group, ASOR, Sørensen group, AJS group.
inline constexpr std::array<PresetInfo, 16> kPresets{{
    {"JS", Family::jaccard, Adjustment::none, DissimSymmetry::none},
    {"AAJ", Family::jaccard, Adjustment::additive, DissimSymmetry::asymmetric},
    {"MAJ", Family::jaccard, Adjustment::multiplicative, DissimSymmetry::asymmetric},
    {"S-AAJ", Family::jaccard, Adjustment::additive, DissimSymmetry::symmetric},
    {"S-MAJ", Family::jaccard, Adjustment::multiplicative, DissimSymmetry::symmetric},
    {"ASOR", Family::asor, Adjustment::none, DissimSymmetry::none},
    {"SOR", Family::sorensen, Adjustment::none, DissimSymmetry::none},
    {"AAS", Family::sorensen, Adjustment::additive, DissimSymmetry::asymmetric},
    {"MAS", Family::sorensen, Adjustment::multiplicative, DissimSymmetry::asymmetric},
    {"S-AAS", Family::sorensen, Adjustment::additive, DissimSymmetry::symmetric},
    {"S-MAS", Family::sorensen, Adjustment::multiplicative, DissimSymmetry::symmetric},
    {"AJS", Family::asym_jaccard, Adjustment::none, DissimSymmetry::none},
    {"AAAJ", Family::asym_jaccard, Adjustment::additive, DissimSymmetry::asymmetric},
    {"MAAJ", Family::asym_jaccard, Adjustment::multiplicative, DissimSymmetry::asymmetric},
    {"S-AAAJ", Family::asym_jaccard, Adjustment::additive, DissimSymmetry::symmetric},
    {"S-MAAJ", Family::asym_jaccard, Adjustment::multiplicative, DissimSymmetry::symmetric},
}};

namespace detail {

inline std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) {
        ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    return out;
}

} // namespace detail

/// Case-insensitive lookup; throws ConfigError for unknown names.
inline const PresetInfo& find_preset(std::string_view name) {
    const std::string key = detail::upper(name);
    for (const auto& p : kPresets) {
        if (p.name == key) {
            return p;
        }
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

inline bool uses_lambda(std::string_view preset_name) {
    return find_preset(preset_name).adjustment == Adjustment::additive;
}

/// Builds the spec for a named preset. `lambda` is only read by additive
/// presets.
inline MeasureSpec make_preset(std::string_view name, double lambda = 0.2,
                               Composition composition = Composition::canonical) {
    const PresetInfo& p = find_preset(name);
    MeasureSpec spec{p.family, p.adjustment, p.symmetry,
                     p.adjustment == Adjustment::additive ? lambda : 0.0, std::nullopt};
    if (composition == Composition::literal_tables) {
        if (p.name == "MAAJ" || p.name == "S-MAAJ" || p.name == "S-MAS") {
            spec.dissim_family = Family::jaccard;
        } else if (p.name == "MAS") {
            spec.adjustment = Adjustment::product;
        }
    }
    validate(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Counting on a dataset
// ---------------------------------------------------------------------------

/// |S(a) ∩ S(b)| of two index-sorted adjacency rows, by merging.
inline std::uint64_t intersection_size(std::span<const Edge> a, std::span<const Edge> b) {
    std::uint64_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->index < ib->index) {
            ++ia;
        } else if (ib->index < ia->index) {
            ++ib;
        } else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

inline PairCounts pair_counts(const Dataset& d, Axis axis, Index a, Index b) {
    const auto sa = d.profile(axis, a);
    const auto sb = d.profile(axis, b);
    return {sa.size(), sb.size(), intersection_size(sa, sb)};
}

inline double measure(const MeasureSpec& spec, const Dataset& d, Axis axis, Index a, Index b) {
    return similarity(spec, pair_counts(d, axis, a, b));
}

} // namespace dissim
