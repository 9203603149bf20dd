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

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dissim/dataset.hpp"
#include "dissim/parallel.hpp"
#include "dissim/similarity.hpp"

namespace dissim {

struct Neighbor {
    Index index = 0;
    double value = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Descending value, then ascending index.
inline bool ranks_before(const Neighbor& a, const Neighbor& b) {
    return a.value > b.value || (a.value == b.value && a.index < b.index);
}

/// Per-thread buffers for co-occurrence counting against one target.
class CooccurrenceScratch {
public:
    explicit CooccurrenceScratch(std::size_t n_entities) : counts_(n_entities, 0) {}

    /// Fills `touched()` with every entity sharing at least one member with
    /// `target` (the target itself excluded) and `count(e)` with the overlap.
    void accumulate(const Dataset& d, Axis axis, Index target) {
        reset();
        for (const auto& member : d.profile(axis, target)) {
            for (const auto& other : d.transpose_profile(axis, member.index)) {
                if (other.index == target) {
                    continue;
                }
                if (counts_[other.index]++ == 0) {
                    touched_.push_back(other.index);
                }
            }
        }
    }

    const std::vector<Index>& touched() const { return touched_; }
    std::uint32_t count(Index e) const { return counts_[e]; }

private:
    void reset() {
        for (Index e : touched_) {
            counts_[e] = 0;
        }
        touched_.clear();
    }

    std::vector<std::uint32_t> counts_;
    std::vector<Index> touched_;
};

namespace detail {

inline std::vector<Neighbor> select_top_k(const Dataset& d, Axis axis, Index target, std::size_t k,
                                          const MeasureSpec& spec, CooccurrenceScratch& scratch) {
    scratch.accumulate(d, axis, target);
    const std::uint64_t n_target = d.profile(axis, target).size();
    std::vector<Neighbor> candidates;
    candidates.reserve(scratch.touched().size());
    for (Index other : scratch.touched()) {
        const PairCounts c{n_target, d.profile(axis, other).size(), scratch.count(other)};
        candidates.push_back({other, similarity(spec, c)});
    }
    if (candidates.size() > k) {
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                          candidates.end(), ranks_before);
        candidates.resize(k);
    } else {
        std::sort(candidates.begin(), candidates.end(), ranks_before);
    }
    return candidates;
}

} // namespace detail

/// The k entities most similar to `target` under `spec`, best first.
/// Entities sharing nothing with the target are never candidates.
inline std::vector<Neighbor> top_k_neighbors(const Dataset& d, Axis axis, Index target, std::size_t k,
                                             const MeasureSpec& spec) {
    if (k == 0) {
        throw ConfigError("k must be at least 1");
    }
    if (target >= d.size(axis)) {
        throw IndexError(std::string(to_string(axis)) + " index " + std::to_string(target) +
                         " out of range");
    }
    validate(spec);
    CooccurrenceScratch scratch(d.size(axis));
    return detail::select_top_k(d, axis, target, k, spec, scratch);
}

struct NeighborModel {
    Axis axis = Axis::item;
    std::size_t k = 80;
    MeasureSpec spec;
    std::vector<std::vector<Neighbor>> neighbors; ///< one ranked list per entity
};

/// Neighbor lists for every entity on `axis`, computed in parallel by
/// target. The result does not depend on `workers`.
inline NeighborModel build_neighbor_model(const Dataset& d, Axis axis, std::size_t k,
                                          const MeasureSpec& spec, std::size_t workers = 0) {
    if (k == 0) {
        throw ConfigError("k must be at least 1");
    }
    validate(spec);
    NeighborModel model{axis, k, spec, {}};
    const std::size_t n = d.size(axis);
    model.neighbors.resize(n);
    const std::size_t threads = std::min(resolve_workers(workers), std::max<std::size_t>(n, 1));
    std::vector<CooccurrenceScratch> scratch(threads, CooccurrenceScratch(n));
    parallel_for(n, threads, [&](std::size_t worker, std::size_t target) {
        model.neighbors[target] =
            detail::select_top_k(d, axis, static_cast<Index>(target), k, spec, scratch[worker]);
    });
    return model;
}

/// Writes "a \t b \t value" lines sorted by (a, b), tokens resolved on the
/// model's axis.
inline void write_similarity_dump(std::ostream& out, const NeighborModel& model, const Dataset& d) {
    const auto token = [&](Index e) -> const std::string& {
        return model.axis == Axis::item ? d.item_token(e) : d.user_token(e);
    };
    std::vector<Neighbor> row;
    const auto old_precision = out.precision(17);
    for (std::size_t a = 0; a < model.neighbors.size(); ++a) {
        row = model.neighbors[a];
        std::sort(row.begin(), row.end(), [](const Neighbor& x, const Neighbor& y) { return x.index < y.index; });
        for (const auto& nb : row) {
            out << token(static_cast<Index>(a)) << '\t' << token(nb.index) << '\t' << nb.value << '\n';
        }
    }
    out.precision(old_precision);
}

} // namespace dissim
