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

// Top-N recommendation from neighbor lists, scoring every item the user has
// not seen in training.
//
//   item-kNN:  score(u, i) = Σ_{j ∈ N(i) ∩ I(u)} sim(i, j)
//   user-kNN:  score(u, i) = Σ_{v ∈ N(u), i ∈ I(v)} sim(u, v)
//
// Ratings are ignored and negative similarities subtract. Items with
// score 0 carry no evidence and are left out of the list.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dissim/dataset.hpp"
#include "dissim/neighbors.hpp"
#include "dissim/parallel.hpp"

namespace dissim {

struct ScoredItem {
    Index item = 0;
    double score = 0.0;

    friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

struct RecommendationList {
    Index user = 0;
    std::vector<ScoredItem> items;

    friend bool operator==(const RecommendationList&, const RecommendationList&) = default;
};

namespace detail {

inline void check_model(const NeighborModel& model, const Dataset& train, Axis expected) {
    if (model.axis != expected) {
        throw ConfigError("neighbor model axis does not match the scoring scheme");
    }
    if (model.neighbors.size() != train.size(expected)) {
        throw ConfigError("neighbor model was built on a different dataset");
    }
}

inline bool by_score(const ScoredItem& a, const ScoredItem& b) {
    return a.score > b.score || (a.score == b.score && a.item < b.item);
}

} // namespace detail

/// Item-based score of candidate `i` for user `u`. Terms are summed in
/// ascending neighbor index, the same order the batch recommender uses.
inline double score_item_knn(const NeighborModel& model, const Dataset& train, Index u, Index i) {
    detail::check_model(model, train, Axis::item);
    if (u >= train.n_users()) {
        throw IndexError("user index " + std::to_string(u) + " out of range");
    }
    if (i >= train.n_items()) {
        throw IndexError("item index " + std::to_string(i) + " out of range");
    }
    std::vector<Neighbor> hits;
    for (const auto& nb : model.neighbors[i]) {
        if (train.contains(u, nb.index)) {
            hits.push_back(nb);
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    double score = 0.0;
    for (const auto& nb : hits) {
        score += nb.value;
    }
    return score;
}

/// User-based score of candidate `i` for user `u`, summed in neighbor-list
/// order.
inline double score_user_knn(const NeighborModel& model, const Dataset& train, Index u, Index i) {
    detail::check_model(model, train, Axis::user);
    if (u >= train.n_users()) {
        throw IndexError("user index " + std::to_string(u) + " out of range");
    }
    if (i >= train.n_items()) {
        throw IndexError("item index " + std::to_string(i) + " out of range");
    }
    double score = 0.0;
    for (const auto& nb : model.neighbors[u]) {
        if (train.contains(nb.index, i)) {
            score += nb.value;
        }
    }
    return score;
}

/// Batch scorer over all unrated items. For item-kNN it keeps the reverse
/// of the neighbor lists (for each j, the items i having j as a neighbor)
/// so a user's scores come from walking their own profile.
class Recommender {
public:
    Recommender(const NeighborModel& model, const Dataset& train) : model_(&model), train_(&train) {
        detail::check_model(model, train, model.axis);
        if (model.axis == Axis::item) {
            reverse_offsets_.assign(train.n_items() + 1, 0);
            for (const auto& row : model.neighbors) {
                for (const auto& nb : row) {
                    ++reverse_offsets_[nb.index + 1];
                }
            }
            for (std::size_t j = 0; j < train.n_items(); ++j) {
                reverse_offsets_[j + 1] += reverse_offsets_[j];
            }
            reverse_.resize(reverse_offsets_.back());
            std::vector<std::size_t> cursor(reverse_offsets_.begin(), reverse_offsets_.end() - 1);
            for (Index i = 0; i < model.neighbors.size(); ++i) {
                for (const auto& nb : model.neighbors[i]) {
                    reverse_[cursor[nb.index]++] = {i, nb.value};
                }
            }
        }
    }

    /// Per-thread accumulation buffers.
    class Scratch {
    public:
        explicit Scratch(std::size_t n_items) : scores_(n_items, 0.0), seen_(n_items, 0) {}

    private:
        friend class Recommender;
        std::vector<double> scores_;
        std::vector<std::uint8_t> seen_;
        std::vector<Index> touched_;
    };

    Scratch make_scratch() const { return Scratch(train_->n_items()); }

    RecommendationList top_n(Index u, std::size_t n, Scratch& scratch) const {
        if (n == 0) {
            throw ConfigError("top-N length must be at least 1");
        }
        const Dataset& train = *train_;
        const auto profile = train.user_items(u);
        auto add = [&](Index item, double value) {
            if (!scratch.seen_[item]) {
                scratch.seen_[item] = 1;
                scratch.touched_.push_back(item);
            }
            scratch.scores_[item] += value;
        };

        if (model_->axis == Axis::item) {
            for (const auto& e : profile) {
                for (std::size_t p = reverse_offsets_[e.index]; p < reverse_offsets_[e.index + 1]; ++p) {
                    add(reverse_[p].item, reverse_[p].score);
                }
            }
        } else {
            for (const auto& nb : model_->neighbors[u]) {
                for (const auto& e : train.user_items(nb.index)) {
                    add(e.index, nb.value);
                }
            }
        }

        RecommendationList list{u, {}};
        for (Index item : scratch.touched_) {
            const double score = scratch.scores_[item];
            scratch.scores_[item] = 0.0;
            scratch.seen_[item] = 0;
            if (score != 0.0 && !train.contains(u, item)) {
                list.items.push_back({item, score});
            }
        }
        scratch.touched_.clear();

        auto& items = list.items;
        if (items.size() > n) {
            std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n), items.end(),
                              detail::by_score);
            items.resize(n);
        } else {
            std::sort(items.begin(), items.end(), detail::by_score);
        }
        return list;
    }

    RecommendationList top_n(Index u, std::size_t n) const {
        auto scratch = make_scratch();
        return top_n(u, n, scratch);
    }

private:
    const NeighborModel* model_;
    const Dataset* train_;
    std::vector<std::size_t> reverse_offsets_;
    std::vector<ScoredItem> reverse_; // (item i, sim(i, j)) grouped by j
};

inline RecommendationList recommend_top_n(const NeighborModel& model, const Dataset& train, Index u,
                                          std::size_t n) {
    return Recommender(model, train).top_n(u, n);
}

/// One list per user, index-aligned with the users of `train`.
inline std::vector<RecommendationList> recommend_all(const NeighborModel& model, const Dataset& train,
                                                     std::size_t n, std::size_t workers = 0) {
    const Recommender rec(model, train);
    const std::size_t n_users = train.n_users();
    const std::size_t threads = std::min(resolve_workers(workers), std::max<std::size_t>(n_users, 1));
    std::vector<Recommender::Scratch> scratch;
    scratch.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        scratch.push_back(rec.make_scratch());
    }
    std::vector<RecommendationList> lists(n_users);
    parallel_for(n_users, threads, [&](std::size_t worker, std::size_t u) {
        lists[u] = rec.top_n(static_cast<Index>(u), n, scratch[worker]);
    });
    return lists;
}

/// "user \t item \t rank \t score" lines, rank starting at 1.
inline void write_recommendations(std::ostream& out, const std::vector<RecommendationList>& lists,
                                  const Dataset& d) {
    const auto old_precision = out.precision(17);
    for (const auto& list : lists) {
        std::size_t rank = 1;
        for (const auto& s : list.items) {
            out << d.user_token(list.user) << '\t' << d.item_token(s.item) << '\t' << rank++ << '\t'
                << s.score << '\n';
        }
    }
    out.precision(old_precision);
}

} // namespace dissim
