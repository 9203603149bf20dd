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
#include <gtest/gtest.h>

#include <sstream>

#include "dissim/recommender.hpp"
#include "support/synthetic.hpp"

using namespace dissim;

namespace {

Dataset make(std::initializer_list<std::pair<const char*, const char*>> edges) {
    std::vector<InteractionRecord> r;
    for (auto [u, i] : edges) r.push_back({u, i, 1.0, std::nullopt});
    return build_dataset(r);
}

NeighborModel hand_model(Axis axis, std::vector<std::vector<Neighbor>> rows) {
    return NeighborModel{axis, 80, make_preset("JS"), std::move(rows)};
}

// Brute force: score every unseen item with the direct formulas, drop
// zeros, full sort.
RecommendationList full_sort(const NeighborModel& m, const Dataset& train, Index u, std::size_t n) {
    RecommendationList out{u, {}};
    for (Index i = 0; i < train.n_items(); ++i) {
        if (train.contains(u, i)) continue;
        const double s = m.axis == Axis::item ? score_item_knn(m, train, u, i) : score_user_knn(m, train, u, i);
        if (s != 0.0) out.items.push_back({i, s});
    }
    std::sort(out.items.begin(), out.items.end(), [](const ScoredItem& a, const ScoredItem& b) {
        return a.score > b.score || (a.score == b.score && a.item < b.item);
    });
    if (out.items.size() > n) out.items.resize(n);
    return out;
}

} // namespace

TEST(ScoreItemKnn, HandModel) {
    // items: 0 a, 1 b, 2 c, 3 d; user 0 has a and b
    const auto train = make({{"x", "a"}, {"x", "b"}, {"y", "c"}, {"y", "d"}});
    auto m = hand_model(Axis::item, {{}, {}, {{0, 0.5}, {1, 0.3}}, {{2, 0.9}}});
    EXPECT_DOUBLE_EQ(score_item_knn(m, train, 0, 2), 0.8);
    EXPECT_EQ(score_item_knn(m, train, 0, 3), 0.0);
    EXPECT_THROW(score_item_knn(m, train, 0, 9), IndexError);
    EXPECT_THROW(score_user_knn(m, train, 0, 2), ConfigError);
}

TEST(ScoreUserKnn, HandModel) {
    const auto train = make({{"x", "a"}, {"y", "b"}, {"z", "c"}});
    auto m = hand_model(Axis::user, {{{1, 0.7}}, {}, {}});
    EXPECT_DOUBLE_EQ(score_user_knn(m, train, 0, 1), 0.7);
    EXPECT_EQ(score_user_knn(m, train, 0, 2), 0.0);
    EXPECT_THROW(score_user_knn(m, train, 7, 0), IndexError);
}

TEST(RecommendTopN, UserWithFullProfileGetsNothing) {
    const auto train = make({{"x", "a"}, {"x", "b"}, {"y", "a"}});
    const auto model = build_neighbor_model(train, Axis::item, 5, make_preset("JS"), 1);
    EXPECT_TRUE(recommend_top_n(model, train, 0, 10).items.empty());
    EXPECT_THROW(recommend_top_n(model, train, 0, 0), ConfigError);
}

TEST(RecommendTopN, ZeroScoresAreExcluded) {
    // 5 items, x holds a and b; only c has a neighbor in x's profile
    const auto train = make({{"x", "a"}, {"x", "b"}, {"y", "c"}, {"y", "d"}, {"z", "e"}});
    auto m = hand_model(Axis::item, {{}, {}, {{0, 0.4}}, {{4, 0.2}}, {{3, 0.1}}});
    const auto list = recommend_top_n(m, train, 0, 10);
    ASSERT_EQ(list.items.size(), 1u);
    EXPECT_EQ(list.items[0].item, 2u);
    EXPECT_DOUBLE_EQ(list.items[0].score, 0.4);
}

TEST(RecommendTopN, NegativeScoresRankLast) {
    const auto train = make({{"x", "a"}, {"y", "b"}, {"y", "c"}});
    auto m = hand_model(Axis::item, {{}, {{0, -0.2}}, {{0, 0.1}}});
    const auto list = recommend_top_n(m, train, 0, 10);
    ASSERT_EQ(list.items.size(), 2u);
    EXPECT_EQ(list.items[0].item, 2u);
    EXPECT_EQ(list.items[1].item, 1u);
    EXPECT_DOUBLE_EQ(list.items[1].score, -0.2);
}

TEST(RecommendTopN, MatchesFullSortOracle) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto train = build_dataset(fixtures::synthetic_records({.users = 20, .items = 15, .max_profile = 6, .seed = seed}));
        for (const char* name : {"JS", "AAJ", "MAJ", "S-AAAJ", "ASOR"}) {
            for (Axis axis : {Axis::item, Axis::user}) {
                const auto model = build_neighbor_model(train, axis, 4, make_preset(name, 0.8), 1);
                const Recommender rec(model, train);
                for (Index u = 0; u < train.n_users(); ++u) {
                    ASSERT_EQ(rec.top_n(u, 10), full_sort(model, train, u, 10))
                        << name << " " << to_string(axis) << " u=" << u;
                }
            }
        }
    }
}

// Direct per-item scores agree with a recount over the complete neighbor lists.
TEST(Scores, MatchExhaustiveRecount) {
    const auto train = build_dataset(fixtures::synthetic_records({.users = 20, .items = 15, .seed = 8}));
    const auto items = build_neighbor_model(train, Axis::item, 5, make_preset("S-AAJ", 0.2), 1);
    const auto users = build_neighbor_model(train, Axis::user, 5, make_preset("S-AAJ", 0.2), 1);
    for (Index u = 0; u < train.n_users(); ++u) {
        for (Index i = 0; i < train.n_items(); ++i) {
            double expect_item = 0, expect_user = 0;
            for (const auto& nb : items.neighbors[i])
                for (const auto& e : train.user_items(u))
                    if (e.index == nb.index) expect_item += nb.value;
            for (const auto& nb : users.neighbors[u])
                for (const auto& e : train.item_users(i))
                    if (e.index == nb.index) expect_user += nb.value;
            EXPECT_NEAR(score_item_knn(items, train, u, i), expect_item, 1e-12);
            EXPECT_NEAR(score_user_knn(users, train, u, i), expect_user, 1e-12);
        }
    }
}

TEST(RecommendAll, InvariantsOnSyntheticData) {
    const auto train = build_dataset(fixtures::synthetic_records({.users = 100, .items = 60, .seed = 21}));
    for (Axis axis : {Axis::item, Axis::user}) {
        const auto model = build_neighbor_model(train, axis, 10, make_preset("MAJ"), 1);
        const auto lists = recommend_all(model, train, 10, 1);
        EXPECT_EQ(lists, recommend_all(model, train, 10, 4));
        const auto longer = recommend_all(model, train, 11, 2);
        for (Index u = 0; u < train.n_users(); ++u) {
            const auto& l = lists[u];
            EXPECT_EQ(l.user, u);
            ASSERT_LE(l.items.size(), 10u);
            for (std::size_t p = 0; p < l.items.size(); ++p) {
                EXPECT_FALSE(train.contains(u, l.items[p].item));
                if (p > 0) {
                    EXPECT_TRUE(l.items[p - 1].score > l.items[p].score ||
                                (l.items[p - 1].score == l.items[p].score && l.items[p - 1].item < l.items[p].item));
                }
            }
            // top-N is a prefix of top-(N+1)
            ASSERT_TRUE(std::equal(l.items.begin(), l.items.end(), longer[u].items.begin()));
        }
    }
}

TEST(RecommendAll, ScalingSimilaritiesScalesScoresAndKeepsRankings) {
    const auto train = build_dataset(fixtures::synthetic_records({.users = 40, .items = 30, .seed = 13}));
    for (Axis axis : {Axis::item, Axis::user}) {
        const auto model = build_neighbor_model(train, axis, 6, make_preset("AAS", 0.4), 1);
        auto scaled = model;
        for (auto& row : scaled.neighbors)
            for (auto& nb : row) nb.value *= 4.0; // power of two: exact
        const auto a = recommend_all(model, train, 8, 1);
        const auto b = recommend_all(scaled, train, 8, 1);
        for (std::size_t u = 0; u < a.size(); ++u) {
            ASSERT_EQ(a[u].items.size(), b[u].items.size());
            for (std::size_t p = 0; p < a[u].items.size(); ++p) {
                EXPECT_EQ(a[u].items[p].item, b[u].items[p].item);
                EXPECT_EQ(a[u].items[p].score * 4.0, b[u].items[p].score);
            }
        }
    }
}

TEST(RecommendationDump, Format) {
    const auto train = make({{"x", "a"}, {"y", "a"}, {"y", "b"}});
    const auto model = build_neighbor_model(train, Axis::item, 5, make_preset("JS"), 1);
    std::ostringstream out;
    write_recommendations(out, recommend_all(model, train, 10, 1), train);
    EXPECT_EQ(out.str(), "x\tb\t1\t0.5\n");
}
