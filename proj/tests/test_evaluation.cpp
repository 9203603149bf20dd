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

#include <map>
#include <set>
#include <sstream>

#include "dissim/evaluation.hpp"
#include "dissim/report.hpp"
#include "support/synthetic.hpp"

using namespace dissim;

namespace {

RecommendationList list_of(Index user, std::initializer_list<Index> items) {
    RecommendationList l{user, {}};
    double s = 1.0;
    for (Index i : items) l.items.push_back({i, s -= 0.01});
    return l;
}

std::vector<Edge> test_row(std::initializer_list<std::pair<Index, double>> items) {
    std::vector<Edge> row;
    for (auto [i, r] : items) row.push_back({i, r, std::nullopt});
    return row;
}

} // namespace

TEST(HoldoutCount, CeilWithFloorOfOneTrainItem) {
    EXPECT_EQ(holdout_count(5, 0.2), 1u);
    EXPECT_EQ(holdout_count(10, 0.2), 2u);
    EXPECT_EQ(holdout_count(11, 0.2), 3u);
    EXPECT_EQ(holdout_count(1, 0.2), 0u);
    EXPECT_EQ(holdout_count(0, 0.2), 0u);
    EXPECT_EQ(holdout_count(2, 0.9), 1u);
}

TEST(HoldoutSplit, TakesMostRecent) {
    std::vector<InteractionRecord> r;
    for (int t = 1; t <= 5; ++t) r.push_back({"u", "i" + std::to_string(6 - t), 1.0, t});
    r.push_back({"solo", "i1", 1.0, 3});
    const auto d = build_dataset(r);
    const auto s = holdout_split(d, {SplitKind::temporal, 0.2, 0});
    const Index u = *d.find_user("u");
    ASSERT_EQ(s.test[u].size(), 1u);
    EXPECT_EQ(d.item_token(s.test[u][0].index), "i1");
    EXPECT_EQ(s.test[u][0].timestamp, 5);
    EXPECT_EQ(s.train.user_items(u).size(), 4u);
    const Index solo = *d.find_user("solo");
    EXPECT_TRUE(s.test[solo].empty());
    EXPECT_EQ(s.train.user_items(solo).size(), 1u);
}

TEST(HoldoutSplit, TimestampTiesBrokenByItemIndex) {
    std::vector<InteractionRecord> r{{"u", "a", 1, 7}, {"u", "b", 1, 7}, {"u", "c", 1, 7}};
    const auto d = build_dataset(r);
    const auto s = holdout_split(d, {SplitKind::temporal, 0.2, 0});
    ASSERT_EQ(s.test[0].size(), 1u);
    EXPECT_EQ(d.item_token(s.test[0][0].index), "c");
}

TEST(HoldoutSplit, Errors) {
    const auto d = build_dataset(fixtures::synthetic_records({.users = 5, .timestamps = false}));
    EXPECT_THROW(holdout_split(d, {SplitKind::temporal, 0.2, 0}), DataError);
    EXPECT_THROW(holdout_split(d, {SplitKind::random, 0.0, 0}), ConfigError);
    EXPECT_THROW(holdout_split(d, {SplitKind::random, 1.0, 0}), ConfigError);
    EXPECT_NO_THROW(holdout_split(d, {SplitKind::random, 0.2, 0}));
}

TEST(HoldoutSplit, ConservationAndTemporalOrderExhaustive) {
    const auto d = build_dataset(fixtures::synthetic_records({.users = 100, .items = 80, .min_profile = 1, .max_profile = 19, .seed = 3}));
    ASSERT_GT(d.n_transactions(), 900u);
    for (SplitKind kind : {SplitKind::temporal, SplitKind::random}) {
        const auto s = holdout_split(d, {kind, 0.2, 99});
        EXPECT_EQ(s.train.n_transactions() + s.n_test(), d.n_transactions());
        for (Index u = 0; u < d.n_users(); ++u) {
            std::map<Index, Edge> seen;
            for (const auto& e : s.train.user_items(u)) seen[e.index] = e;
            for (const auto& e : s.test[u]) {
                ASSERT_FALSE(seen.count(e.index)) << "train/test overlap";
                seen[e.index] = e;
            }
            const auto full = d.user_items(u);
            ASSERT_EQ(seen.size(), full.size());
            for (const auto& e : full) ASSERT_EQ(seen.at(e.index), e);
            EXPECT_EQ(s.test[u].size(), holdout_count(full.size(), 0.2));
            if (kind == SplitKind::temporal && !s.test[u].empty()) {
                std::int64_t max_train = std::numeric_limits<std::int64_t>::min();
                std::int64_t min_test = std::numeric_limits<std::int64_t>::max();
                for (const auto& e : s.train.user_items(u)) max_train = std::max(max_train, *e.timestamp);
                for (const auto& e : s.test[u]) min_test = std::min(min_test, *e.timestamp);
                EXPECT_LE(max_train, min_test);
            }
        }
    }
}

TEST(HoldoutSplit, RandomModeIsSeeded) {
    const auto d = build_dataset(fixtures::synthetic_records({.users = 60, .timestamps = false, .seed = 2}));
    const auto a = holdout_split(d, {SplitKind::random, 0.3, 5});
    const auto b = holdout_split(d, {SplitKind::random, 0.3, 5});
    const auto c = holdout_split(d, {SplitKind::random, 0.3, 6});
    EXPECT_EQ(a.test, b.test);
    EXPECT_NE(a.test, c.test);
}

TEST(PrecisionAtN, Basics) {
    std::vector<std::vector<Edge>> test{
        test_row({{0, 9}, {1, 9}, {2, 9}, {3, 9}, {4, 9}, {5, 9}, {6, 9}, {7, 9}, {8, 9}, {9, 9}}),
        test_row({{0, 9}, {1, 9}, {2, 9}}),
        test_row({{3, 2}}), // nothing relevant at threshold 8
        test_row({{4, 10}}),
    };
    std::vector<RecommendationList> lists{
        list_of(0, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}),
        list_of(1, {0, 10, 1, 11, 2, 12, 13, 14, 15, 16}),
        list_of(2, {3}),
        list_of(3, {}),
    };
    const auto p = precision_at_n(lists, test, 8.0, 10);
    ASSERT_EQ(p.per_user.size(), 3u);
    EXPECT_EQ(p.per_user[0], (UserPrecision{0, 1.0}));
    EXPECT_EQ(p.per_user[1], (UserPrecision{1, 0.3}));
    EXPECT_EQ(p.per_user[2], (UserPrecision{3, 0.0}));
    EXPECT_DOUBLE_EQ(*p.mean, (1.0 + 0.3 + 0.0) / 3);

    // threshold 0 makes every test item relevant
    EXPECT_EQ(precision_at_n(lists, test, 0.0, 10).per_user.size(), 4u);
}

TEST(PrecisionAtN, NoEvaluableUsersLeavesMeanUnset) {
    std::vector<std::vector<Edge>> test{test_row({{0, 1}})};
    std::vector<RecommendationList> lists{list_of(0, {0})};
    const auto p = precision_at_n(lists, test, 5.0, 10);
    EXPECT_FALSE(p.mean.has_value());
    EXPECT_TRUE(p.per_user.empty());
}

TEST(PrecisionAtN, OracleRecommenderHitsMinOfRelevantAndN) {
    std::vector<std::vector<Edge>> test{test_row({{1, 5}, {2, 5}, {3, 5}}), test_row({})};
    for (Index i = 0; i < 14; ++i) test[1].push_back({i, 5, std::nullopt});
    std::vector<RecommendationList> lists{list_of(0, {1, 2, 3}), list_of(1, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9})};
    const auto p = precision_at_n(lists, test, 0.0, 10);
    EXPECT_DOUBLE_EQ(p.per_user[0].precision, 0.3);
    EXPECT_DOUBLE_EQ(p.per_user[1].precision, 1.0);
}

TEST(DiversityAtN, UnionNotSum) {
    std::vector<RecommendationList> one{list_of(0, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9})};
    EXPECT_EQ(diversity_at_n(one), 10u);
    std::vector<RecommendationList> two{list_of(0, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}),
                                        list_of(1, {9, 8, 7, 6, 5, 4, 3, 2, 1, 0})};
    EXPECT_EQ(diversity_at_n(two), 10u);
    EXPECT_EQ(diversity_at_n(std::vector<RecommendationList>{}), 0u);
}

// Metrics against an independent recount from the token-level dump.
TEST(Metrics, RecountFromDump) {
    const auto d = build_dataset(fixtures::synthetic_records({.users = 50, .items = 40, .max_profile = 15, .seed = 17}));
    const auto split = holdout_split(d, {});
    EvalConfig cfg;
    cfg.k = 10;
    cfg.threshold = 6;
    const auto lists = recommend_for_split(split, cfg, make_preset("AAJ", 0.4));
    std::ostringstream dump;
    write_recommendations(dump, lists, d);

    std::map<std::string, std::set<std::string>> recommended;
    std::set<std::string> distinct;
    std::istringstream in(dump.str());
    std::string user, item, rank, score;
    while (in >> user >> item >> rank >> score) {
        recommended[user].insert(item);
        distinct.insert(item);
    }
    EXPECT_EQ(diversity_at_n(lists), distinct.size());

    double sum = 0;
    std::size_t users = 0;
    for (Index u = 0; u < d.n_users(); ++u) {
        std::set<std::string> relevant;
        for (const auto& e : split.test[u])
            if (e.rating >= 6) relevant.insert(d.item_token(e.index));
        if (relevant.empty()) continue;
        std::size_t hits = 0;
        for (const auto& it : recommended[d.user_token(u)]) hits += relevant.count(it);
        sum += double(hits) / 10.0;
        ++users;
    }
    const auto p = precision_at_n(lists, split.test, 6, 10);
    EXPECT_EQ(p.per_user.size(), users);
    EXPECT_NEAR(*p.mean, sum / double(users), 1e-12);
    EXPECT_LE(diversity_at_n(lists), std::min(d.n_items(), 10 * d.n_users()));
}

TEST(LambdaSweep, CellCountsAndBestMarker) {
    const auto d = build_dataset(fixtures::synthetic_records({.users = 80, .items = 50, .max_profile = 15, .seed = 23}));
    const auto split = holdout_split(d, {});
    EvalConfig cfg;
    cfg.k = 15;
    const std::vector<double> grid{0.2, 0.4, 0.6, 0.8};
    const std::vector<std::string> presets{"js", "AAJ"};
    const auto sweep = lambda_sweep(split, cfg, presets, grid);
    ASSERT_EQ(sweep.reports.size(), 5u);
    EXPECT_EQ(sweep.reports[0].preset, "JS");
    EXPECT_FALSE(sweep.reports[0].lambda.has_value());
    EXPECT_TRUE(sweep.reports[0].best);

    std::size_t best = 0;
    const EvalReport* best_report = nullptr;
    for (std::size_t r = 1; r < 5; ++r) {
        EXPECT_EQ(sweep.reports[r].lambda, grid[r - 1]);
        if (sweep.reports[r].best) {
            ++best;
            best_report = &sweep.reports[r];
        }
    }
    ASSERT_EQ(best, 1u);
    for (std::size_t r = 1; r < 5; ++r) {
        const auto& rep = sweep.reports[r];
        EXPECT_LE(*rep.precision, *best_report->precision);
        if (*rep.precision == *best_report->precision) {
            EXPECT_GE(*rep.lambda, *best_report->lambda);
        }
        EXPECT_FALSE(rep.significance.has_value());
    }
}

TEST(LambdaSweep, TiesPickSmallestLambda) {
    // one user, no overlap anywhere: every cell scores 0
    std::vector<InteractionRecord> r{{"u", "a", 1, 1}, {"u", "b", 1, 2}, {"v", "c", 1, 3}, {"v", "d", 1, 4}};
    const auto split = holdout_split(build_dataset(r), {});
    const std::vector<double> grid{0.8, 0.2, 0.6};
    const std::vector<std::string> presets{"S-AAS"};
    const auto sweep = lambda_sweep(split, EvalConfig{}, presets, grid);
    for (const auto& rep : sweep.reports) {
        EXPECT_EQ(rep.best, rep.lambda == 0.2);
    }
}

TEST(LambdaSweep, BaselineGatesSignificance) {
    const auto d = build_dataset(fixtures::synthetic_records({.users = 80, .items = 50, .max_profile = 15, .seed = 29}));
    const auto split = holdout_split(d, {});
    EvalConfig cfg;
    cfg.k = 15;
    const std::vector<double> grid{0.2, 0.6};
    const std::vector<std::string> presets{"MAJ", "AAJ"};
    const auto sweep = lambda_sweep(split, cfg, presets, grid, std::string("js"));
    ASSERT_EQ(sweep.reports.size(), 4u); // MAJ, AAJ x2, JS appended
    EXPECT_EQ(sweep.reports.back().preset, "JS");
    EXPECT_FALSE(sweep.reports.back().significance.has_value());
    for (std::size_t r = 0; r < 3; ++r) {
        ASSERT_TRUE(sweep.reports[r].significance.has_value());
        EXPECT_EQ(sweep.reports[r].significance->baseline, "JS");
        const auto expect = paired_significance(sweep.reports[r].per_user, sweep.reports.back().per_user);
        EXPECT_EQ(sweep.reports[r].significance->test.p_value, expect.p_value);
    }
}

TEST(LambdaSweep, Errors) {
    const auto split = holdout_split(build_dataset(fixtures::synthetic_records({.users = 10})), {});
    const std::vector<std::string> presets{"AAJ"};
    EXPECT_THROW(lambda_sweep(split, EvalConfig{}, presets, std::vector<double>{}), ConfigError);
    EXPECT_THROW(lambda_sweep(split, EvalConfig{}, presets, std::vector<double>{1.5}), ConfigError);
    const std::vector<std::string> bad{"XYZ"};
    EXPECT_THROW(lambda_sweep(split, EvalConfig{}, bad, std::vector<double>{0.2}), ConfigError);
    EXPECT_THROW(evaluate_preset(split, EvalConfig{}, "AAJ"), ConfigError);
}

TEST(Report, JsonIsDeterministicAndTableHasOneRowPerCell) {
    const auto d = build_dataset(fixtures::synthetic_records({.users = 60, .items = 40, .seed = 31}));
    const auto split = holdout_split(d, {});
    const std::vector<std::string> presets{"JS", "S-AAJ"};
    const std::vector<double> grid{0.2, 0.4};
    EvalConfig one;
    one.workers = 1;
    EvalConfig four;
    four.workers = 4;
    ReportContext ctx;
    ctx.stats = dataset_stats(d);
    const auto a = sweep_to_json(lambda_sweep(split, one, presets, grid, std::string("JS")), ctx).dump();
    const auto b = sweep_to_json(lambda_sweep(split, four, presets, grid, std::string("JS")), ctx).dump();
    EXPECT_EQ(a, b);
    const auto doc = nlohmann::json::parse(a);
    EXPECT_EQ(doc["results"].size(), 3u);
    EXPECT_TRUE(doc["results"][0]["significance"].is_null());
    EXPECT_TRUE(doc["results"][1]["significance"].is_object());

    std::ostringstream table;
    write_sweep_table(table, lambda_sweep(split, one, presets, grid));
    std::size_t lines = 0;
    for (char ch : table.str()) lines += ch == '\n';
    EXPECT_EQ(lines, 2u + 3u);
}
