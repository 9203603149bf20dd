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

// Offline evaluation: per-user holdout split, Precision@N over the
// all-unrated-items candidate set, aggregate diversity, lambda sweeps and
// paired significance against a baseline measure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dissim/dataset.hpp"
#include "dissim/errors.hpp"
#include "dissim/neighbors.hpp"
#include "dissim/recommender.hpp"
#include "dissim/significance.hpp"
#include "dissim/similarity.hpp"

namespace dissim {

// ---------------------------------------------------------------------------
// Split
// ---------------------------------------------------------------------------

enum class SplitKind { temporal, random };

inline std::string_view to_string(SplitKind k) {
    return k == SplitKind::temporal ? "temporal" : "random";
}

struct SplitOptions {
    SplitKind kind = SplitKind::temporal;
    double test_fraction = 0.2;
    std::uint64_t seed = 42; ///< random mode only
};

struct SplitPair {
    Dataset train;
    std::vector<std::vector<Edge>> test; ///< per user, sorted by item index
    SplitOptions options;

    std::size_t n_test() const {
        std::size_t n = 0;
        for (const auto& row : test) {
            n += row.size();
        }
        return n;
    }
};

/// Number of a user's interactions held out: ceil(fraction · n), at most
/// n − 1 so the user keeps training data. Single-interaction users hold
/// nothing out.
inline std::size_t holdout_count(std::size_t n, double test_fraction) {
    if (n < 2) {
        return 0;
    }
    // slack absorbs products like 0.2 * 5 landing a ulp above an integer
    const auto m = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n) - 1e-9));
    return std::min(m, n - 1);
}

namespace detail {

/// Uniform draw in [0, bound) without modulo bias; mt19937_64 output is
/// fully specified, so splits are reproducible across standard libraries.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

} // namespace detail

/// Per-user holdout. Temporal mode puts each user's most recent
/// interactions (ties broken by item index) in the test set and requires a
/// timestamp on every interaction. Random mode shuffles each profile with a
/// generator seeded once from `options.seed` and walked in user order.
inline SplitPair holdout_split(const Dataset& d, const SplitOptions& options = {}) {
    if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0)) {
        throw ConfigError("--fraction must be in (0, 1), got " + std::to_string(options.test_fraction));
    }
    if (options.kind == SplitKind::temporal && !d.has_timestamps()) {
        throw DataError("temporal split needs a timestamp on every interaction; use --split random");
    }

    std::mt19937_64 rng(options.seed);
    std::vector<Interaction> train_edges;
    train_edges.reserve(d.n_transactions());
    std::vector<std::vector<Edge>> test(d.n_users());
    std::vector<Edge> order;

    for (Index u = 0; u < d.n_users(); ++u) {
        const auto row = d.user_items(u);
        order.assign(row.begin(), row.end());
        if (options.kind == SplitKind::temporal) {
            std::sort(order.begin(), order.end(), [](const Edge& a, const Edge& b) {
                return *a.timestamp < *b.timestamp || (*a.timestamp == *b.timestamp && a.index < b.index);
            });
        } else {
            for (std::size_t i = order.size(); i > 1; --i) {
                std::swap(order[i - 1], order[detail::bounded(rng, i)]);
            }
        }
        const std::size_t n_test = holdout_count(order.size(), options.test_fraction);
        const std::size_t n_train = order.size() - n_test;
        for (std::size_t p = 0; p < n_train; ++p) {
            train_edges.push_back({u, order[p].index, order[p].rating, order[p].timestamp});
        }
        test[u].assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
        std::sort(test[u].begin(), test[u].end(), [](const Edge& a, const Edge& b) { return a.index < b.index; });
    }
    return {Dataset(d.user_ids(), d.item_ids(), std::move(train_edges)), std::move(test), options};
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct UserPrecision {
    Index user = 0;
    double precision = 0.0;

    friend bool operator==(const UserPrecision&, const UserPrecision&) = default;
};

struct PrecisionResult {
    std::optional<double> mean; ///< unset when no user has a relevant test item
    std::vector<UserPrecision> per_user;
};

/// Per-user |top-N ∩ relevant| / N, averaged over users with at least one
/// relevant test item (rating ≥ threshold).
inline PrecisionResult precision_at_n(std::span<const RecommendationList> lists,
                                      std::span<const std::vector<Edge>> test, double threshold,
                                      std::size_t n) {
    if (n == 0) {
        throw ConfigError("top-N length must be at least 1");
    }
    std::vector<const RecommendationList*> by_user(test.size(), nullptr);
    for (const auto& list : lists) {
        if (list.user < by_user.size()) {
            by_user[list.user] = &list;
        }
    }

    PrecisionResult result;
    double sum = 0.0;
    std::vector<Index> relevant;
    for (Index u = 0; u < test.size(); ++u) {
        relevant.clear();
        for (const auto& e : test[u]) {
            if (e.rating >= threshold) {
                relevant.push_back(e.index);
            }
        }
        if (relevant.empty()) {
            continue;
        }
        std::size_t hits = 0;
        if (const auto* list = by_user[u]) {
            const std::size_t len = std::min(n, list->items.size());
            for (std::size_t r = 0; r < len; ++r) {
                hits += std::binary_search(relevant.begin(), relevant.end(), list->items[r].item);
            }
        }
        const double p = static_cast<double>(hits) / static_cast<double>(n);
        result.per_user.push_back({u, p});
        sum += p;
    }
    if (!result.per_user.empty()) {
        result.mean = sum / static_cast<double>(result.per_user.size());
    }
    return result;
}

/// Number of distinct items across all lists.
inline std::size_t diversity_at_n(std::span<const RecommendationList> lists) {
    std::unordered_set<Index> items;
    for (const auto& list : lists) {
        for (const auto& s : list.items) {
            items.insert(s.item);
        }
    }
    return items.size();
}

/// Paired t-test on per-user precisions, restricted to users present in
/// both vectors.
inline PairedTestResult paired_significance(std::span<const UserPrecision> a, std::span<const UserPrecision> b,
                                            double alpha = 0.05) {
    std::vector<double> xa, xb;
    std::vector<UserPrecision> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    auto by_user = [](const UserPrecision& x, const UserPrecision& y) { return x.user < y.user; };
    std::sort(sa.begin(), sa.end(), by_user);
    std::sort(sb.begin(), sb.end(), by_user);
    auto ib = sb.begin();
    for (const auto& x : sa) {
        while (ib != sb.end() && ib->user < x.user) {
            ++ib;
        }
        if (ib != sb.end() && ib->user == x.user) {
            xa.push_back(x.precision);
            xb.push_back(ib->precision);
        }
    }
    return paired_t_test(xa, xb, alpha);
}

// ---------------------------------------------------------------------------
// Experiment cells
// ---------------------------------------------------------------------------

struct EvalConfig {
    Axis scheme = Axis::user;
    std::size_t k = 80;
    std::size_t top_n = 10;
    double threshold = 0.0;
    std::size_t workers = 0;
    Composition composition = Composition::canonical;
    double alpha = 0.05;
};

inline std::string_view scheme_name(Axis scheme) {
    return scheme == Axis::user ? "user-knn" : "item-knn";
}

struct SignificanceOutcome {
    std::string baseline;
    std::optional<double> baseline_lambda;
    PairedTestResult test;
};

struct EvalReport {
    std::string preset;
    MeasureSpec spec;
    std::optional<double> lambda;
    std::optional<double> precision;
    std::vector<UserPrecision> per_user;
    std::size_t diversity = 0;
    std::size_t n_evaluated_users = 0;
    bool best = false;
    std::optional<SignificanceOutcome> significance;
};

/// Recommendations for one preset on a split, as produced inside
/// `evaluate_preset`; exposed for dumps.
inline std::vector<RecommendationList> recommend_for_split(const SplitPair& split, const EvalConfig& config,
                                                           const MeasureSpec& spec) {
    const auto model = build_neighbor_model(split.train, config.scheme, config.k, spec, config.workers);
    return recommend_all(model, split.train, config.top_n, config.workers);
}

inline EvalReport evaluate_preset(const SplitPair& split, const EvalConfig& config, std::string_view preset,
                                  std::optional<double> lambda = std::nullopt) {
    const PresetInfo& info = find_preset(preset);
    const bool additive = info.adjustment == Adjustment::additive;
    if (additive && !lambda) {
        throw ConfigError("preset " + std::string(info.name) + " needs a lambda");
    }
    EvalReport report;
    report.preset = std::string(info.name);
    report.spec = make_preset(info.name, lambda.value_or(0.0), config.composition);
    if (additive) {
        report.lambda = lambda;
    }
    const auto lists = recommend_for_split(split, config, report.spec);
    auto prec = precision_at_n(lists, split.test, config.threshold, config.top_n);
    report.precision = prec.mean;
    report.n_evaluated_users = prec.per_user.size();
    report.per_user = std::move(prec.per_user);
    report.diversity = diversity_at_n(lists);
    return report;
}

struct SweepResult {
    EvalConfig config;
    std::vector<double> lambda_grid;
    std::optional<std::string> baseline;
    std::vector<EvalReport> reports;
};

/// Evaluates every (preset, λ) cell: additive presets once per grid value,
/// all others once. Marks each preset's best cell by P@N, smaller λ on
/// ties. With a baseline, that preset is evaluated too (if not requested)
/// and every other cell is tested against the baseline's best cell.
inline SweepResult lambda_sweep(const SplitPair& split, const EvalConfig& config,
                                std::span<const std::string> presets, std::span<const double> grid,
                                std::optional<std::string> baseline = std::nullopt) {
    if (grid.empty()) {
        throw ConfigError("--lambda grid must not be empty");
    }
    for (double l : grid) {
        if (!(l > 0.0 && l <= 1.0)) {
            throw ConfigError("--lambda values must be in (0, 1], got " + std::to_string(l));
        }
    }
    if (presets.empty()) {
        throw ConfigError("--preset list must not be empty");
    }

    std::vector<std::string> names;
    for (const auto& p : presets) {
        std::string canonical(find_preset(p).name);
        if (std::find(names.begin(), names.end(), canonical) == names.end()) {
            names.push_back(std::move(canonical));
        }
    }
    if (baseline) {
        baseline = std::string(find_preset(*baseline).name);
        if (std::find(names.begin(), names.end(), *baseline) == names.end()) {
            names.push_back(*baseline);
        }
    }

    SweepResult sweep{config, std::vector<double>(grid.begin(), grid.end()), baseline, {}};
    for (const auto& name : names) {
        const std::size_t first = sweep.reports.size();
        if (uses_lambda(name)) {
            for (double l : grid) {
                sweep.reports.push_back(evaluate_preset(split, config, name, l));
            }
        } else {
            sweep.reports.push_back(evaluate_preset(split, config, name));
        }
        std::size_t best = first;
        const auto score = [](const EvalReport& r) {
            return r.precision.value_or(-std::numeric_limits<double>::infinity());
        };
        for (std::size_t r = first + 1; r < sweep.reports.size(); ++r) {
            const auto& cand = sweep.reports[r];
            const auto& cur = sweep.reports[best];
            if (score(cand) > score(cur) ||
                (score(cand) == score(cur) && cand.lambda.value_or(0.0) < cur.lambda.value_or(0.0))) {
                best = r;
            }
        }
        sweep.reports[best].best = true;
    }

    if (baseline) {
        const auto ref = std::find_if(sweep.reports.begin(), sweep.reports.end(),
                                      [&](const EvalReport& r) { return r.preset == *baseline && r.best; });
        for (auto& r : sweep.reports) {
            if (r.preset == *baseline) {
                continue;
            }
            try {
                r.significance = SignificanceOutcome{
                    *baseline, ref->lambda, paired_significance(r.per_user, ref->per_user, config.alpha)};
            } catch (const InsufficientDataError&) {
                // fewer than two shared users: nothing to test
            }
        }
    }
    return sweep;
}

} // namespace dissim
