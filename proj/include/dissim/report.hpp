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

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dissim/dataset.hpp"
#include "dissim/evaluation.hpp"

namespace dissim {

inline nlohmann::ordered_json stats_to_json(const DatasetStats& s) {
    nlohmann::ordered_json j;
    j["users"] = s.n_users;
    j["items"] = s.n_items;
    j["transactions"] = s.n_transactions;
    j["sparsity"] = s.sparsity;
    return j;
}

inline void write_stats_table(std::ostream& out, const DatasetStats& s, const std::string& name = "dataset") {
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %10s %10s %14s %10s\n", "Dataset", "#Users", "#Items",
                  "#Transactions", "Sparsity");
    out << line;
    std::snprintf(line, sizeof line, "%-16s %10zu %10zu %14zu %10s\n", name.c_str(), s.n_users, s.n_items,
                  s.n_transactions, format_sparsity(s.sparsity).c_str());
    out << line;
}

namespace detail {

inline nlohmann::ordered_json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

// JSON has no infinities; a degenerate t statistic is written as a string
inline nlohmann::ordered_json statistic_json(double t) {
    if (std::isinf(t)) {
        return t > 0 ? "inf" : "-inf";
    }
    return t;
}

} // namespace detail

struct ReportContext {
    std::string input;
    SplitOptions split;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    DatasetStats stats;
    bool per_user = false; ///< include per-user precision vectors
};

inline nlohmann::ordered_json sweep_to_json(const SweepResult& sweep, const ReportContext& ctx) {
    using json = nlohmann::ordered_json;
    const auto& c = sweep.config;
    json cfg;
    cfg["input"] = ctx.input;
    cfg["scheme"] = scheme_name(c.scheme);
    cfg["k"] = c.k;
    cfg["top_n"] = c.top_n;
    cfg["threshold"] = c.threshold;
    cfg["split"] = to_string(ctx.split.kind);
    cfg["fraction"] = ctx.split.test_fraction;
    cfg["seed"] = ctx.split.seed;
    cfg["lambda_grid"] = sweep.lambda_grid;
    cfg["literal_tables"] = c.composition == Composition::literal_tables;
    cfg["baseline"] = sweep.baseline ? json(*sweep.baseline) : json(nullptr);
    cfg["alpha"] = c.alpha;

    json data = stats_to_json(ctx.stats);
    data["train"] = ctx.n_train;
    data["test"] = ctx.n_test;

    json results = json::array();
    for (const auto& r : sweep.reports) {
        json row;
        row["preset"] = r.preset;
        row["family"] = to_string(r.spec.family);
        row["adjustment"] = to_string(r.spec.adjustment);
        row["dissimilarity"] = to_string(r.spec.symmetry);
        row["lambda"] = detail::optional_number(r.lambda);
        row["precision"] = detail::optional_number(r.precision);
        row["diversity"] = r.diversity;
        row["evaluated_users"] = r.n_evaluated_users;
        row["best"] = r.best;
        if (r.significance) {
            const auto& s = *r.significance;
            json sig;
            sig["baseline"] = s.baseline;
            sig["baseline_lambda"] = detail::optional_number(s.baseline_lambda);
            sig["n"] = s.test.n;
            sig["mean_difference"] = s.test.mean_difference;
            sig["t"] = detail::statistic_json(s.test.statistic);
            sig["p"] = s.test.p_value;
            sig["significant"] = s.test.significant;
            row["significance"] = sig;
        } else {
            row["significance"] = nullptr;
        }
        if (ctx.per_user) {
            json users = json::array();
            for (const auto& up : r.per_user) {
                users.push_back(json::array({up.user, up.precision}));
            }
            row["per_user_precision"] = users;
        }
        results.push_back(std::move(row));
    }

    json doc;
    doc["config"] = cfg;
    doc["dataset"] = data;
    doc["results"] = results;
    return doc;
}

/// One row per cell: preset, λ, P@N, D@N, evaluated users, best marker and
/// significance marker ("*" significant, "-" not, blank untested).
inline void write_sweep_table(std::ostream& out, const SweepResult& sweep) {
    char line[256];
    const std::string p_col = "P@" + std::to_string(sweep.config.top_n);
    const std::string d_col = "D@" + std::to_string(sweep.config.top_n);
    out << "scheme: " << scheme_name(sweep.config.scheme) << "  k=" << sweep.config.k;
    if (sweep.baseline) {
        out << "  baseline=" << *sweep.baseline;
    }
    out << '\n';
    std::snprintf(line, sizeof line, "%-8s %6s %10s %8s %8s %5s %4s %10s\n", "preset", "lambda", p_col.c_str(),
                  d_col.c_str(), "users", "best", "sig", "p");
    out << line;
    for (const auto& r : sweep.reports) {
        char lambda[16] = "-";
        if (r.lambda) {
            std::snprintf(lambda, sizeof lambda, "%.2f", *r.lambda);
        }
        char precision[32] = "n/a";
        if (r.precision) {
            std::snprintf(precision, sizeof precision, "%.4f", *r.precision);
        }
        const char* sig = "";
        char p[32] = "";
        if (r.significance) {
            sig = r.significance->test.significant ? "*" : "-";
            std::snprintf(p, sizeof p, "%.4g", r.significance->test.p_value);
        }
        std::snprintf(line, sizeof line, "%-8s %6s %10s %8zu %8zu %5s %4s %10s\n", r.preset.c_str(), lambda,
                      precision, r.diversity, r.n_evaluated_users, r.best ? "best" : "", sig, p);
        out << line;
    }
}

} // namespace dissim
