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
// dissim: command-line driver for the neighborhood recommender toolkit.
//
//   dissim stats     --input ratings.tsv
//   dissim split     --input ratings.tsv --out splits/
//   dissim simmat    --input ratings.tsv --preset MAJ --k 80
//   dissim recommend --input ratings.tsv --preset AAJ --lambda 0.4 --top-n 10
//   dissim evaluate  --input ratings.tsv --preset JS,AAJ --baseline JS
//   dissim sweep     --input ratings.tsv --scheme item-knn --out results/
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 1 anything else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dissim/dissim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct RunConfig {
    std::string input;
    std::string format = "tsv:user,item,rating,timestamp";
    bool header = false;
    bool strict = false;
    std::string scheme = "user-knn";
    std::vector<std::string> presets{"JS"};
    std::size_t k = 80;
    std::size_t top_n = 10;
    std::vector<double> lambda_grid{0.2, 0.4, 0.6, 0.8};
    double threshold = 0.0;
    std::string split = "temporal";
    double fraction = 0.2;
    std::uint64_t seed = 42;
    std::string out;
    std::string baseline;
    bool literal_tables = false;
    std::size_t min_interactions = 0;
    std::size_t workers = 0;
    bool json = false;
    bool per_user = false;
};

dissim::Axis parse_scheme(const std::string& s) {
    if (s == "user-knn" || s == "user") return dissim::Axis::user;
    if (s == "item-knn" || s == "item") return dissim::Axis::item;
    throw dissim::ConfigError("--scheme must be user-knn or item-knn, got '" + s + "'");
}

dissim::SplitOptions split_options(const RunConfig& cfg) {
    dissim::SplitOptions opts;
    if (cfg.split == "temporal") {
        opts.kind = dissim::SplitKind::temporal;
    } else if (cfg.split == "random") {
        opts.kind = dissim::SplitKind::random;
    } else {
        throw dissim::ConfigError("--split must be temporal or random, got '" + cfg.split + "'");
    }
    if (!(cfg.fraction > 0.0 && cfg.fraction < 1.0)) {
        throw dissim::ConfigError("--fraction must be in (0, 1)");
    }
    opts.test_fraction = cfg.fraction;
    opts.seed = cfg.seed;
    return opts;
}

dissim::EvalConfig eval_config(const RunConfig& cfg) {
    dissim::EvalConfig c;
    c.scheme = parse_scheme(cfg.scheme);
    if (cfg.k == 0) throw dissim::ConfigError("--k must be at least 1");
    if (cfg.top_n == 0) throw dissim::ConfigError("--top-n must be at least 1");
    c.k = cfg.k;
    c.top_n = cfg.top_n;
    c.threshold = cfg.threshold;
    c.workers = cfg.workers;
    c.composition = cfg.literal_tables ? dissim::Composition::literal_tables : dissim::Composition::canonical;
    return c;
}

dissim::Dataset load(const RunConfig& cfg) {
    if (cfg.input.empty()) {
        throw dissim::ConfigError("--input is required");
    }
    const auto fmt = dissim::ColumnFormat::parse(cfg.format, cfg.header);
    auto parsed = dissim::load_interactions(cfg.input, fmt);
    if (!parsed.errors.empty()) {
        std::cerr << cfg.input << ": " << parsed.errors.size() << " malformed line(s) skipped\n";
        std::size_t shown = 0;
        for (const auto& e : parsed.errors) {
            if (++shown > 10) {
                std::cerr << "  ...\n";
                break;
            }
            std::cerr << "  line " << e.line << ": " << e.message << '\n';
        }
        if (cfg.strict) {
            throw dissim::DataError("malformed input lines (--strict)");
        }
    }
    auto d = dissim::build_dataset(parsed.records);
    if (cfg.min_interactions > 1) {
        d = dissim::filter_min_interactions(d, cfg.min_interactions);
    }
    return d;
}

std::optional<std::string> baseline_of(const RunConfig& cfg) {
    if (cfg.baseline.empty()) return std::nullopt;
    return cfg.baseline;
}

/// Output stream for an artifact: a file under --out, or stdout.
class Sink {
public:
    Sink(const RunConfig& cfg, const std::string& filename) {
        if (!cfg.out.empty()) {
            fs::create_directories(cfg.out);
            path_ = (fs::path(cfg.out) / filename).string();
            file_.open(path_);
            if (!file_) throw dissim::IoError("cannot write '" + path_ + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream file_;
};

int cmd_stats(const RunConfig& cfg) {
    const auto d = load(cfg);
    const auto stats = dissim::dataset_stats(d);
    if (cfg.json) {
        std::cout << dissim::stats_to_json(stats).dump(2) << '\n';
    } else {
        dissim::write_stats_table(std::cout, stats, fs::path(cfg.input).filename().string());
    }
    if (!cfg.out.empty()) {
        Sink sink(cfg, "stats.json");
        sink.stream() << dissim::stats_to_json(stats).dump(2) << '\n';
    }
    return 0;
}

void write_split_rows(std::ostream& out, const dissim::Dataset& d, dissim::Index u,
                      std::span<const dissim::Edge> rows) {
    for (const auto& e : rows) {
        out << d.user_token(u) << '\t' << d.item_token(e.index) << '\t' << e.rating << '\t';
        if (e.timestamp) out << *e.timestamp;
        out << '\n';
    }
}

int cmd_split(const RunConfig& cfg) {
    if (cfg.out.empty()) throw dissim::ConfigError("--out is required for split");
    const auto d = load(cfg);
    const auto split = dissim::holdout_split(d, split_options(cfg));
    Sink train(cfg, "train.tsv");
    Sink test(cfg, "test.tsv");
    for (dissim::Index u = 0; u < d.n_users(); ++u) {
        write_split_rows(train.stream(), d, u, split.train.user_items(u));
        write_split_rows(test.stream(), d, u, split.test[u]);
    }
    std::cout << "train " << split.train.n_transactions() << " -> " << train.path() << '\n'
              << "test  " << split.n_test() << " -> " << test.path() << '\n';
    return 0;
}

void check_preset(const std::string& flag, const std::string& name) {
    try {
        dissim::find_preset(name);
    } catch (const dissim::ConfigError& e) {
        throw dissim::ConfigError(flag + ": " + e.what());
    }
}

dissim::MeasureSpec single_spec(const RunConfig& cfg) {
    if (cfg.presets.size() != 1) throw dissim::ConfigError("--preset takes exactly one name here");
    if (cfg.lambda_grid.empty()) throw dissim::ConfigError("--lambda must not be empty");
    check_preset("--preset", cfg.presets.front());
    return dissim::make_preset(cfg.presets.front(), cfg.lambda_grid.front(), eval_config(cfg).composition);
}

int cmd_simmat(const RunConfig& cfg) {
    const auto spec = single_spec(cfg);
    const auto ec = eval_config(cfg);
    const auto d = load(cfg);
    const auto model = dissim::build_neighbor_model(d, ec.scheme, ec.k, spec, ec.workers);
    Sink sink(cfg, "similarities.tsv");
    dissim::write_similarity_dump(sink.stream(), model, d);
    return 0;
}

int cmd_recommend(const RunConfig& cfg) {
    const auto spec = single_spec(cfg);
    const auto ec = eval_config(cfg);
    const auto d = load(cfg);
    const auto model = dissim::build_neighbor_model(d, ec.scheme, ec.k, spec, ec.workers);
    const auto lists = dissim::recommend_all(model, d, ec.top_n, ec.workers);
    Sink sink(cfg, "recommendations.tsv");
    dissim::write_recommendations(sink.stream(), lists, d);
    return 0;
}

int run_sweep(const RunConfig& cfg, const std::vector<std::string>& presets) {
    const auto ec = eval_config(cfg);
    const auto opts = split_options(cfg);
    for (const auto& p : presets) check_preset("--preset", p);
    if (auto b = baseline_of(cfg)) check_preset("--baseline", *b);

    const auto d = load(cfg);
    const auto split = dissim::holdout_split(d, opts);
    const auto sweep = dissim::lambda_sweep(split, ec, presets, cfg.lambda_grid, baseline_of(cfg));

    dissim::ReportContext ctx;
    ctx.input = fs::path(cfg.input).filename().string();
    ctx.split = opts;
    ctx.n_train = split.train.n_transactions();
    ctx.n_test = split.n_test();
    ctx.stats = dissim::dataset_stats(d);
    ctx.per_user = cfg.per_user;
    const auto doc = dissim::sweep_to_json(sweep, ctx);

    if (cfg.json) {
        std::cout << doc.dump(2) << '\n';
    } else {
        dissim::write_sweep_table(std::cout, sweep);
    }
    if (!cfg.out.empty()) {
        Sink json(cfg, "report.json");
        json.stream() << doc.dump(2) << '\n';
        Sink table(cfg, "report.txt");
        dissim::write_sweep_table(table.stream(), sweep);
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    std::vector<std::string> all;
    for (const auto& p : dissim::kPresets) all.emplace_back(p.name);
    return run_sweep(cfg, all);
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Neighborhood top-N recommender with dissimilarity-adjusted similarities"};
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--input", cfg.input, "interaction file");
    app.add_option("--format", cfg.format,
                   "delimiter and columns, e.g. tsv:user,item,rating,timestamp or csv:user,item,skip")
        ->capture_default_str();
    app.add_flag("--header", cfg.header, "skip the first line");
    app.add_flag("--strict", cfg.strict, "fail on any malformed line");
    app.add_option("--scheme", cfg.scheme, "user-knn or item-knn")->capture_default_str();
    app.add_option("--preset", cfg.presets, "measure preset(s), comma separated")->delimiter(',');
    app.add_option("--k", cfg.k, "neighborhood size")->capture_default_str();
    app.add_option("--top-n", cfg.top_n, "recommendation list length")->capture_default_str();
    app.add_option("--lambda", cfg.lambda_grid, "lambda grid for additive presets")->delimiter(',');
    app.add_option("--threshold", cfg.threshold, "minimum test rating counted as relevant")
        ->capture_default_str();
    app.add_option("--split", cfg.split, "temporal or random")->capture_default_str();
    app.add_option("--fraction", cfg.fraction, "per-user test fraction")->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for the random split")->capture_default_str();
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--baseline", cfg.baseline, "preset to test significance against");
    app.add_flag("--literal-tables", cfg.literal_tables,
                 "use the printed table compositions for MAS, MAAJ, S-MAS, S-MAAJ");
    app.add_option("--min-interactions", cfg.min_interactions, "drop users with fewer interactions");
    app.add_option("--workers", cfg.workers, "worker threads, 0 = all cores")->capture_default_str();
    app.add_flag("--json", cfg.json, "print JSON instead of a table");
    app.add_flag("--per-user", cfg.per_user, "include per-user precision in the JSON report");

    int (*handler)(const RunConfig&) = nullptr;
    auto sub = [&](const char* name, const char* help, int (*fn)(const RunConfig&)) {
        app.add_subcommand(name, help)->callback([&handler, fn] { handler = fn; });
    };
    sub("stats", "dataset statistics", cmd_stats);
    sub("split", "write the train/test holdout split", cmd_split);
    sub("simmat", "dump neighbor similarities", cmd_simmat);
    sub("recommend", "top-N lists for every user from the full data", cmd_recommend);
    sub("evaluate", "evaluate the given presets over the lambda grid", [](const RunConfig& c) {
        return run_sweep(c, c.presets);
    });
    sub("sweep", "evaluate all 16 presets", cmd_sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        return handler(cfg);
    } catch (const dissim::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dissim::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
