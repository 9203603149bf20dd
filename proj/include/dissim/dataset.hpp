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
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dissim/errors.hpp"

namespace dissim {

using Index = std::uint32_t;

/// Which side of the interaction matrix a neighborhood is computed over.
/// `item`: entities are items and their sets are U(i).
/// `user`: entities are users and their sets are I(u).
enum class Axis { item, user };

inline std::string_view to_string(Axis axis) {
    return axis == Axis::item ? "item" : "user";
}

struct InteractionRecord {
    std::string user;
    std::string item;
    double rating = 1.0;
    std::optional<std::int64_t> timestamp;
};

/// One adjacency entry. In a user row `index` is an item, in an item row a user.
struct Edge {
    Index index = 0;
    double rating = 0.0;
    std::optional<std::int64_t> timestamp;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

enum class Column { user, item, rating, timestamp, skip };

/// Delimiter plus column order, e.g. "tsv:user,item,rating,timestamp" or
/// "csv:user,skip,item". Delimiter names: tsv/tab, csv/comma, or any single
/// literal character. A missing rating column defaults every rating to 1.
struct ColumnFormat {
    char delimiter = '\t';
    std::vector<Column> columns{Column::user, Column::item, Column::rating, Column::timestamp};
    bool header = false;

    static ColumnFormat parse(std::string_view descriptor, bool header = false) {
        ColumnFormat fmt;
        fmt.header = header;
        const auto colon = descriptor.find(':');
        const std::string_view delim = descriptor.substr(0, colon);
        if (delim == "tsv" || delim == "tab" || delim == "\\t") {
            fmt.delimiter = '\t';
        } else if (delim == "csv" || delim == "comma") {
            fmt.delimiter = ',';
        } else if (delim == "space") {
            fmt.delimiter = ' ';
        } else if (delim.size() == 1) {
            fmt.delimiter = delim.front();
        } else {
            throw ConfigError("--format: unknown delimiter '" + std::string(delim) + "'");
        }
        if (colon == std::string_view::npos) {
            return fmt;
        }

        fmt.columns.clear();
        bool has_user = false, has_item = false;
        std::string_view rest = descriptor.substr(colon + 1);
        while (true) {
            const auto comma = rest.find(',');
            const std::string_view name = rest.substr(0, comma);
            Column col;
            if (name == "user") {
                col = Column::user;
            } else if (name == "item") {
                col = Column::item;
            } else if (name == "rating") {
                col = Column::rating;
            } else if (name == "timestamp" || name == "time") {
                col = Column::timestamp;
            } else if (name == "skip" || name == "_") {
                col = Column::skip;
            } else {
                throw ConfigError("--format: unknown column '" + std::string(name) + "'");
            }
            if (col != Column::skip &&
                std::find(fmt.columns.begin(), fmt.columns.end(), col) != fmt.columns.end()) {
                throw ConfigError("--format: duplicate column '" + std::string(name) + "'");
            }
            has_user |= col == Column::user;
            has_item |= col == Column::item;
            fmt.columns.push_back(col);
            if (comma == std::string_view::npos) {
                break;
            }
            rest = rest.substr(comma + 1);
        }
        if (!has_user || !has_item) {
            throw ConfigError("--format: descriptor must name both user and item columns");
        }
        return fmt;
    }

    bool has(Column c) const {
        return std::find(columns.begin(), columns.end(), c) != columns.end();
    }
};

struct LineError {
    std::size_t line = 0; // 1-based
    std::string message;
};

struct ParseResult {
    std::vector<InteractionRecord> records;
    std::vector<LineError> errors;
    std::size_t lines_read = 0;
};

namespace detail {

inline std::optional<double> parse_real(std::string_view s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return v;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

/// Parses one data line; returns an error message on failure.
inline std::optional<std::string> parse_line(std::string_view line, const ColumnFormat& fmt,
                                             InteractionRecord& out) {
    out = InteractionRecord{};
    std::size_t col = 0;
    std::size_t pos = 0;
    while (col < fmt.columns.size()) {
        if (pos > line.size()) {
            return "expected " + std::to_string(fmt.columns.size()) + " fields, got " +
                   std::to_string(col);
        }
        auto next = line.find(fmt.delimiter, pos);
        if (next == std::string_view::npos) {
            next = line.size();
        }
        // a space delimiter collapses runs of blanks
        const std::string_view field =
            fmt.delimiter == ' ' ? line.substr(pos, next - pos) : trim(line.substr(pos, next - pos));
        pos = next + 1;
        if (fmt.delimiter == ' ' && field.empty()) {
            continue;
        }
        switch (fmt.columns[col]) {
        case Column::user:
            if (field.empty()) {
                return std::string("empty user id");
            }
            out.user.assign(field);
            break;
        case Column::item:
            if (field.empty()) {
                return std::string("empty item id");
            }
            out.item.assign(field);
            break;
        case Column::rating: {
            auto r = parse_real(field);
            if (!r) {
                return "non-numeric rating '" + std::string(field) + "'";
            }
            if (!std::isfinite(*r) || *r < 0.0) {
                return "rating must be finite and non-negative, got '" + std::string(field) + "'";
            }
            out.rating = *r;
            break;
        }
        case Column::timestamp: {
            if (field.empty()) {
                break; // optional
            }
            auto t = parse_int(field);
            if (!t) {
                return "non-integer timestamp '" + std::string(field) + "'";
            }
            out.timestamp = *t;
            break;
        }
        case Column::skip:
            break;
        }
        ++col;
    }
    return std::nullopt;
}

} // namespace detail

/// Reads one record per non-blank line, in file order. Malformed lines are
/// collected in `errors`; an input without a single valid record throws
/// EmptyInputError.
inline ParseResult parse_interactions(std::istream& in, const ColumnFormat& fmt) {
    if (!in) {
        throw IoError("input stream is not readable");
    }
    ParseResult result;
    std::string line;
    std::size_t lineno = 0;
    InteractionRecord rec;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && fmt.header) {
            continue;
        }
        std::string_view view = line;
        if (!view.empty() && view.back() == '\r') {
            view.remove_suffix(1);
        }
        if (detail::trim(view).empty()) {
            continue;
        }
        ++result.lines_read;
        if (auto err = detail::parse_line(view, fmt, rec)) {
            result.errors.push_back({lineno, std::move(*err)});
        } else {
            result.records.push_back(std::move(rec));
        }
    }
    if (in.bad()) {
        throw IoError("read error after line " + std::to_string(lineno));
    }
    if (result.records.empty()) {
        std::string msg = "empty input: no valid interaction records";
        if (!result.errors.empty()) {
            msg += " (" + std::to_string(result.errors.size()) + " malformed lines; first at line " +
                   std::to_string(result.errors.front().line) + ": " +
                   result.errors.front().message + ")";
        }
        throw EmptyInputError(msg);
    }
    return result;
}

inline ParseResult load_interactions(const std::string& path, const ColumnFormat& fmt) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return parse_interactions(in, fmt);
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

/// Dense-index interning of opaque string tokens, in first-seen order.
class IdMap {
public:
    Index intern(std::string_view token) {
        auto it = lookup_.find(std::string(token));
        if (it != lookup_.end()) {
            return it->second;
        }
        const auto idx = static_cast<Index>(tokens_.size());
        tokens_.emplace_back(token);
        lookup_.emplace(tokens_.back(), idx);
        return idx;
    }

    std::optional<Index> find(std::string_view token) const {
        auto it = lookup_.find(std::string(token));
        if (it == lookup_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    const std::string& token(Index idx) const {
        if (idx >= tokens_.size()) {
            throw IndexError("id index " + std::to_string(idx) + " out of range");
        }
        return tokens_[idx];
    }

    std::size_t size() const { return tokens_.size(); }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, Index> lookup_;
};

/// Compressed sparse rows: row r occupies entries[offsets[r], offsets[r+1]).
struct SparseRows {
    std::vector<std::size_t> offsets{0};
    std::vector<Edge> entries;

    std::size_t rows() const { return offsets.size() - 1; }

    std::span<const Edge> row(std::size_t r) const {
        return {entries.data() + offsets[r], entries.data() + offsets[r + 1]};
    }
};

/// A (user, item) edge with its payload, used to assemble datasets.
struct Interaction {
    Index user = 0;
    Index item = 0;
    double rating = 0.0;
    std::optional<std::int64_t> timestamp;
};

/// Immutable bipartite interaction graph with both adjacency directions,
/// each row sorted by index. Splits of one dataset share the id maps, so
/// indices mean the same thing in the full data, train and test.
class Dataset {
public:
    Dataset() : users_(std::make_shared<IdMap>()), items_(std::make_shared<IdMap>()) {}

    /// `edges` must not repeat a (user, item) pair.
    Dataset(std::shared_ptr<const IdMap> users, std::shared_ptr<const IdMap> items,
            std::vector<Interaction> edges)
        : users_(std::move(users)), items_(std::move(items)) {
        const std::size_t nu = users_->size();
        const std::size_t ni = items_->size();
        by_user_ = build_rows(nu, edges, [](const Interaction& e) { return e.user; },
                              [](const Interaction& e) { return e.item; });
        by_item_ = build_rows(ni, edges, [](const Interaction& e) { return e.item; },
                              [](const Interaction& e) { return e.user; });
        n_transactions_ = edges.size();
        has_timestamps_ = !edges.empty() && std::all_of(edges.begin(), edges.end(), [](const auto& e) {
            return e.timestamp.has_value();
        });
    }

    std::size_t n_users() const { return users_->size(); }
    std::size_t n_items() const { return items_->size(); }
    std::size_t n_transactions() const { return n_transactions_; }

    /// True when every edge carries a timestamp.
    bool has_timestamps() const { return has_timestamps_; }

    /// I(u): items of user `u`, sorted by item index.
    std::span<const Edge> user_items(Index u) const {
        check(u, n_users(), "user");
        return by_user_.row(u);
    }

    /// U(i): users of item `i`, sorted by user index.
    std::span<const Edge> item_users(Index i) const {
        check(i, n_items(), "item");
        return by_item_.row(i);
    }

    /// Number of entities on an axis.
    std::size_t size(Axis axis) const { return axis == Axis::item ? n_items() : n_users(); }

    /// The set an entity is described by: U(i) for items, I(u) for users.
    std::span<const Edge> profile(Axis axis, Index a) const {
        return axis == Axis::item ? item_users(a) : user_items(a);
    }

    /// Profile of an entity on the opposite axis.
    std::span<const Edge> transpose_profile(Axis axis, Index a) const {
        return axis == Axis::item ? user_items(a) : item_users(a);
    }

    bool contains(Index u, Index i) const {
        const auto row = user_items(u);
        auto it = std::lower_bound(row.begin(), row.end(), i,
                                   [](const Edge& e, Index v) { return e.index < v; });
        return it != row.end() && it->index == i;
    }

    const std::string& user_token(Index u) const { return users_->token(u); }
    const std::string& item_token(Index i) const { return items_->token(i); }
    std::optional<Index> find_user(std::string_view token) const { return users_->find(token); }
    std::optional<Index> find_item(std::string_view token) const { return items_->find(token); }

    const std::shared_ptr<const IdMap>& user_ids() const { return users_; }
    const std::shared_ptr<const IdMap>& item_ids() const { return items_; }

    /// All edges in (user, item) order.
    std::vector<Interaction> interactions() const {
        std::vector<Interaction> out;
        out.reserve(n_transactions_);
        for (Index u = 0; u < n_users(); ++u) {
            for (const auto& e : by_user_.row(u)) {
                out.push_back({u, e.index, e.rating, e.timestamp});
            }
        }
        return out;
    }

private:
    static void check(Index idx, std::size_t n, const char* what) {
        if (idx >= n) {
            throw IndexError(std::string(what) + " index " + std::to_string(idx) +
                             " out of range (size " + std::to_string(n) + ")");
        }
    }

    template <class RowOf, class ColOf>
    static SparseRows build_rows(std::size_t n_rows, const std::vector<Interaction>& edges, RowOf row_of,
                                 ColOf col_of) {
        SparseRows rows;
        rows.offsets.assign(n_rows + 1, 0);
        for (const auto& e : edges) {
            ++rows.offsets[row_of(e) + 1];
        }
        for (std::size_t r = 0; r < n_rows; ++r) {
            rows.offsets[r + 1] += rows.offsets[r];
        }
        rows.entries.resize(edges.size());
        std::vector<std::size_t> cursor(rows.offsets.begin(), rows.offsets.end() - 1);
        for (const auto& e : edges) {
            rows.entries[cursor[row_of(e)]++] = Edge{col_of(e), e.rating, e.timestamp};
        }
        for (std::size_t r = 0; r < n_rows; ++r) {
            auto first = rows.entries.begin() + static_cast<std::ptrdiff_t>(rows.offsets[r]);
            auto last = rows.entries.begin() + static_cast<std::ptrdiff_t>(rows.offsets[r + 1]);
            std::sort(first, last, [](const Edge& a, const Edge& b) { return a.index < b.index; });
        }
        return rows;
    }

    std::shared_ptr<const IdMap> users_;
    std::shared_ptr<const IdMap> items_;
    SparseRows by_user_;
    SparseRows by_item_;
    std::size_t n_transactions_ = 0;
    bool has_timestamps_ = false;
};

/// Interns tokens in first-seen order and collapses repeated (user, item)
/// pairs: the greater timestamp wins; on equal or missing timestamps the
/// later record wins.
inline Dataset build_dataset(std::span<const InteractionRecord> records) {
    auto users = std::make_shared<IdMap>();
    auto items = std::make_shared<IdMap>();
    std::vector<Interaction> edges;
    edges.reserve(records.size());
    std::unordered_map<std::uint64_t, std::size_t> slot; // (user << 32 | item) -> edges position
    slot.reserve(records.size());

    for (const auto& rec : records) {
        const Index u = users->intern(rec.user);
        const Index i = items->intern(rec.item);
        const std::uint64_t key = (std::uint64_t{u} << 32) | i;
        auto [it, inserted] = slot.try_emplace(key, edges.size());
        if (inserted) {
            edges.push_back({u, i, rec.rating, rec.timestamp});
            continue;
        }
        Interaction& kept = edges[it->second];
        const bool older = kept.timestamp && rec.timestamp && *rec.timestamp < *kept.timestamp;
        if (!older) {
            kept.rating = rec.rating;
            kept.timestamp = rec.timestamp;
        }
    }
    return Dataset(std::move(users), std::move(items), std::move(edges));
}

/// Drops users with fewer than `min_interactions` interactions, then items
/// left without users, and re-interns the survivors in their original order.
inline Dataset filter_min_interactions(const Dataset& d, std::size_t min_interactions) {
    if (min_interactions <= 1) {
        return d;
    }
    auto users = std::make_shared<IdMap>();
    auto items = std::make_shared<IdMap>();
    std::vector<Index> item_remap(d.n_items(), 0);
    std::vector<bool> item_kept(d.n_items(), false);
    for (Index u = 0; u < d.n_users(); ++u) {
        if (d.user_items(u).size() >= min_interactions) {
            for (const auto& e : d.user_items(u)) {
                item_kept[e.index] = true;
            }
        }
    }
    for (Index i = 0; i < d.n_items(); ++i) {
        if (item_kept[i]) {
            item_remap[i] = items->intern(d.item_token(i));
        }
    }
    std::vector<Interaction> edges;
    for (Index u = 0; u < d.n_users(); ++u) {
        const auto row = d.user_items(u);
        if (row.size() < min_interactions) {
            continue;
        }
        const Index nu = users->intern(d.user_token(u));
        for (const auto& e : row) {
            edges.push_back({nu, item_remap[e.index], e.rating, e.timestamp});
        }
    }
    if (edges.empty()) {
        throw EmptyInputError("no users left after --min-interactions " +
                              std::to_string(min_interactions));
    }
    return Dataset(std::move(users), std::move(items), std::move(edges));
}

struct DatasetStats {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::size_t n_transactions = 0;
    double sparsity = 0.0; // fraction in [0, 1]
};

inline DatasetStats compute_stats(std::size_t n_users, std::size_t n_items, std::size_t n_transactions) {
    DatasetStats s{n_users, n_items, n_transactions, 0.0};
    const double cells = static_cast<double>(n_users) * static_cast<double>(n_items);
    s.sparsity = cells > 0.0 ? 1.0 - static_cast<double>(n_transactions) / cells : 0.0;
    return s;
}

inline DatasetStats dataset_stats(const Dataset& d) {
    return compute_stats(d.n_users(), d.n_items(), d.n_transactions());
}

/// Sparsity as a percentage with two decimals, e.g. "99.76%".
inline std::string format_sparsity(double sparsity) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", sparsity * 100.0);
    return buf;
}

} // namespace dissim
