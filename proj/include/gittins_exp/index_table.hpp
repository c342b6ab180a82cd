#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gittins_exp {

/// Raised for any problem reading, validating, or querying an index table.
/// `line()` is the 1-based line in the source file when the problem is tied to
/// a specific row (the header is line 1).
class TableError : public std::runtime_error {
public:
    explicit TableError(const std::string& what, std::optional<std::size_t> line = std::nullopt)
        : std::runtime_error(what), line_(line) {}

    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    std::optional<std::size_t> line_;
};

struct IndexEntry {
    int n = 0;
    double value = 0.0;
    std::size_t line = 0;  // source line, 0 when built in memory
};

/// Result of a table query, with enough detail to say how it was obtained.
struct IndexLookup {
    double value = 0.0;
    bool exact = false;
    IndexEntry lower;                  // knot at or below n (exact: the knot itself)
    std::optional<IndexEntry> upper;   // next knot above n; empty past the last knot
};

/// Normalized index values v(n, d, 1) for one discount factor, ordered by n.
///
/// Between knots the value is interpolated linearly in 1/n. Past the last
/// knot it is interpolated toward the n -> infinity limit (1/n = 0, v = 1).
class IndexCurve {
public:
    IndexCurve(double discount, std::span<const IndexEntry> entries)
        : discount_(discount), entries_(entries) {}

    double discount() const noexcept { return discount_; }
    std::span<const IndexEntry> entries() const noexcept { return entries_; }
    int min_n() const noexcept { return entries_.front().n; }
    int max_n() const noexcept { return entries_.back().n; }

    IndexLookup lookup(int n) const {
        if (n < min_n()) {
            throw TableError("n = " + std::to_string(n) + " is below the smallest tabulated n (" +
                             std::to_string(min_n()) + ") for discount " + format_discount());
        }
        auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                                   [](const IndexEntry& e, int key) { return e.n < key; });
        if (it != entries_.end() && it->n == n) {
            return {it->value, true, *it, std::nullopt};
        }
        const double x = 1.0 / n;
        if (it == entries_.end()) {
            const IndexEntry& last = entries_.back();
            const double x_last = 1.0 / last.n;
            const double value = 1.0 + (last.value - 1.0) * (x / x_last);
            return {value, false, last, std::nullopt};
        }
        const IndexEntry& hi = *it;
        const IndexEntry& lo = *(it - 1);
        const double x_lo = 1.0 / lo.n;  // larger 1/n
        const double x_hi = 1.0 / hi.n;
        const double w = (x_lo - x) / (x_lo - x_hi);
        return {lo.value + w * (hi.value - lo.value), false, lo, hi};
    }

    double value(int n) const { return lookup(n).value; }

private:
    std::string format_discount() const {
        std::ostringstream os;
        os << discount_;
        return os.str();
    }

    double discount_;
    std::span<const IndexEntry> entries_;
};

/// Immutable table of normalized Gittins indices for the exponential reward
/// process, keyed by (discount, n). Safe to share across threads once built.
///
/// Invariants checked on construction: d in [0,1), n >= 1, v >= 1, no duplicate
/// (d, n), v non-increasing in n at fixed d, v non-decreasing in d at fixed n.
class IndexTable {
public:
    struct Row {
        double discount = 0.0;
        int n = 0;
        double value = 0.0;
        std::size_t line = 0;
    };

    static IndexTable from_rows(std::vector<Row> rows) {
        IndexTable table;
        for (const Row& r : rows) {
            if (!(r.discount >= 0.0 && r.discount < 1.0)) {
                throw TableError(at(r.line) + "discount " + std::to_string(r.discount) +
                                     " outside [0, 1)",
                                 opt_line(r.line));
            }
            if (r.n < 1) {
                throw TableError(at(r.line) + "n must be >= 1", opt_line(r.line));
            }
            if (!(r.value >= 1.0) || !std::isfinite(r.value)) {
                throw TableError(at(r.line) + "index value " + std::to_string(r.value) +
                                     " is below 1 or not finite",
                                 opt_line(r.line));
            }
            table.rows_[r.discount].push_back({r.n, r.value, r.line});
        }
        if (table.rows_.empty()) {
            throw TableError("index table has no rows");
        }
        for (auto& [d, entries] : table.rows_) {
            std::stable_sort(entries.begin(), entries.end(),
                             [](const IndexEntry& a, const IndexEntry& b) { return a.n < b.n; });
            for (std::size_t i = 1; i < entries.size(); ++i) {
                const IndexEntry& prev = entries[i - 1];
                const IndexEntry& cur = entries[i];
                if (cur.n == prev.n) {
                    throw TableError(at(cur.line) + "duplicate (discount, n) pair (" +
                                         std::to_string(d) + ", " + std::to_string(cur.n) +
                                         ")" + also(prev.line),
                                     opt_line(cur.line));
                }
                if (cur.value > prev.value) {
                    throw TableError(at(cur.line) + "monotonicity violation: v(" +
                                         std::to_string(cur.n) + ") = " +
                                         std::to_string(cur.value) + " exceeds v(" +
                                         std::to_string(prev.n) + ") = " +
                                         std::to_string(prev.value) + " at discount " +
                                         std::to_string(d) + also(prev.line),
                                     opt_line(cur.line));
                }
            }
            table.discounts_.push_back(d);
        }
        // non-decreasing in d wherever both discounts tabulate the same n
        for (std::size_t i = 1; i < table.discounts_.size(); ++i) {
            const auto& lower = table.rows_.at(table.discounts_[i - 1]);
            const auto& upper = table.rows_.at(table.discounts_[i]);
            for (const IndexEntry& e : upper) {
                auto it = std::lower_bound(
                    lower.begin(), lower.end(), e.n,
                    [](const IndexEntry& a, int key) { return a.n < key; });
                if (it != lower.end() && it->n == e.n && e.value < it->value) {
                    throw TableError(at(e.line) + "monotonicity violation: v(" +
                                         std::to_string(e.n) + ") decreases from discount " +
                                         std::to_string(table.discounts_[i - 1]) + " to " +
                                         std::to_string(table.discounts_[i]) + also(it->line),
                                     opt_line(e.line));
                }
            }
        }
        return table;
    }

    /// Parses the `discount,n,value` CSV format. Rows may appear in any order.
    static IndexTable from_csv(std::istream& in) {
        std::string line;
        std::size_t line_no = 0;
        if (!std::getline(in, line)) {
            throw TableError("index table is empty");
        }
        ++line_no;
        if (trim(strip_bom(line)) != "discount,n,value") {
            throw TableError("line 1: expected header 'discount,n,value'", 1);
        }
        std::vector<Row> rows;
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view text = trim(line);
            if (text.empty()) continue;
            std::vector<std::string_view> fields;
            std::size_t start = 0;
            for (std::size_t pos; (pos = text.find(',', start)) != std::string_view::npos;
                 start = pos + 1) {
                fields.push_back(trim(text.substr(start, pos - start)));
            }
            fields.push_back(trim(text.substr(start)));
            if (fields.size() != 3) {
                throw TableError("line " + std::to_string(line_no) + ": malformed row '" +
                                     std::string(text) + "' (expected 3 fields)",
                                 line_no);
            }
            Row row;
            row.line = line_no;
            if (!parse_number(fields[0], row.discount) || !parse_number(fields[1], row.n) ||
                !parse_number(fields[2], row.value)) {
                throw TableError("line " + std::to_string(line_no) + ": malformed row '" +
                                     std::string(text) + "'",
                                 line_no);
            }
            rows.push_back(row);
        }
        return from_rows(std::move(rows));
    }

    static IndexTable load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) {
            throw TableError("cannot open index table '" + path.string() + "'");
        }
        try {
            return from_csv(in);
        } catch (const TableError& e) {
            throw TableError(path.string() + ": " + e.what(), e.line());
        }
    }

    std::span<const double> discounts() const noexcept { return discounts_; }

    bool has_discount(double d) const { return rows_.count(d) != 0; }

    IndexCurve curve(double d) const {
        auto it = rows_.find(d);
        if (it == rows_.end()) {
            std::ostringstream os;
            os << "discount " << d << " is not tabulated (available:";
            for (double x : discounts_) os << ' ' << x;
            os << ')';
            throw TableError(os.str());
        }
        return IndexCurve(d, it->second);
    }

    IndexLookup lookup(int n, double d) const { return curve(d).lookup(n); }

    /// v(n, d, 1): stored value at a knot, interpolated otherwise.
    double lookup_v(int n, double d) const { return curve(d).value(n); }

    /// Index in outcome units for posterior mean `mu`: mu * v(n, d, 1).
    double gi_value(int n, double d, double mu) const {
        if (!(mu >= 0.0)) {
            throw TableError("posterior mean must be non-negative");
        }
        return mu * lookup_v(n, d);
    }

private:
    IndexTable() = default;

    static std::string at(std::size_t line) {
        return line ? "line " + std::to_string(line) + ": " : std::string();
    }
    static std::string also(std::size_t line) {
        return line ? " (conflicts with line " + std::to_string(line) + ")" : std::string();
    }
    static std::optional<std::size_t> opt_line(std::size_t line) {
        return line ? std::optional(line) : std::nullopt;
    }

    static std::string_view strip_bom(std::string_view s) {
        if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
        return s;
    }
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    }

    template <typename T>
    static bool parse_number(std::string_view s, T& out) {
        if (s.empty()) return false;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && ptr == s.data() + s.size();
    }

    std::map<double, std::vector<IndexEntry>> rows_;
    std::vector<double> discounts_;
};

}  // namespace gittins_exp
