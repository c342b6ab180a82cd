#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gittins_exp/policy.hpp"
#include "gittins_exp/simulation.hpp"

namespace gittins_exp {

/// Configuration problem tied to a named key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what),
          field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    ScenarioGrid grid;
    double discount = 0.0;
    double prior_mean = 0.5;
    std::optional<std::filesystem::path> table_path;  // resolved against the config file
};

namespace config_detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t pos; (pos = s.find(sep, start)) != std::string_view::npos; start = pos + 1) {
        out.push_back(trim(s.substr(start, pos - start)));
    }
    out.push_back(trim(s.substr(start)));
    return out;
}

template <typename T>
T number(const std::string& field, std::string_view text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(field, "'" + std::string(text) + "' is not a valid number");
    }
    return value;
}

// Snap grid values to 1e-9 so that e.g. 0.1 + 2 * 0.1 compares equal to a typed 0.3.
inline double snap(double x) { return std::round(x * 1e9) / 1e9; }

}  // namespace config_detail

/// Parses the INI-style scenario configuration.
///
/// Keys may sit at top level or in any section (`[trial]`, `[design]`,
/// `[analysis]` by convention) but must be unique. Recognised keys:
///   N, arms, mu, mu_grid, designs, discount, prior_mean, alpha,
///   replications, seed, table.
/// `mu` lists all arm means (arm 0 is the control). `mu_grid` overrides
/// individual arms with inclusive ranges `arm:start:stop:step`, comma
/// separated; the grid is their Cartesian product with the first listed arm
/// varying slowest. `designs` lists `ER` and `GI:k` tokens.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
    namespace pt = boost::property_tree;
    using namespace config_detail;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("", std::string("syntax error: ") + e.what());
    }
    std::map<std::string, std::string> kv;
    auto put = [&](const std::string& key, const std::string& value) {
        if (!kv.emplace(key, value).second) throw ConfigError(key, "key given more than once");
    };
    for (const auto& [key, node] : tree) {
        if (node.empty()) {
            put(key, node.data());
        } else {
            for (const auto& [sub, leaf] : node) put(sub, leaf.data());
        }
    }
    static const char* const known[] = {"N",     "arms",         "mu",   "mu_grid",
                                        "designs", "discount",   "prior_mean",
                                        "alpha", "replications", "seed", "table"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(key, "unknown key");
    }
    auto require = [&](const std::string& key) -> std::string_view {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError(key, "required key is missing");
        return trim(it->second);
    };
    auto optional = [&](const std::string& key) -> std::optional<std::string_view> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return trim(it->second);
    };

    RunConfig rc;
    ScenarioGrid& g = rc.grid;
    g.horizon = number<int>("N", require("N"));
    g.arms = number<int>("arms", require("arms"));
    if (g.arms < 2) throw ConfigError("arms", "need at least 2 arms");
    if (g.horizon < g.arms) throw ConfigError("N", "must be at least the number of arms");

    std::vector<double> base;
    for (auto tok : split(require("mu"), ',')) base.push_back(number<double>("mu", tok));
    if (static_cast<int>(base.size()) != g.arms) {
        throw ConfigError("mu", "expected " + std::to_string(g.arms) + " means, got " +
                                    std::to_string(base.size()));
    }
    for (double m : base) {
        if (!(m > 0.0)) throw ConfigError("mu", "means must be positive");
    }

    std::vector<std::pair<int, std::vector<double>>> axes;
    if (auto grid_text = optional("mu_grid"); grid_text && !grid_text->empty()) {
        for (auto entry : split(*grid_text, ',')) {
            auto parts = split(entry, ':');
            if (parts.size() != 4) {
                throw ConfigError("mu_grid", "expected arm:start:stop:step, got '" +
                                                 std::string(entry) + "'");
            }
            const int arm = number<int>("mu_grid", parts[0]);
            const double start = number<double>("mu_grid", parts[1]);
            const double stop = number<double>("mu_grid", parts[2]);
            const double step = number<double>("mu_grid", parts[3]);
            if (arm < 0 || arm >= g.arms) throw ConfigError("mu_grid", "arm index out of range");
            if (!(step > 0.0) || stop < start || !(start > 0.0)) {
                throw ConfigError("mu_grid", "range must be positive and increasing");
            }
            for (const auto& axis : axes) {
                if (axis.first == arm) throw ConfigError("mu_grid", "arm listed twice");
            }
            const long count = std::lround((stop - start) / step) + 1;
            std::vector<double> values;
            for (long i = 0; i < count; ++i) values.push_back(snap(start + i * step));
            axes.emplace_back(arm, std::move(values));
        }
    }
    std::size_t total = 1;
    for (const auto& axis : axes) total *= axis.second.size();
    g.mean_vectors.clear();
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::vector<double> means = base;
        std::size_t rem = idx;
        for (std::size_t a = axes.size(); a-- > 0;) {
            const auto& values = axes[a].second;
            means[axes[a].first] = values[rem % values.size()];
            rem /= values.size();
        }
        g.mean_vectors.push_back(std::move(means));
    }

    if (auto d = optional("discount")) rc.discount = number<double>("discount", *d);
    if (auto p = optional("prior_mean")) rc.prior_mean = number<double>("prior_mean", *p);
    if (!(rc.prior_mean > 0.0)) throw ConfigError("prior_mean", "must be positive");

    bool any_gi = false;
    for (auto tok : split(require("designs"), ',')) {
        if (tok == "ER") {
            g.designs.push_back(PolicySpec::equal_randomisation());
        } else if (tok.substr(0, 3) == "GI:") {
            const int k = number<int>("designs", tok.substr(3));
            PolicySpec spec = PolicySpec::constrained_gittins(k, rc.discount, rc.prior_mean);
            try {
                spec.validate(g.arms, g.horizon);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("designs", e.what());
            }
            g.designs.push_back(spec);
            any_gi = true;
        } else {
            throw ConfigError("designs", "unknown design '" + std::string(tok) +
                                             "' (expected ER or GI:k)");
        }
    }
    if (any_gi && !optional("discount")) {
        throw ConfigError("discount", "required when a GI design is listed");
    }
    if (any_gi && !(rc.discount >= 0.0 && rc.discount < 1.0)) {
        throw ConfigError("discount", "must lie in [0, 1)");
    }

    g.family_alpha = 0.05;
    if (auto a = optional("alpha")) g.family_alpha = number<double>("alpha", *a);
    if (!(g.family_alpha > 0.0 && g.family_alpha < 1.0)) throw ConfigError("alpha", "must lie in (0, 1)");
    g.replications = number<int>("replications", require("replications"));
    if (g.replications < 1) throw ConfigError("replications", "must be >= 1");
    g.seed = number<std::uint64_t>("seed", require("seed"));

    if (auto t = optional("table"); t && !t->empty()) {
        const std::filesystem::path p{std::string(*t)};
        rc.table_path = p.is_absolute() ? p : base_dir / p;
    }
    return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config '" + path.string() + "'");
    return parse_config(in, path.parent_path());
}

}  // namespace gittins_exp
