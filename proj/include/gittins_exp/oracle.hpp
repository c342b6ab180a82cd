#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gittins_exp/index_table.hpp"

namespace gittins_exp {

/// Settings for the first-principles index approximation.
///
/// The arm state after t further observations is (pseudo-count n + t,
/// pseudo-sum S). S never decreases, so it is carried on a grid uniform in
/// log(S / S_0) over [0, log_span]. The Lomax predictive is integrated with
/// `strata` equal-probability strata, each represented by its conditional mean.
struct OracleConfig {
    double discount = 0.9;
    int horizon = 0;
    int grid_points = 400;
    int strata = 64;
    double log_span = 0.0;          // 0 selects a span from the horizon
    double bisection_tol = 1e-3;   // on the retirement rate, relative to the mean
    int max_iterations = 200;

    static OracleConfig for_discount(double discount, double truncation_tol = 1e-10) {
        if (!(discount > 0.0 && discount < 1.0)) {
            throw std::invalid_argument("oracle discount must lie in (0, 1)");
        }
        OracleConfig c;
        c.discount = discount;
        c.horizon = static_cast<int>(std::ceil(std::log(truncation_tol) / std::log(discount))) + 1;
        return c;
    }

    void validate() const {
        if (!(discount > 0.0 && discount < 1.0)) {
            throw std::invalid_argument("oracle discount must lie in (0, 1)");
        }
        if (horizon < 1 || grid_points < 8 || strata < 2) {
            throw std::invalid_argument("oracle horizon, grid and strata must be positive");
        }
        if (!(bisection_tol > 0.0)) throw std::invalid_argument("bisection_tol must be positive");
    }
};

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct Stratum {
    double log_growth;  // log of the conditional mean of 1 + Z
    double weight;
};

// X = 1 + Z with survival X^-(n+1); equal-probability strata, conditional means
// from the partial mean E[X; X > y] = (n+1)/n * y^-n.
inline std::vector<Stratum> lomax_strata(int n, int strata) {
    std::vector<Stratum> out;
    out.reserve(strata);
    const double a = n + 1.0;
    auto pmean = [&](double y) { return std::isinf(y) ? 0.0 : a / n * std::pow(y, -static_cast<double>(n)); };
    double y_lo = 1.0;
    for (int s = 0; s < strata; ++s) {
        const double p_hi = 1.0 - static_cast<double>(s + 1) / strata;  // survival at y_hi
        const double y_hi = s + 1 == strata ? INFINITY : std::pow(p_hi, -1.0 / a);
        const double w = 1.0 / strata;
        const double mean_x = (pmean(y_lo) - pmean(y_hi)) / w;
        out.push_back({std::log(mean_x), w});
        y_lo = y_hi;
    }
    return out;
}

}  // namespace detail

/// Continuation value minus retirement value for an arm with n pseudo-observations
/// and posterior mean `mean`, against retirement at `rate` per step. Positive means
/// the arm is worth continuing.
inline double continuation_advantage(int n, double mean, double rate, const OracleConfig& cfg) {
    const double d = cfg.discount;
    const double retire = rate / (1.0 - d);
    const double s0 = n * mean;
    const int G = cfg.grid_points;
    const double span = cfg.log_span > 0.0
                            ? cfg.log_span
                            : std::log((n + cfg.horizon) / static_cast<double>(n)) + std::log(50.0);
    const double h = span / (G - 1);

    // terminal: treat the mean as known
    std::vector<double> value(G);
    const int n_top = n + cfg.horizon;
    for (int g = 0; g < G; ++g) {
        const double mu = s0 * std::exp(g * h) / n_top;
        value[g] = std::max(rate, mu) / (1.0 - d);
    }
    std::vector<double> next(G);
    double root_cont = 0.0;
    for (int t = cfg.horizon - 1; t >= 0; --t) {
        const int n_t = n + t;
        const auto strata = detail::lomax_strata(n_t, cfg.strata);
        const int n_next = n_t + 1;
        auto interp = [&](double u) {
            const double pos = u / h;
            if (pos >= G - 1) {
                // far above the grid retirement is never optimal: value = mean / (1 - d)
                return s0 * std::exp(u) / n_next / (1.0 - d);
            }
            const int i = static_cast<int>(pos);
            const double frac = pos - i;
            return value[i] + frac * (value[i + 1] - value[i]);
        };
        const int g_end = t == 0 ? 1 : G;
        for (int g = 0; g < g_end; ++g) {
            const double u = g * h;
            const double mu = s0 * std::exp(u) / n_t;
            double expect = 0.0;
            for (const auto& st : strata) expect += st.weight * interp(u + st.log_growth);
            const double cont = mu + d * expect;
            if (t == 0) root_cont = cont;
            next[g] = std::max(retire, cont);
        }
        std::swap(value, next);
    }
    return root_cont - retire;
}

/// Index in outcome units for an arm with n pseudo-observations and posterior mean
/// `mean`: the retirement rate at which continuing and retiring are equally good.
inline double approx_index_scaled(int n, double mean, const OracleConfig& cfg) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("oracle needs n >= 1");
    if (!(mean > 0.0)) throw std::invalid_argument("oracle needs a positive mean");
    double lo = mean;
    double hi = 2.0 * mean;
    int iter = 0;
    while (continuation_advantage(n, mean, hi, cfg) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++iter > 60) throw OracleError("could not bracket the index");
    }
    iter = 0;
    while (hi - lo > cfg.bisection_tol * mean) {
        if (++iter > cfg.max_iterations) {
            throw OracleError("bisection did not converge within " +
                              std::to_string(cfg.max_iterations) + " iterations");
        }
        const double mid = 0.5 * (lo + hi);
        if (continuation_advantage(n, mean, mid, cfg) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Normalized index v(n, d, 1).
inline double approx_index(int n, const OracleConfig& cfg) { return approx_index_scaled(n, 1.0, cfg); }

struct ValidationRow {
    int n = 0;
    double table_value = 0.0;
    double oracle_value = 0.0;
    double rel_deviation = 0.0;
};

struct ValidationReport {
    double discount = 0.0;
    double rel_tol = 0.0;
    std::vector<ValidationRow> rows;
    ValidationRow worst;
    bool passed = false;

    void write_text(std::ostream& os) const {
        os << "discount " << discount << ", " << rows.size() << " entries compared\n";
        os << "max relative deviation " << worst.rel_deviation << " at n = " << worst.n
           << " (table " << worst.table_value << ", oracle " << worst.oracle_value << ")\n";
        os << "tolerance " << rel_tol << ": " << (passed ? "PASS" : "FAIL") << '\n';
    }

    void write_csv(std::ostream& os) const {
        os << "n,discount,table_value,oracle_value,rel_deviation\n";
        for (const auto& r : rows) {
            os << r.n << ',' << discount << ',' << r.table_value << ',' << r.oracle_value << ','
               << r.rel_deviation << '\n';
        }
    }
};

/// Compares every tabulated knot with 2 <= n <= n_max at cfg.discount
/// against the oracle. A deviation above rel_tol fails the report; it is not an error.
inline ValidationReport validate_table(const IndexTable& table, const OracleConfig& cfg,
                                       double rel_tol, int n_max) {
    const IndexCurve curve = table.curve(cfg.discount);
    ValidationReport rep;
    rep.discount = cfg.discount;
    rep.rel_tol = rel_tol;
    for (const IndexEntry& e : curve.entries()) {
        if (e.n < 2 || e.n > n_max) continue;
        ValidationRow row;
        row.n = e.n;
        row.table_value = e.value;
        row.oracle_value = approx_index(e.n, cfg);
        row.rel_deviation = std::fabs(row.oracle_value / row.table_value - 1.0);
        if (rep.rows.empty() || row.rel_deviation > rep.worst.rel_deviation) rep.worst = row;
        rep.rows.push_back(row);
    }
    rep.passed = !rep.rows.empty() && rep.worst.rel_deviation <= rel_tol;
    return rep;
}

}  // namespace gittins_exp
