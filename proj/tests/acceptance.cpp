// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gittins_exp/gittins_exp.hpp"

using namespace gittins_exp;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

const CellResult* find_cell(const std::vector<CellResult>& cells, const std::vector<double>& means,
                            const std::string& label) {
    for (const CellResult& c : cells) {
        if (c.config.true_means == means && c.config.policy.label() == label) return &c;
    }
    return nullptr;
}

std::vector<std::string> design_labels(const ScenarioGrid& g) {
    std::vector<std::string> out;
    for (const PolicySpec& p : g.designs) out.push_back(p.label());
    return out;
}

double f_cdf_quadrature(double f, double d1, double d2) {
    using boost::math::quadrature::gauss_kronrod;
    auto pdf = [&](double x) {
        if (x <= 0.0) return d1 == 2.0 ? 1.0 : 0.0;
        return std::exp(std::lgamma(0.5 * (d1 + d2)) - std::lgamma(0.5 * d1) -
                        std::lgamma(0.5 * d2) + 0.5 * d1 * std::log(d1 / d2) +
                        (0.5 * d1 - 1.0) * std::log(x) - 0.5 * (d1 + d2) * std::log1p(d1 * x / d2));
    };
    std::vector<double> cuts{0.0};
    for (double c : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0}) {
        if (c < f) cuts.push_back(c);
    }
    cuts.push_back(f);
    double total = 0.0;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        total += gauss_kronrod<double, 61>::integrate(pdf, cuts[i - 1], cuts[i], 8, 1e-12);
    }
    return total;
}

std::string results_csv(const std::vector<CellResult>& cells) {
    std::ostringstream os;
    write_results_csv(os, cells);
    return os.str();
}

}  // namespace

int main() {
    const std::string config_dir = GITTINS_EXP_CONFIG_DIR;
    const RunConfig two = load_config(config_dir + "/two_arm.cfg");
    const RunConfig three = load_config(config_dir + "/three_arm.cfg");
    const IndexTable table = IndexTable::load(two.table_path.value());

    std::printf("defaults: discount %g, prior mean %g, seed %llu\n", two.discount, two.prior_mean,
                static_cast<unsigned long long>(two.grid.seed));

    // full 2-arm grid at the shipped replication count
    const std::vector<CellResult> grid2 = run_scenario_grid(two.grid, table, 1);
    const std::vector<std::string> labels2 = design_labels(two.grid);
    std::vector<std::string> gi_labels2(labels2.begin() + 1, labels2.end());
    std::vector<double> alt_mu1;
    for (const auto& mv : two.grid.mean_vectors) {
        if (mv[1] != mv[0]) alt_mu1.push_back(mv[1]);
    }

    // 1. null calibration, 2 arms
    {
        bool ok = true;
        std::string detail;
        for (const auto& l : labels2) {
            const CellResult* c = find_cell(grid2, {0.5, 0.5}, l);
            const double p = c && c->oc ? c->oc->power : NAN;
            ok = ok && std::fabs(p - 0.05) <= 0.01;
            detail += l + "=" + fmt("%.4f", p) + " ";
        }
        report(ok, "null-calibration-2arm", detail + "(target 0.05 +/- 0.01)");
    }

    // 3-arm null and extreme cells
    ScenarioGrid g3 = three.grid;
    g3.mean_vectors = {{0.4, 0.4, 0.4}, {0.4, 0.1, 1.0}};
    const std::vector<CellResult> cells3 = run_scenario_grid(g3, table, workers());
    const std::vector<std::string> labels3 = design_labels(g3);

    // 2. null calibration, 3 arms
    {
        bool ok = true;
        std::string detail;
        for (const auto& l : labels3) {
            const CellResult* c = find_cell(cells3, {0.4, 0.4, 0.4}, l);
            const double p = c && c->oc ? c->oc->power : NAN;
            ok = ok && std::fabs(p - 0.05) <= 0.015;
            detail += l + "=" + fmt("%.4f", p) + " ";
        }
        report(ok, "null-calibration-3arm", detail + "(target 0.05 +/- 0.015)");
    }

    // 3. null allocation symmetry
    {
        bool ok = true;
        double worst = 0.0;
        for (const auto& l : labels2) {
            const CellResult* c = find_cell(grid2, {0.5, 0.5}, l);
            for (double s : c->oc->mean_share) worst = std::max(worst, std::fabs(s - 0.5));
        }
        for (const auto& l : labels3) {
            const CellResult* c = find_cell(cells3, {0.4, 0.4, 0.4}, l);
            for (double s : c->oc->mean_share) worst = std::max(worst, std::fabs(s - 1.0 / 3.0));
        }
        ok = worst <= 0.02;
        report(ok, "null-share-symmetry", "max |share - 1/M| = " + fmt("%.4f", worst) + " (limit 0.02)");
    }

    // 4. power dominance
    {
        double worst = -1.0;
        std::string where;
        for (double mu1 : alt_mu1) {
            const double er = find_cell(grid2, {0.5, mu1}, "ER")->oc->power;
            for (const auto& l : gi_labels2) {
                const double gi = find_cell(grid2, {0.5, mu1}, l)->oc->power;
                if (gi - er > worst) {
                    worst = gi - er;
                    where = l + " at mu1=" + fmt("%g", mu1);
                }
            }
        }
        report(worst <= 0.015, "power-dominance",
               "max(GI - ER power) = " + fmt("%.4f", worst) + " (" + where + ", limit 0.015)");
    }

    // 5. earning dominance
    {
        double min_margin = INFINITY;
        double er_worst = 0.0;
        for (double mu1 : alt_mu1) {
            const double er = find_cell(grid2, {0.5, mu1}, "ER")->oc->eto_pct_increase;
            er_worst = std::max(er_worst, std::fabs(er));
            for (const auto& l : gi_labels2) {
                min_margin = std::min(min_margin,
                                      find_cell(grid2, {0.5, mu1}, l)->oc->eto_pct_increase - er);
            }
        }
        report(min_margin > 0.0 && er_worst <= 1.0, "earning-dominance",
               "min(GI - ER ETO%) = " + fmt("%.3f", min_margin) + ", max |ER ETO%| = " +
                   fmt("%.3f", er_worst));
    }

    // 6. constraint cap for k = 5
    {
        double max_share = 0.0;
        for (const CellResult& c : grid2) {
            if (c.config.policy.label() == "GI:5") {
                max_share = std::max(max_share, c.oc->max_superior_share);
            }
        }
        // strongest effect: the largest mean ratio on the grid
        double strongest = alt_mu1.front();
        for (double mu1 : alt_mu1) {
            if (std::fabs(std::log(mu1 / 0.5)) > std::fabs(std::log(strongest / 0.5))) strongest = mu1;
        }
        const double share = find_cell(grid2, {0.5, strongest}, "GI:5")->oc->rho_superior;
        report(max_share <= 0.81 && std::fabs(share - 0.80) <= 0.05, "constraint-cap-k5",
               "max replication share " + fmt("%.2f", max_share) + " (limit 0.81), mean share at mu1=" +
                   fmt("%g", strongest) + " " + fmt("%.4f", share) + " (0.80 +/- 0.05)");
    }

    // 7. 3-arm extreme earning, with sensitivity sweep
    {
        double best = -INFINITY;
        std::string best_label;
        for (const auto& l : labels3) {
            const CellResult* c = find_cell(cells3, {0.4, 0.1, 1.0}, l);
            if (c->config.policy.is_gittins() && c->oc->eto_pct_increase > best) {
                best = c->oc->eto_pct_increase;
                best_label = l;
            }
        }
        report(best >= 45.0, "extreme-earning-3arm",
               "best GI ETO% at (0.4, 0.1, 1.0) = " + fmt("%.2f", best) + " (" + best_label +
                   ", floor 45)");
        std::printf("      sensitivity (best GI ETO%%, %d reps):\n", three.grid.replications);
        std::printf("      %-8s", "d \\ mu0");
        const std::vector<double> priors{0.25, 0.5, 1.0};
        for (double p : priors) std::printf("%9g", p);
        std::printf("\n");
        for (double d : {0.9, 0.95, 0.99}) {
            std::printf("      %-8g", d);
            for (double prior : priors) {
                ScenarioGrid s = g3;
                s.mean_vectors = {{0.4, 0.1, 1.0}};
                s.designs.clear();
                for (const PolicySpec& p : g3.designs) {
                    if (p.is_gittins()) s.designs.push_back(PolicySpec::constrained_gittins(p.k, d, prior));
                }
                double b = -INFINITY;
                for (const CellResult& c : run_scenario_grid(s, table, workers())) {
                    b = std::max(b, c.oc->eto_pct_increase);
                }
                std::printf("%9.2f", b);
            }
            std::printf("\n");
        }
    }

    // 8. asymmetry
    {
        bool ok = true;
        std::string detail;
        for (const auto& l : gi_labels2) {
            const auto& lo = *find_cell(grid2, {0.5, 0.3}, l)->oc;
            const auto& hi = *find_cell(grid2, {0.5, 0.7}, l)->oc;
            ok = ok && lo.power > hi.power && lo.rho_superior > hi.rho_superior;
            detail += l + " power " + fmt("%.3f", lo.power) + ">" + fmt("%.3f", hi.power) + " rho " +
                      fmt("%.3f", lo.rho_superior) + ">" + fmt("%.3f", hi.rho_superior) + "; ";
        }
        report(ok, "asymmetry", detail);
    }

    // 9. F-CDF accuracy
    {
        double worst = 0.0, closed = 0.0;
        for (double d1 = 2; d1 <= 200; d1 += d1 < 10 ? 1 : 19) {
            for (double d2 = 2; d2 <= 200; d2 += d2 < 10 ? 1 : 19) {
                for (double lf = std::log(0.01); lf <= std::log(100.0) + 1e-9; lf += std::log(100.0) / 10) {
                    const double f = std::exp(lf);
                    worst = std::max(worst, std::fabs(f_cdf(f, d1, d2) - f_cdf_quadrature(f, d1, d2)));
                }
            }
            closed = std::max(closed, std::fabs(f_cdf(1.0, d1, d1) - 0.5));
        }
        for (double f = 0.01; f <= 100.0; f *= 1.7) closed = std::max(closed, std::fabs(f_cdf(f, 2, 2) - f / (f + 1)));
        report(worst <= 1e-10 && closed <= 1e-12, "f-cdf-accuracy",
               "max |f_cdf - quadrature| = " + fmt("%.2e", worst) + ", closed forms " + fmt("%.2e", closed));
    }

    // 10. index-table properties
    {
        bool ok = true;
        std::mt19937_64 gen(2024);
        std::uniform_int_distribution<int> n_dist(1, 3000);
        std::uniform_real_distribution<double> mu_dist(0.0, 5.0), c_dist(0.1, 10.0);
        const auto ds = table.discounts();
        for (int i = 0; i < 1000; ++i) {
            const double d = ds[gen() % ds.size()];
            const int n = n_dist(gen);
            const double mu = mu_dist(gen), c = c_dist(gen);
            const double a = table.gi_value(n, d, c * mu), b = c * table.gi_value(n, d, mu);
            ok = ok && std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b));
            const auto& entries = table.curve(d).entries();
            const IndexEntry& e = entries[gen() % entries.size()];
            const IndexLookup hit = table.lookup(e.n, d);
            ok = ok && hit.exact && hit.value == e.value;
        }
        report(ok, "index-table-properties",
               std::to_string(ds.size()) + " discounts loaded with invariants, 1000 randomized queries");
    }

    // 11. oracle validation
    {
        const double d = 0.9;
        const OracleConfig cfg = OracleConfig::for_discount(d);
        const ValidationReport rep = validate_table(table, cfg, 0.02, 30);
        bool ok = !rep.rows.empty();
        double prev = INFINITY;
        for (const auto& r : rep.rows) {
            ok = ok && r.oracle_value >= 1.0 && r.oracle_value <= prev + cfg.bisection_tol;
            prev = r.oracle_value;
        }
        for (int n : {2, 10}) {
            double last = 0.0;
            for (double dd : {0.5, 0.7, 0.9}) {
                const double v = approx_index(n, OracleConfig::for_discount(dd));
                ok = ok && v >= last;
                last = v;
            }
        }
        const double v200 = approx_index(200, cfg);
        ok = ok && v200 >= 1.0 && v200 - 1.0 <= 0.02;
        report(ok, "oracle-validation",
               "d=0.9, n<=30: max rel deviation " + fmt("%.2e", rep.worst.rel_deviation) + " at n=" +
                   std::to_string(rep.worst.n) + " (target 0.02 " +
                   (rep.passed ? "met" : "NOT met") + "), v(200)=" + fmt("%.4f", v200));
    }

    // 12. determinism
    {
        const std::string a = results_csv(grid2);
        const std::string b = results_csv(run_scenario_grid(two.grid, table, 8));
        report(a == b, "determinism",
               "2-arm grid CSV with workers 1 and 8: " + std::string(a == b ? "identical" : "DIFFER") +
                   " (" + std::to_string(a.size()) + " bytes)");
    }

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
