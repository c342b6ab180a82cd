#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gittins_exp/simulation.hpp"

namespace gittins_exp {

inline constexpr const char* kResultsHeader =
    "scenario_id,mu_0,mu_1,mu_2,design,k,discount,prior_mean,replications,seed,power,"
    "type1_context,sigma_est_arm1,sigma_est_arm2,sigma_est_control,rho_superior,"
    "eto_pct_increase,min_arm_count";

/// Six significant digits, the precision of every real-valued results column.
inline std::string format_g6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// One row per cell. `type1_context` is "null" when all true means are equal
/// (power is then the family-wise Type I error rate), "alternative" otherwise,
/// and "error" for a cell that could not be aggregated. Columns for a third arm
/// stay empty in 2-arm runs, and GI-only columns stay empty for ER rows.
inline void write_results_csv(std::ostream& os, const std::vector<CellResult>& cells) {
    os << kResultsHeader << '\n';
    for (const CellResult& c : cells) {
        const TrialConfig& cfg = c.config;
        const auto& mu = cfg.true_means;
        const bool three = mu.size() > 2;
        os << c.scenario_id << ',' << format_g6(mu[0]) << ',' << format_g6(mu[1]) << ','
           << (three ? format_g6(mu[2]) : "") << ',' << cfg.policy.label() << ',';
        if (cfg.policy.is_gittins()) {
            os << cfg.policy.k << ',' << format_g6(cfg.policy.discount) << ','
               << format_g6(cfg.policy.prior_mean) << ',';
        } else {
            os << ",,,";
        }
        os << cfg.replications << ',' << cfg.seed << ',';
        if (!c.oc) {
            os << ",error,,,,,,\n";
            continue;
        }
        const OperatingCharacteristics& oc = *c.oc;
        bool null_cell = true;
        for (double m : mu) null_cell = null_cell && m == mu[0];
        os << format_g6(oc.power) << ',' << (null_cell ? "null" : "alternative") << ','
           << format_g6(oc.sigma_estimate[1]) << ','
           << (three ? format_g6(oc.sigma_estimate[2]) : "") << ','
           << format_g6(oc.sigma_estimate[0]) << ',' << format_g6(oc.rho_superior) << ','
           << format_g6(oc.eto_pct_increase) << ',' << oc.min_arm_count << '\n';
    }
}

}  // namespace gittins_exp
