#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gittins_exp/arm_state.hpp"
#include "gittins_exp/index_table.hpp"
#include "gittins_exp/policy.hpp"
#include "gittins_exp/random.hpp"
#include "gittins_exp/stats.hpp"

namespace gittins_exp {

/// A trial left some arm without participants, so its estimate and test are
/// undefined.
class EmptyArmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the grid runner for configuration problems, tagged with the cell.
class CellError : public std::runtime_error {
public:
    CellError(int cell_id, const std::string& what)
        : std::runtime_error("scenario " + std::to_string(cell_id) + ": " + what),
          cell_id_(cell_id) {}
    int cell_id() const noexcept { return cell_id_; }

private:
    int cell_id_;
};

struct TrialConfig {
    int horizon = 100;                // N
    std::vector<double> true_means;   // arm 0 is the control
    PolicySpec policy;
    double family_alpha = 0.05;
    int replications = 10000;
    std::uint64_t seed = 0;

    int arms() const noexcept { return static_cast<int>(true_means.size()); }

    void validate() const {
        if (arms() < 2) throw std::invalid_argument("need at least 2 arms");
        if (horizon < arms()) throw std::invalid_argument("N must be at least the number of arms");
        for (double mu : true_means) {
            if (!(mu > 0.0)) throw std::invalid_argument("true means must be positive");
        }
        if (replications < 1) throw std::invalid_argument("replications must be >= 1");
        if (!(family_alpha > 0.0 && family_alpha < 1.0)) {
            throw std::invalid_argument("alpha must lie in (0, 1)");
        }
        policy.validate(arms(), horizon);
    }
};

struct TrialResult {
    std::vector<int> counts;
    std::vector<double> sums;
    std::vector<double> estimates;   // sums / counts, prior excluded
    std::vector<bool> rejections;    // arm m vs control, index m - 1
};

struct OperatingCharacteristics {
    int replications = 0;
    double power = 0.0;                   // any comparison rejected
    std::vector<double> sigma_estimate;   // per arm, index 0 is the control
    double rho_superior = 0.0;
    double eto_pct_increase = 0.0;
    std::vector<double> mean_share;       // per arm, mean of counts / N
    double max_superior_share = 0.0;      // largest single-replication superior share
    int min_arm_count = 0;                // smallest count over all arms and replications
};

inline double sample_exponential(double mean, double u) { return -mean * std::log(u); }

inline double sample_exponential(double mean, Rng& rng) {
    if (!(mean > 0.0)) throw std::invalid_argument("exponential mean must be positive");
    return sample_exponential(mean, rng.uniform_open0());
}

namespace detail {

inline std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

inline std::uint64_t means_key(const std::vector<double>& means) {
    std::uint64_t h = derive_seed({means.size()});
    for (double mu : means) h = derive_seed({h, bits(mu)});
    return h;
}

inline std::uint64_t design_key(const PolicySpec& p) {
    if (!p.is_gittins()) return derive_seed({0});
    return derive_seed({1, static_cast<std::uint64_t>(p.k), bits(p.discount), bits(p.prior_mean)});
}

inline constexpr std::uint64_t kOutcomeStream = 0x6f7574636f6d65ULL;
inline constexpr std::uint64_t kPolicyStream = 0x706f6c696379ULL;

}  // namespace detail

/// Simulates one experiment.
///
/// Each arm draws its outcomes from its own stream keyed by (seed, means,
/// replication, arm), so every design sees the same outcome sequence per arm
/// in a given replication. Allocation randomness comes from a separate stream
/// keyed additionally by the design.
inline TrialResult run_trial(const TrialConfig& config, const IndexTable& table,
                             int replication_index) {
    const int arms = config.arms();
    const std::uint64_t mkey = detail::means_key(config.true_means);
    std::vector<Rng> outcome_rng;
    outcome_rng.reserve(arms);
    for (int m = 0; m < arms; ++m) {
        outcome_rng.emplace_back(derive_seed({config.seed, detail::kOutcomeStream, mkey,
                                              static_cast<std::uint64_t>(replication_index),
                                              static_cast<std::uint64_t>(m)}));
    }
    Rng policy_rng(derive_seed({config.seed, detail::kPolicyStream, mkey,
                                detail::design_key(config.policy),
                                static_cast<std::uint64_t>(replication_index)}));

    TrialResult r;
    r.counts.assign(arms, 0);
    r.sums.assign(arms, 0.0);

    const PolicySpec& policy = config.policy;
    if (policy.is_gittins()) {
        const IndexCurve curve = table.curve(policy.discount);
        std::vector<ArmState> states(arms, init_arm(policy.prior_mean, curve));
        for (int t = 0; t < config.horizon; ++t) {
            const std::size_t arm = gi_select(states, t, policy, policy_rng);
            const double y = sample_exponential(config.true_means[arm], outcome_rng[arm]);
            r.counts[arm] += 1;
            r.sums[arm] += y;
            states[arm] = observe(states[arm], y, curve);
        }
    } else {
        for (int t = 0; t < config.horizon; ++t) {
            const std::size_t arm = er_select(arms, policy_rng);
            const double y = sample_exponential(config.true_means[arm], outcome_rng[arm]);
            r.counts[arm] += 1;
            r.sums[arm] += y;
        }
    }

    r.estimates.resize(arms);
    for (int m = 0; m < arms; ++m) {
        if (r.counts[m] == 0) {
            throw EmptyArmError("replication " + std::to_string(replication_index) + ": arm " +
                                std::to_string(m) + " received no participants");
        }
        r.estimates[m] = r.sums[m] / r.counts[m];
    }
    const double cutoff = bonferroni_alpha(config.family_alpha, arms - 1);
    r.rejections.resize(arms - 1);
    for (int m = 1; m < arms; ++m) {
        r.rejections[m - 1] =
            exp_ratio_test(r.sums[m], r.counts[m], r.sums[0], r.counts[0], cutoff).reject;
    }
    return r;
}

/// Runs body(i) for i in [0, count) on `workers` threads. The first exception
/// thrown by any worker is rethrown after all threads join.
template <typename Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    workers = std::max(1, workers);
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    constexpr std::size_t kChunk = 64;
    auto work = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= count) return;
            const std::size_t end = std::min(count, begin + kChunk);
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<std::size_t>(workers, count));
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline std::vector<TrialResult> simulate(const TrialConfig& config, const IndexTable& table,
                                         int workers = 1) {
    config.validate();
    if (config.policy.is_gittins()) (void)table.curve(config.policy.discount);
    std::vector<TrialResult> results(config.replications);
    parallel_for(results.size(), workers,
                 [&](std::size_t i) { results[i] = run_trial(config, table, static_cast<int>(i)); });
    return results;
}

/// Reduces replications to operating characteristics. Every statistic is a
/// fixed-order sum over the stored results, so the output does not depend on
/// how the replications were scheduled.
inline OperatingCharacteristics aggregate(const std::vector<TrialResult>& results,
                                          const TrialConfig& config) {
    if (results.empty()) throw std::invalid_argument("aggregate needs at least one result");
    const int arms = config.arms();
    const double reps = static_cast<double>(results.size());
    const double horizon = config.horizon;

    const double best_mean = *std::max_element(config.true_means.begin(), config.true_means.end());
    std::vector<int> superior;
    for (int m = 0; m < arms; ++m) {
        if (config.true_means[m] == best_mean) superior.push_back(m);
    }
    const double er_expected =
        horizon / arms * std::accumulate(config.true_means.begin(), config.true_means.end(), 0.0);

    OperatingCharacteristics oc;
    oc.replications = static_cast<int>(results.size());
    oc.mean_share.assign(arms, 0.0);
    oc.min_arm_count = config.horizon;
    std::vector<double> mean_est(arms, 0.0);
    double any_reject = 0.0;
    double rho_sum = 0.0;
    double eto_sum = 0.0;
    for (const TrialResult& r : results) {
        if (std::any_of(r.rejections.begin(), r.rejections.end(), [](bool b) { return b; })) {
            any_reject += 1.0;
        }
        double sup = 0.0;
        for (int m : superior) sup += r.counts[m];
        const double sup_share = sup / superior.size() / horizon;
        rho_sum += sup_share;
        oc.max_superior_share = std::max(oc.max_superior_share, sup_share);
        double total = 0.0;
        for (int m = 0; m < arms; ++m) {
            total += r.sums[m];
            oc.mean_share[m] += r.counts[m] / horizon;
            mean_est[m] += r.estimates[m];
            oc.min_arm_count = std::min(oc.min_arm_count, r.counts[m]);
        }
        eto_sum += (total / er_expected - 1.0) * 100.0;
    }
    oc.power = any_reject / reps;
    oc.rho_superior = rho_sum / reps;
    oc.eto_pct_increase = eto_sum / reps;
    for (int m = 0; m < arms; ++m) {
        oc.mean_share[m] /= reps;
        mean_est[m] /= reps;
    }
    oc.sigma_estimate.assign(arms, 0.0);
    if (results.size() > 1) {
        for (const TrialResult& r : results) {
            for (int m = 0; m < arms; ++m) {
                const double dev = r.estimates[m] - mean_est[m];
                oc.sigma_estimate[m] += dev * dev;
            }
        }
        for (double& s : oc.sigma_estimate) s = std::sqrt(s / (reps - 1.0));
    }
    return oc;
}

/// Cartesian scenario grid: every means vector crossed with every design.
struct ScenarioGrid {
    int horizon = 100;
    int arms = 2;
    std::vector<std::vector<double>> mean_vectors;
    std::vector<PolicySpec> designs;
    double family_alpha = 0.05;
    int replications = 10000;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return mean_vectors.size() * designs.size(); }

    /// Cell ids run means-major: id = means_index * designs.size() + design_index.
    TrialConfig cell_config(std::size_t id) const {
        TrialConfig c;
        c.horizon = horizon;
        c.true_means = mean_vectors.at(id / designs.size());
        c.policy = designs.at(id % designs.size());
        c.family_alpha = family_alpha;
        c.replications = replications;
        c.seed = seed;
        return c;
    }
};

struct CellResult {
    int scenario_id = 0;
    TrialConfig config;
    std::optional<OperatingCharacteristics> oc;   // empty for an error cell
    std::string error;
};

inline std::vector<CellResult> run_scenario_grid(const ScenarioGrid& grid, const IndexTable& table,
                                                 int workers = 1) {
    std::vector<CellResult> out;
    out.reserve(grid.size());
    for (std::size_t id = 0; id < grid.size(); ++id) {
        CellResult cell;
        cell.scenario_id = static_cast<int>(id);
        cell.config = grid.cell_config(id);
        try {
            if (cell.config.arms() != grid.arms) {
                throw std::invalid_argument("means vector has " +
                                            std::to_string(cell.config.arms()) +
                                            " entries, expected " + std::to_string(grid.arms));
            }
            cell.config.validate();
            if (cell.config.policy.is_gittins()) (void)table.curve(cell.config.policy.discount);
        } catch (const std::exception& e) {
            throw CellError(cell.scenario_id, e.what());
        }
        try {
            cell.oc = aggregate(simulate(cell.config, table, workers), cell.config);
        } catch (const EmptyArmError& e) {
            cell.error = e.what();
        }
        out.push_back(std::move(cell));
    }
    return out;
}

}  // namespace gittins_exp
