#pragma once

#include <stdexcept>

#include "gittins_exp/index_table.hpp"

namespace gittins_exp {

/// Number of prior pseudo-observations every arm starts with.
inline constexpr int kPriorPseudoCount = 2;

/// Bayesian state of one arm under the implicit two-pseudo-observation prior.
///
/// `pseudo_n` counts prior pseudo-observations plus real outcomes, and
/// `total_sum` includes the prior pseudo-sum 2 * mu_prior. `cached_gi` is only
/// refreshed when this arm is observed, so it goes stale while other arms are
/// being allocated.
struct ArmState {
    int pseudo_n = kPriorPseudoCount;
    double total_sum = 0.0;
    int allocated = 0;
    double cached_gi = 0.0;

    double posterior_mean() const noexcept { return total_sum / pseudo_n; }
};

inline ArmState init_arm(double mu_prior, const IndexCurve& curve) {
    if (!(mu_prior > 0.0)) {
        throw std::invalid_argument("prior mean must be positive");
    }
    ArmState s;
    s.pseudo_n = kPriorPseudoCount;
    s.total_sum = kPriorPseudoCount * mu_prior;
    s.allocated = 0;
    s.cached_gi = mu_prior * curve.value(kPriorPseudoCount);
    return s;
}

inline ArmState init_arm(double mu_prior, const IndexTable& table, double discount) {
    return init_arm(mu_prior, table.curve(discount));
}

/// Folds one outcome into the arm and recomputes its index from the new
/// posterior mean and pseudo-count.
[[nodiscard]] inline ArmState observe(ArmState s, double outcome, const IndexCurve& curve) {
    if (!(outcome >= 0.0)) {
        throw std::invalid_argument("outcome must be non-negative");
    }
    s.pseudo_n += 1;
    s.total_sum += outcome;
    s.allocated += 1;
    s.cached_gi = s.posterior_mean() * curve.value(s.pseudo_n);
    return s;
}

[[nodiscard]] inline ArmState observe(const ArmState& s, double outcome, const IndexTable& table,
                                      double discount) {
    return observe(s, outcome, table.curve(discount));
}

}  // namespace gittins_exp
