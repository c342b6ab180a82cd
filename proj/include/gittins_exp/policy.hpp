#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gittins_exp/arm_state.hpp"
#include "gittins_exp/random.hpp"

namespace gittins_exp {

enum class DesignKind { EqualRandomisation, ConstrainedGittins };

/// Allocation design: equal randomisation, or the Gittins-index rule with a
/// constraint factor k guaranteeing each arm at least floor(t/k) of the first t
/// allocations.
struct PolicySpec {
    DesignKind kind = DesignKind::EqualRandomisation;
    int k = 0;
    double discount = 0.0;
    double prior_mean = 0.0;

    static PolicySpec equal_randomisation() { return {}; }

    static PolicySpec constrained_gittins(int k, double discount, double prior_mean) {
        return {DesignKind::ConstrainedGittins, k, discount, prior_mean};
    }

    bool is_gittins() const noexcept { return kind == DesignKind::ConstrainedGittins; }

    /// "ER" or "GI:k", the token used in configuration files and result rows.
    std::string label() const { return is_gittins() ? "GI:" + std::to_string(k) : "ER"; }

    /// Checks M <= k <= N/M and the GI parameters. Throws std::invalid_argument.
    void validate(int arms, int horizon) const {
        if (!is_gittins()) return;
        if (k < arms || static_cast<long>(k) * arms > horizon) {
            throw std::invalid_argument(
                "constraint factor k = " + std::to_string(k) + " violates M <= k <= N/M (M = " +
                std::to_string(arms) + ", N = " + std::to_string(horizon) +
                ", N/M = " + std::to_string(static_cast<double>(horizon) / arms) + ")");
        }
        if (!(discount >= 0.0 && discount < 1.0)) {
            throw std::invalid_argument("discount must lie in [0, 1)");
        }
        if (!(prior_mean > 0.0)) {
            throw std::invalid_argument("prior mean must be positive");
        }
    }
};

inline std::size_t er_select(std::size_t arms, Rng& rng) {
    if (arms < 2) {
        throw std::invalid_argument("equal randomisation needs at least 2 arms");
    }
    return rng.uniform_index(arms);
}

/// Arms whose allocated count is below floor(t/k), ascending.
inline std::vector<std::size_t> deficient_arms(std::span<const int> counts, int t, int k) {
    const int threshold = t / k;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < threshold) out.push_back(i);
    }
    return out;
}

namespace detail {

template <typename Key>
std::size_t pick_extreme(std::size_t size, Key key, bool want_max, Rng& rng) {
    auto best = key(0);
    std::size_t n_ties = 1;
    for (std::size_t i = 1; i < size; ++i) {
        const auto v = key(i);
        if (want_max ? v > best : v < best) {
            best = v;
            n_ties = 1;
        } else if (v == best) {
            ++n_ties;
        }
    }
    std::size_t pick = n_ties == 1 ? 0 : rng.uniform_index(n_ties);
    for (std::size_t i = 0; i < size; ++i) {
        if (key(i) == best && pick-- == 0) return i;
    }
    return size - 1;  // unreachable
}

}  // namespace detail

/// Next arm under the constrained Gittins rule.
///
/// While any arm is short of floor(t/k) allocations, the least-allocated arm is
/// chosen. Otherwise the arm with the largest cached index wins. Ties break
/// uniformly at random; the stream is only consumed when a tie occurs.
inline std::size_t gi_select(std::span<const ArmState> states, int t, const PolicySpec& spec,
                             Rng& rng) {
    if (states.empty()) {
        throw std::invalid_argument("gi_select needs at least one arm");
    }
    const int threshold = t / spec.k;
    bool deficient = false;
    for (const ArmState& s : states) {
        if (s.allocated < threshold) {
            deficient = true;
            break;
        }
    }
    if (deficient) {
        return detail::pick_extreme(
            states.size(), [&](std::size_t i) { return states[i].allocated; }, false, rng);
    }
    return detail::pick_extreme(
        states.size(), [&](std::size_t i) { return states[i].cached_gi; }, true, rng);
}

}  // namespace gittins_exp
