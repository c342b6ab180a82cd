#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gittins_exp {

/// Exact test for the ratio of two exponential means collapsed to a sample
/// with no usable denominator.
class DegenerateRatioError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
inline double beta_continued_fraction(double x, double a, double b) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge (a = " +
                             std::to_string(a) + ", b = " + std::to_string(b) + ")");
}

// x^a (1-x)^b / (a B(a, b))
inline double beta_prefactor(double x, double a, double b) {
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    return std::exp(log_front) / a;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double reg_inc_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("reg_inc_beta requires a > 0 and b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("reg_inc_beta requires 0 <= x <= 1");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return detail::beta_prefactor(x, a, b) * detail::beta_continued_fraction(x, a, b);
    }
    return 1.0 - detail::beta_prefactor(1.0 - x, b, a) *
                     detail::beta_continued_fraction(1.0 - x, b, a);
}

/// CDF of the F(df1, df2) distribution.
inline double f_cdf(double f, double df1, double df2) {
    if (!(f >= 0.0)) throw std::domain_error("f_cdf requires f >= 0");
    if (!(df1 >= 1.0) || !(df2 >= 1.0)) {
        throw std::domain_error("f_cdf requires df1, df2 >= 1");
    }
    if (std::isinf(f)) return 1.0;
    const double x = df1 * f / (df1 * f + df2);
    return reg_inc_beta(x, 0.5 * df1, 0.5 * df2);
}

/// Upper tail 1 - f_cdf, evaluated without cancellation.
inline double f_sf(double f, double df1, double df2) {
    if (!(f >= 0.0)) throw std::domain_error("f_sf requires f >= 0");
    if (!(df1 >= 1.0) || !(df2 >= 1.0)) {
        throw std::domain_error("f_sf requires df1, df2 >= 1");
    }
    if (std::isinf(f)) return 0.0;
    const double y = df2 / (df1 * f + df2);
    return reg_inc_beta(y, 0.5 * df2, 0.5 * df1);
}

struct TestResult {
    double f_stat = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p_value = 1.0;
    bool reject = false;
};

/// Two-sided test of H0: mu_1 = mu_0 for exponential samples.
///
/// The ratio of sample means (group 1 over group 0) is F(2 n1, 2 n0) under H0.
/// The p-value doubles the smaller tail.
inline TestResult exp_ratio_test(double sum1, int n1, double sum0, int n0, double cutoff) {
    if (n1 < 1 || n0 < 1) {
        throw std::invalid_argument("exp_ratio_test: both groups need at least one observation");
    }
    if (!(sum1 >= 0.0) || !(sum0 >= 0.0)) {
        throw std::invalid_argument("exp_ratio_test: outcome sums must be non-negative");
    }
    if (sum0 == 0.0) {
        throw DegenerateRatioError("exp_ratio_test: control sum is zero, ratio undefined");
    }
    TestResult r;
    r.f_stat = (sum1 / n1) / (sum0 / n0);
    r.df1 = 2 * n1;
    r.df2 = 2 * n0;
    const double lower = f_cdf(r.f_stat, r.df1, r.df2);
    const double upper = f_sf(r.f_stat, r.df1, r.df2);
    r.p_value = std::clamp(2.0 * std::min(lower, upper), 0.0, 1.0);
    r.reject = r.p_value < cutoff;
    return r;
}

inline double bonferroni_alpha(double family_alpha, int comparisons) {
    if (comparisons < 1) {
        throw std::invalid_argument("bonferroni_alpha: comparisons must be >= 1");
    }
    return family_alpha / comparisons;
}

}  // namespace gittins_exp
