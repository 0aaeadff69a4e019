#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "riffshuffle/params.hpp"

namespace riffshuffle {

// Masses for m above this threshold are evaluated through the log-space
// path; below it, by direct products. Both paths stay exercised by tests.
inline constexpr int direct_pmf_max_m = 50;

// Relative tolerance on ratio(k) vs 1 for detecting a two-mode tie in
// floating point. Exact ties are decided by the rational oracle.
inline constexpr double mode_tie_rel_tol = 1e-9;

namespace detail {

inline double log_sum_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

// ln binom(m+k-1, k) via log-gamma
inline double log_binom(int m, int k) {
    return std::lgamma(double(m) + double(k)) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(m));
}

// ln(p^m q^x + q^m p^x), stable for large exponents
inline double log_power_sum(const params& par, double x) {
    const double lp = std::log(par.p);
    const double lq = std::log(par.q);
    return log_sum_exp(par.m * lp + x * lq, par.m * lq + x * lp);
}

// ln of the defining formula at any index k >= 0
inline double log_mass(const params& par, int k) {
    return log_binom(par.m, k) + log_power_sum(par, double(k));
}

inline double direct_mass(const params& par, int k) {
    double binom = 1.0;
    for (int i = 1; i <= k; ++i) binom *= double(par.m + i - 1) / double(i);
    const double sum = std::pow(par.p, par.m) * std::pow(par.q, k) +
                       std::pow(par.q, par.m) * std::pow(par.p, k);
    return binom * sum;
}

// Single evaluation path shared by pmf and extended_pmf.
inline double mass(const params& par, int k) {
    if (par.m <= direct_pmf_max_m) return direct_mass(par, k);
    return std::exp(log_mass(par, k));
}

inline void require_support(const params& par, int k, const char* who) {
    if (k < 0 || k > par.m - 1) {
        throw std::out_of_range(std::string(who) + ": index k=" + std::to_string(k) +
                                " outside support [0, " + std::to_string(par.m - 1) + "]");
    }
}

}  // namespace detail

// f_k = binom(m+k-1, k) (p^m q^k + q^m p^k) on the support k = 0..m-1.
inline double pmf(const params& par, int k) {
    detail::require_support(par, k, "pmf");
    return detail::mass(par, k);
}

// The same formula for any k >= 0. Coincides with pmf on the support;
// for k >= m it is positive but not a probability mass.
inline double extended_pmf(const params& par, int k) {
    if (k < 0) throw std::out_of_range("extended_pmf: k must be >= 0, got " + std::to_string(k));
    return detail::mass(par, k);
}

// ln f_k via log-gamma and log-sum-exp.
inline double log_pmf(const params& par, int k) {
    detail::require_support(par, k, "log_pmf");
    return detail::log_mass(par, k);
}

struct pmf_table {
    params par;
    std::vector<double> mass;
    std::vector<double> cumulative;
};

inline pmf_table make_pmf_table(const params& par) {
    pmf_table t{par, {}, {}};
    t.mass.resize(size_t(par.m));
    t.cumulative.resize(size_t(par.m));
    double acc = 0.0;
    for (int k = 0; k < par.m; ++k) {
        t.mass[size_t(k)] = detail::mass(par, k);
        acc += t.mass[size_t(k)];
        t.cumulative[size_t(k)] = acc;
    }
    return t;
}

inline double cdf(const params& par, int k) {
    detail::require_support(par, k, "cdf");
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += detail::mass(par, j);
    return acc;
}

struct dist_moments {
    double mean;
    double variance;
};

inline dist_moments moments(const params& par) {
    double mean = 0.0, second = 0.0;
    for (int k = 0; k < par.m; ++k) {
        const double f = detail::mass(par, k);
        mean += k * f;
        second += double(k) * double(k) * f;
    }
    return {mean, std::max(0.0, second - mean * mean)};
}

// h(x) = p^m q^x + q^m p^x. May underflow to 0 for extreme m; the ratio
// and g evaluations below work on log-space differences instead.
inline double h_func(const params& par, double x) {
    if (!std::isfinite(x)) throw std::domain_error("h_func: x must be finite");
    if (par.m <= direct_pmf_max_m) {
        return std::pow(par.p, par.m) * std::pow(par.q, x) +
               std::pow(par.q, par.m) * std::pow(par.p, x);
    }
    return std::exp(detail::log_power_sum(par, x));
}

inline double log_h_func(const params& par, double x) {
    if (!std::isfinite(x)) throw std::domain_error("log_h_func: x must be finite");
    return detail::log_power_sum(par, x);
}

// f_{k+1}/f_k by the factored formula ((k+m)/(k+1)) h(k+1)/h(k),
// never by dividing two pmf values.
inline double ratio(const params& par, int k) {
    if (k < 0 || k > par.m - 2) {
        throw std::out_of_range("ratio: k=" + std::to_string(k) + " outside [0, " +
                                std::to_string(par.m - 2) + "]");
    }
    const double log_h_step =
        detail::log_power_sum(par, double(k) + 1.0) - detail::log_power_sum(par, double(k));
    return (double(k) + par.m) / (double(k) + 1.0) * std::exp(log_h_step);
}

// g(x) = h(x)/h(x+1) - (x+m)/(x+1). For integer k in [0, m-2],
// g(k) >= 0 iff f_{k+1} <= f_k. The domain is empty for m = 1.
inline double g_func(const params& par, double x) {
    if (par.m < 2) throw std::domain_error("g_func: requires m >= 2");
    if (!std::isfinite(x) || x < 0.0) throw std::domain_error("g_func: x must be finite and >= 0");
    const double log_h_step = detail::log_power_sum(par, x) - detail::log_power_sum(par, x + 1.0);
    return std::exp(log_h_step) - (x + par.m) / (x + 1.0);
}

struct mode_result {
    std::vector<int> modes;                 // argmax indices, 1 or 2 adjacent
    std::optional<int> first_descent;       // smallest k with f_{k+1} <= f_k
};

namespace detail {

inline bool is_tie(double r) { return std::fabs(r - 1.0) <= mode_tie_rel_tol; }

inline mode_result mode_from_descent(const params& par, int l) {
    if (l >= par.m - 1) return {{par.m - 1}, std::nullopt};  // strictly increasing throughout
    const double r = ratio(par, l);
    if (is_tie(r)) return {{l, l + 1}, l};
    return {{l}, l};
}

}  // namespace detail

// Linear scan of ratio(k) from k = 0, stopping at the first descent.
// Descent persistence makes the early stop sound.
inline mode_result mode(const params& par) {
    if (par.m == 1) return {{0}, std::nullopt};
    for (int k = 0; k <= par.m - 2; ++k) {
        if (ratio(par, k) <= 1.0 + mode_tie_rel_tol) return detail::mode_from_descent(par, k);
    }
    return {{par.m - 1}, std::nullopt};
}

// Binary-search variant. {k : g(k) >= 0} is a suffix of [0, m-2]
// (g is concave and g(m-2) >= 0), so the first descent can be located
// by bisection. Cross-checked against the linear scan, not trusted alone.
inline mode_result mode_binary_search(const params& par) {
    if (par.m == 1) return {{0}, std::nullopt};
    int lo = 0, hi = par.m - 1;  // search first k in [0, m-2] with ratio <= 1+tol; m-1 = none
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (ratio(par, mid) <= 1.0 + mode_tie_rel_tol) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return detail::mode_from_descent(par, lo);
}

// Shape classification of the mass sequence: strictly increasing ascent,
// a plateau of at most two adjacent maxima, strictly decreasing descent.
struct shape_report {
    int ascent_end;            // index of the first mode
    std::vector<int> modes;
    int descent_start;         // index of the last mode
    bool is_unimodal;
};

// Floating-point shape check over log-masses with the mode tie tolerance.
// Verifies descent persistence: no re-ascent after the first descent.
inline shape_report check_shape(const params& par) {
    const int m = par.m;
    if (m == 1) return {0, {0}, 0, true};

    std::vector<double> lm(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) lm[size_t(k)] = detail::log_mass(par, k);

    const double log_tie = std::log1p(mode_tie_rel_tol);
    int a = m - 1;  // first k with lm[k+1] <= lm[k] + tie
    for (int k = 0; k + 1 < m; ++k) {
        if (lm[size_t(k) + 1] <= lm[size_t(k)] + log_tie) {
            a = k;
            break;
        }
    }
    const bool tie_at_a = a < m - 1 && std::fabs(lm[size_t(a) + 1] - lm[size_t(a)]) <= log_tie;
    const int b = tie_at_a ? a + 1 : a;

    bool ok = true;
    for (int k = 0; k < a && ok; ++k) ok = lm[size_t(k) + 1] > lm[size_t(k)];          // strict ascent
    for (int k = b; k + 1 < m && ok; ++k) ok = lm[size_t(k) + 1] < lm[size_t(k)] + log_tie;  // no re-ascent

    shape_report rep{a, {}, b, ok};
    rep.modes.push_back(a);
    if (b != a) rep.modes.push_back(b);
    return rep;
}

}  // namespace riffshuffle
