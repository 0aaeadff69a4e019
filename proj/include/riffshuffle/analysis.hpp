#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "riffshuffle/distribution.hpp"
#include "riffshuffle/exact.hpp"
#include "riffshuffle/params.hpp"

namespace riffshuffle::analysis {

namespace detail {

// ln(e^a - e^b) for a > b
inline double log_diff_exp(double a, double b) { return a + std::log1p(-std::exp(b - a)); }

}  // namespace detail

// Closed form of d^2/dx^2 [h(x)/h(x+1)]:
//   (q-p)(ln p - ln q)^2 p^{m+x} q^{m+x} (p^m q^{x+1} - p^{x+1} q^m)
//   ----------------------------------------------------------------
//                     (p^m q^{x+1} + p^{x+1} q^m)^3
// Assembled in log space; the sign comes from (q-p) and the power difference.
inline double d2_ratio_closed_form(const params& par, double x) {
    if (!std::isfinite(x) || x < 0.0) {
        throw std::domain_error("d2_ratio_closed_form: x must be finite and >= 0");
    }
    if (par.p == par.q) return 0.0;
    const double lp = std::log(par.p);
    const double lq = std::log(par.q);
    const double a = par.m * lp + (x + 1.0) * lq;  // ln p^m q^{x+1}
    const double b = (x + 1.0) * lp + par.m * lq;  // ln p^{x+1} q^m
    if (a == b) return 0.0;
    const int sign = (par.q > par.p ? 1 : -1) * (a > b ? 1 : -1);
    const double log_abs_diff = a > b ? detail::log_diff_exp(a, b) : detail::log_diff_exp(b, a);
    const double log_den = 3.0 * riffshuffle::detail::log_sum_exp(a, b);
    const double log_mag = std::log(std::fabs(par.q - par.p)) + 2.0 * std::log(std::fabs(lp - lq)) +
                           (par.m + x) * (lp + lq) + log_abs_diff - log_den;
    return sign * std::exp(log_mag);
}

struct concavity_report {
    std::vector<double> grid;
    double max_second_difference;
    bool is_concave;  // max second difference <= tolerance
};

inline constexpr double concavity_tol = 1e-12;

// Second differences of g on an equispaced grid over [0, m-2]; all must be
// <= concavity_tol for a concave function.
inline concavity_report check_g_concavity(const params& par, int n_points) {
    if (par.m < 2) throw std::domain_error("check_g_concavity: requires m >= 2");
    if (n_points < 3) throw std::domain_error("check_g_concavity: requires n_points >= 3");
    concavity_report rep{{}, 0.0, true};
    rep.grid.resize(size_t(n_points));
    const double hi = double(par.m) - 2.0;
    const double step = hi / double(n_points - 1);
    std::vector<double> gv(static_cast<size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        rep.grid[size_t(i)] = step * i;
        gv[size_t(i)] = g_func(par, step * i);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < n_points; ++i) {
        worst = std::max(worst, gv[size_t(i) - 1] - 2.0 * gv[size_t(i)] + gv[size_t(i) + 1]);
    }
    rep.max_second_difference = n_points > 2 ? worst : 0.0;
    rep.is_concave = rep.max_second_difference <= concavity_tol;
    return rep;
}

// g(m-2) = (1/p^2 + 1/q^2)/(1/p + 1/q) - 2; zero at p = 1/2, positive otherwise.
inline double g_boundary(const params& par) {
    if (par.m < 2) throw std::domain_error("g_boundary: requires m >= 2");
    const double ip = 1.0 / par.p;
    const double iq = 1.0 / par.q;
    return (ip * ip + iq * iq) / (ip + iq) - 2.0;
}

// Both sides of the simplified form of f_{m-1}^2 >= f_{m-2} f~_m (the
// log-concavity condition at the top index, binomials cancelled):
//   lhs = 2(2m-1)(m-1)(pq)^{2m-1}
//         + (m-1)(p^{2m} q^{2m-2} + 2(pq)^{2m-1} + p^{2m-2} q^{2m})
//   rhs = (2m-1)(m-1)(p/q + q/p)(pq)^{2m-1}
struct boundary_sides {
    double lhs;
    double rhs;
    bool holds;  // lhs >= rhs
};

inline boundary_sides log_concavity_boundary_sides(const params& par) {
    if (par.m < 2) throw std::domain_error("log_concavity_boundary_sides: requires m >= 2");
    const double lp = std::log(par.p);
    const double lq = std::log(par.q);
    const double m = par.m;
    const double log_x = (2.0 * m - 1.0) * (lp + lq);  // ln (pq)^{2m-1}
    using riffshuffle::detail::log_sum_exp;
    double log_lhs = std::log(2.0 * (2.0 * m - 1.0) * (m - 1.0)) + log_x;
    log_lhs = log_sum_exp(log_lhs, std::log(m - 1.0) + 2.0 * m * lp + (2.0 * m - 2.0) * lq);
    log_lhs = log_sum_exp(log_lhs, std::log(2.0 * (m - 1.0)) + log_x);
    log_lhs = log_sum_exp(log_lhs, std::log(m - 1.0) + (2.0 * m - 2.0) * lp + 2.0 * m * lq);
    const double log_rhs = std::log((2.0 * m - 1.0) * (m - 1.0)) +
                           std::log(par.p / par.q + par.q / par.p) + log_x;
    boundary_sides out{std::exp(log_lhs), std::exp(log_rhs), false};
    out.holds = log_lhs >= log_rhs;
    return out;
}

struct exact_boundary_sides {
    exact::rational lhs;
    exact::rational rhs;
    bool holds;
};

// Exact flavor; inequality signs near the threshold m are decided by tiny
// margins, so scans use this form.
inline exact_boundary_sides
log_concavity_boundary_sides(const exact::exact_params& ep) {
    if (ep.m < 2) throw std::domain_error("log_concavity_boundary_sides: requires m >= 2");
    using exact::rational;
    const int m = ep.m;
    const rational x = exact::detail::pow_rat(ep.p * ep.q, 2 * m - 1);
    const rational lhs = rational(2 * (2 * m - 1) * (m - 1)) * x +
                         rational(m - 1) * (exact::detail::pow_rat(ep.p, 2 * m) *
                                                exact::detail::pow_rat(ep.q, 2 * m - 2) +
                                            2 * x +
                                            exact::detail::pow_rat(ep.p, 2 * m - 2) *
                                                exact::detail::pow_rat(ep.q, 2 * m));
    const rational rhs = rational((2 * m - 1) * (m - 1)) * (ep.p / ep.q + ep.q / ep.p) * x;
    return {lhs, rhs, lhs >= rhs};
}

struct scaled_sides {
    double lhs_scaled;
    double rhs_scaled;
};

// Both sides divided by m^2 (pq)^{2m-1}, in log space to dodge underflow.
// As m grows these tend to 4 and 2(p/q + q/p).
inline scaled_sides asymptotic_scaled_sides(const params& par) {
    if (par.m < 2) throw std::domain_error("asymptotic_scaled_sides: requires m >= 2");
    const double lp = std::log(par.p);
    const double lq = std::log(par.q);
    const double m = par.m;
    const double log_x = (2.0 * m - 1.0) * (lp + lq);
    const double log_scale = 2.0 * std::log(m) + log_x;
    using riffshuffle::detail::log_sum_exp;
    double log_lhs = std::log(2.0 * (2.0 * m - 1.0) * (m - 1.0)) + log_x;
    log_lhs = log_sum_exp(log_lhs, std::log(m - 1.0) + 2.0 * m * lp + (2.0 * m - 2.0) * lq);
    log_lhs = log_sum_exp(log_lhs, std::log(2.0 * (m - 1.0)) + log_x);
    log_lhs = log_sum_exp(log_lhs, std::log(m - 1.0) + (2.0 * m - 2.0) * lp + 2.0 * m * lq);
    const double log_rhs = std::log((2.0 * m - 1.0) * (m - 1.0)) +
                           std::log(par.p / par.q + par.q / par.p) + log_x;
    return {std::exp(log_lhs - log_scale), std::exp(log_rhs - log_scale)};
}

// k(m+k)/((k+1)(m+k-1)): the reduced log-concavity condition at p = 1/2
// asks this to be <= 1.
inline double p_half_ratio_bound(long long m, long long k) {
    if (m < 2) throw std::domain_error("p_half_ratio_bound: requires m >= 2");
    if (k < 1 || k > m - 1) throw std::domain_error("p_half_ratio_bound: requires 1 <= k <= m-1");
    return double(k) * double(m + k) / (double(k + 1) * double(m + k - 1));
}

// True iff f_{m-1}^2 < f_{m-2} f~_m with f~ the extended formula value,
// decided in exact arithmetic.
inline bool extended_index_violation(const exact::exact_params& ep) {
    if (ep.m < 2) throw std::domain_error("extended_index_violation: requires m >= 2");
    const auto mass = exact::masses_up_to(ep, ep.m + 1);
    const size_t top = size_t(ep.m) - 1;
    return mass[top] * mass[top] < mass[top - 1] * mass[top + 1];
}

// Smallest m in [2, m_max] whose extended-index check fails, or nullopt.
inline std::optional<int> min_m_extended_violation(const exact::rational& p, int m_max) {
    if (p <= 0 || p >= 1) throw std::domain_error("min_m_extended_violation: p must lie in (0, 1)");
    if (m_max < 2) throw std::domain_error("min_m_extended_violation: requires m_max >= 2");
    for (int m = 2; m <= m_max; ++m) {
        if (extended_index_violation(exact::exact_params(p, m))) return m;
    }
    return std::nullopt;
}

}  // namespace riffshuffle::analysis
