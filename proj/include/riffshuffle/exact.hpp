#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "riffshuffle/distribution.hpp"
#include "riffshuffle/params.hpp"

namespace riffshuffle::exact {

using big_int = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;  // lowest terms, positive denominator

// Parses "a/b" or a bare integer. Floating-point strings are rejected;
// a double is never silently promoted to a rational.
inline rational parse_rational(std::string_view s) {
    const auto bad = [&] {
        return std::domain_error("parse_rational: expected \"a/b\" or integer, got \"" +
                                 std::string(s) + "\"");
    };
    if (s.empty()) throw bad();
    const auto slash = s.find('/');
    const auto is_int = [](std::string_view t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    if (slash == std::string_view::npos) {
        if (!is_int(s)) throw bad();
        return rational(big_int(std::string(s)));
    }
    const std::string_view num = s.substr(0, slash);
    const std::string_view den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) throw bad();
    const big_int d{std::string(den)};
    if (d == 0) throw std::domain_error("parse_rational: zero denominator in \"" + std::string(s) + "\"");
    return rational(big_int(std::string(num)), d);
}

struct exact_params {
    rational p;
    rational q;  // exactly 1 - p
    int m;

    exact_params(rational p_, int m_) : p(std::move(p_)), q(1 - p), m(m_) {
        if (p <= 0 || p >= 1) throw std::domain_error("exact_params: p must lie in (0, 1)");
        if (m_ < 1) throw std::domain_error("exact_params: m must be a positive integer");
    }
};

namespace detail {

inline rational pow_rat(const rational& base, int e) {
    rational r = 1;
    rational b = base;
    int n = e;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

}  // namespace detail

// binom(m+k-1, k) by the exact multiplicative recurrence
// binom(m+k-1, k) = binom(m+k-2, k-1) * (m+k-1) / k.
inline big_int binomial(int m, int k) {
    big_int b = 1;
    for (int i = 1; i <= k; ++i) {
        b *= (m + i - 1);
        b /= i;
    }
    return b;
}

// Exact mass at any index k >= 0 (k >= m gives the extended formula value).
inline rational extended_pmf(const exact_params& ep, int k) {
    if (k < 0) throw std::out_of_range("exact::extended_pmf: k must be >= 0");
    const rational sum = detail::pow_rat(ep.p, ep.m) * detail::pow_rat(ep.q, k) +
                         detail::pow_rat(ep.q, ep.m) * detail::pow_rat(ep.p, k);
    return rational(binomial(ep.m, k)) * sum;
}

// Masses f_0..f_{count-1}; count = m gives the pmf, count = m+1 appends
// the extended value at k = m.
inline std::vector<rational> masses_up_to(const exact_params& ep, int count) {
    std::vector<rational> mass;
    mass.reserve(size_t(count));
    big_int binom = 1;
    rational t1 = detail::pow_rat(ep.p, ep.m);  // p^m q^k
    rational t2 = detail::pow_rat(ep.q, ep.m);  // q^m p^k
    for (int k = 0; k < count; ++k) {
        if (k > 0) {
            binom *= (ep.m + k - 1);
            binom /= k;
        }
        mass.push_back(rational(binom) * (t1 + t2));
        t1 *= ep.q;
        t2 *= ep.p;
    }
    return mass;
}

struct exact_pmf_table {
    std::vector<rational> mass;
};

inline exact_pmf_table pmf_table(const exact_params& ep) { return {masses_up_to(ep, ep.m)}; }

inline bool verify_normalization(const exact_params& ep) {
    rational sum = 0;
    for (const auto& f : masses_up_to(ep, ep.m)) sum += f;
    return sum == 1;
}

struct violation_report {
    int k_lo;
    int k_hi;
    std::optional<int> first_violation;  // smallest k with f_k^2 < f_{k-1} f_{k+1}
    bool used_extended;
};

// Checks f_k^2 >= f_{k-1} f_{k+1} for k in [1, m-2], and additionally at
// k = m-1 against the extended value at index m when include_extended is set.
inline violation_report log_concavity_scan(const exact_params& ep, bool include_extended) {
    const int m = ep.m;
    if (include_extended ? m < 2 : m < 3) {
        throw std::domain_error("exact::log_concavity_scan: m too small for requested range");
    }
    const int k_hi = include_extended ? m - 1 : m - 2;
    const auto mass = masses_up_to(ep, include_extended ? m + 1 : m);
    violation_report rep{1, k_hi, std::nullopt, include_extended};
    for (int k = 1; k <= k_hi; ++k) {
        if (mass[size_t(k)] * mass[size_t(k)] < mass[size_t(k) - 1] * mass[size_t(k) + 1]) {
            rep.first_violation = k;
            break;
        }
    }
    return rep;
}

// Exact shape classification. is_unimodal is expected to hold for every
// valid parameter pair; a false value means a genuine counterexample.
inline shape_report unimodality_check(const exact_params& ep) {
    const auto mass = masses_up_to(ep, ep.m);
    const int m = ep.m;
    int a = m - 1;
    for (int k = 0; k + 1 < m; ++k) {
        if (mass[size_t(k) + 1] <= mass[size_t(k)]) {
            a = k;
            break;
        }
    }
    const bool tie = a + 1 < m && mass[size_t(a) + 1] == mass[size_t(a)];
    const int b = tie ? a + 1 : a;

    bool ok = true;
    for (int k = 0; k < a && ok; ++k) ok = mass[size_t(k) + 1] > mass[size_t(k)];
    for (int k = b; k + 1 < m && ok; ++k) ok = mass[size_t(k) + 1] < mass[size_t(k)];

    shape_report rep{a, {}, b, ok};
    rep.modes.push_back(a);
    if (b != a) rep.modes.push_back(b);
    return rep;
}

// g(k) = h(k)/h(k+1) - (k+m)/(k+1) as an exact rational, for integer k.
// The domain is empty for m = 1.
inline rational g_value(const exact_params& ep, int k) {
    if (ep.m < 2) throw std::domain_error("exact::g_value: requires m >= 2");
    if (k < 0) throw std::out_of_range("exact::g_value: k must be >= 0");
    const auto h = [&](int x) {
        return detail::pow_rat(ep.p, ep.m) * detail::pow_rat(ep.q, x) +
               detail::pow_rat(ep.q, ep.m) * detail::pow_rat(ep.p, x);
    };
    return h(k) / h(k + 1) - rational(k + ep.m, k + 1);
}

// Nearest-double conversion with ~1 ulp accuracy: scale the quotient in
// integer arithmetic so it carries at least 80 significant bits, convert,
// then rescale.
inline double to_double(const rational& r) {
    const big_int num = boost::multiprecision::numerator(r);
    const big_int den = boost::multiprecision::denominator(r);
    if (num == 0) return 0.0;
    const bool neg = num < 0;
    const big_int abs_num = boost::multiprecision::abs(num);
    const long bits_num = long(boost::multiprecision::msb(abs_num));
    const long bits_den = long(boost::multiprecision::msb(den));
    const long shift = 80 + std::max(0L, bits_den - bits_num);
    const big_int scaled = (abs_num << shift) / den;
    const double d = std::ldexp(scaled.convert_to<double>(), int(-shift));
    return neg ? -d : d;
}

// ln of a positive big integer, accurate to ~1e-13 absolute even for
// multi-thousand-bit arguments.
inline double log_big(const big_int& x) {
    if (x <= 0) throw std::domain_error("exact::log_big: argument must be positive");
    const auto b = boost::multiprecision::msb(x);
    if (b < 53) return std::log(x.convert_to<double>());
    const big_int top = x >> (b - 52);
    return std::log(top.convert_to<double>()) + double(b - 52) * std::numbers::ln2;
}

// ln of a positive rational.
inline double log_value(const rational& r) {
    const big_int num = boost::multiprecision::numerator(r);
    const big_int den = boost::multiprecision::denominator(r);
    if (num <= 0) throw std::domain_error("exact::log_value: argument must be positive");
    return log_big(num) - log_big(den);
}

// Max over k of |floating pmf(k) - exact mass rounded to nearest double|.
inline double float_error(const exact_params& ep) {
    const params par(to_double(ep.p), ep.m);
    const auto mass = masses_up_to(ep, ep.m);
    double worst = 0.0;
    for (int k = 0; k < ep.m; ++k) {
        worst = std::max(worst, std::fabs(pmf(par, k) - to_double(mass[size_t(k)])));
    }
    return worst;
}

// Exact mode set, for cross-checking the floating-point mode search.
inline std::vector<int> mode_set(const exact_params& ep) {
    const auto rep = unimodality_check(ep);
    return rep.modes;
}

// The floating-point mode scan replayed in exact arithmetic: stop at the
// first k with f_{k+1} <= f_k (1 + tol), report a two-index tie when
// f_{k+1} >= f_k (1 - tol). Quasi-ties with a relative gap below tol are
// deliberately reported as two modes, exactly as the double scan does; the
// strict argmax is mode_set().
inline std::vector<int> mode_set_with_tolerance(const exact_params& ep, const rational& rel_tol) {
    const auto mass = masses_up_to(ep, ep.m);
    const rational hi = 1 + rel_tol;
    const rational lo = 1 - rel_tol;
    for (int k = 0; k + 1 < ep.m; ++k) {
        if (mass[size_t(k) + 1] <= mass[size_t(k)] * hi) {
            if (mass[size_t(k) + 1] >= mass[size_t(k)] * lo) return {k, k + 1};
            return {k};
        }
    }
    return {ep.m - 1};
}

inline std::string to_fraction_string(const rational& r) {
    const big_int num = boost::multiprecision::numerator(r);
    const big_int den = boost::multiprecision::denominator(r);
    return num.str() + "/" + den.str();
}

}  // namespace riffshuffle::exact
