#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "riffshuffle/analysis.hpp"
#include "riffshuffle/distribution.hpp"
#include "riffshuffle/exact.hpp"
#include "riffshuffle/sampler.hpp"

// Verification suite: every property the library promises, run over fixed
// parameter grids with pinned tolerances and seeds. Shared by the CLI
// `verify` subcommand and the standalone acceptance runner.
namespace riffshuffle::verify {

struct options {
    bool quick = false;  // reduced grids and sample sizes for fast CI runs
};

struct criterion_result {
    int id;
    std::string name;
    bool passed;
    std::string detail;
    double seconds;
};

namespace detail {

using exact::rational;

inline std::vector<rational> tenths_grid() {
    std::vector<rational> g;
    for (int a = 1; a <= 9; ++a) g.emplace_back(a, 10);
    return g;
}

inline std::string fraction(const rational& r) { return exact::to_fraction_string(r); }

// 100 digits: at skewed parameters the second derivative drops to ~1e-46
// while h(x)/h(x+1) stays O(1), so a 50-digit difference quotient would
// bottom out at ~1e-42 of noise after the 1e8 amplification.
using mp_float = boost::multiprecision::cpp_bin_float_100;

inline mp_float h_mp(const params& par, const mp_float& x) {
    const mp_float p = par.p;
    const mp_float q = par.q;
    return pow(p, par.m) * pow(q, x) + pow(q, par.m) * pow(p, x);
}

// High-precision central second difference of h(x)/h(x+1); truncation
// O(step^2) is the only error left at this precision.
inline double fd_second_derivative(const params& par, double x, double step = 1e-4) {
    const auto r = [&](const mp_float& t) { return h_mp(par, t) / h_mp(par, t + 1); };
    const mp_float d = step;
    const mp_float v = (r(mp_float(x) + d) - 2 * r(mp_float(x)) + r(mp_float(x) - d)) / (d * d);
    return v.convert_to<double>();
}

inline int sign_of(const rational& r) {
    if (r > 0) return 1;
    if (r < 0) return -1;
    return 0;
}

}  // namespace detail

// 1. Exact pmf sums to exactly 1 across the rational grid.
inline criterion_result check_exact_normalization(const options& opt) {
    const int m_max = opt.quick ? 60 : 200;
    std::ostringstream msg;
    bool ok = true;
    int cells = 0;
    for (const auto& p : detail::tenths_grid()) {
        for (int m = 1; m <= m_max && ok; ++m) {
            ++cells;
            if (!exact::verify_normalization(exact::exact_params(p, m))) {
                ok = false;
                msg << "sum != 1 at p=" << detail::fraction(p) << " m=" << m;
            }
        }
    }
    if (ok) msg << cells << " exact tables sum to exactly 1 (m <= " << m_max << ")";
    return {1, "exact-normalization", ok, msg.str(), 0.0};
}

// 2. Unimodal shape with at most two adjacent modes and no re-ascent,
// floating grid and exact grid.
inline criterion_result check_unimodality(const options& opt) {
    const int m_max = opt.quick ? 60 : 200;
    const int p_step = opt.quick ? 5 : 1;
    std::ostringstream msg;
    bool ok = true;
    int cells = 0;

    for (int pi = 1; pi <= 99 && ok; pi += p_step) {
        const double p = pi / 100.0;
        for (int m = 1; m <= m_max && ok; ++m) {
            ++cells;
            const params par(p, m);
            const auto rep = check_shape(par);
            const bool adjacent = rep.modes.size() == 1 ||
                                  (rep.modes.size() == 2 && rep.modes[1] == rep.modes[0] + 1);
            const auto lin = mode(par);
            if (!rep.is_unimodal || !adjacent || lin.modes != rep.modes) {
                ok = false;
                msg << "floating shape violation at p=" << p << " m=" << m;
            }
        }
    }
    for (const auto& p : detail::tenths_grid()) {
        for (int m = 1; m <= m_max && ok; ++m) {
            ++cells;
            const auto rep = exact::unimodality_check(exact::exact_params(p, m));
            const bool adjacent = rep.modes.size() == 1 ||
                                  (rep.modes.size() == 2 && rep.modes[1] == rep.modes[0] + 1);
            if (!rep.is_unimodal || !adjacent) {
                ok = false;
                msg << "exact shape violation at p=" << detail::fraction(p) << " m=" << m;
            }
        }
    }
    if (ok) msg << cells << " cells unimodal with <= 2 adjacent modes, no re-ascent";
    return {2, "unimodality-shape", ok, msg.str(), 0.0};
}

// 3. p = 1/2: strictly increasing masses with an exact tie at the top.
inline criterion_result check_p_half_shape(const options& opt) {
    const int m_max = opt.quick ? 60 : 200;
    std::ostringstream msg;
    bool ok = true;
    for (int m = 2; m <= m_max && ok; ++m) {
        const auto t = exact::pmf_table(exact::exact_params(exact::rational(1, 2), m));
        for (int k = 0; k + 2 < m && ok; ++k) {
            if (!(t.mass[size_t(k)] < t.mass[size_t(k) + 1])) {
                ok = false;
                msg << "not strictly increasing at m=" << m << " k=" << k;
            }
        }
        if (ok && t.mass[size_t(m) - 2] != t.mass[size_t(m) - 1]) {
            ok = false;
            msg << "top masses differ at m=" << m;
        }
    }
    if (ok) msg << "strict ascent and exact top tie for 2 <= m <= " << m_max;
    return {3, "p-half-shape", ok, msg.str(), 0.0};
}

// 4. p = 1/2 is log-concave, extended index included.
inline criterion_result check_p_half_log_concavity(const options& opt) {
    const int m_max = opt.quick ? 60 : 200;
    std::ostringstream msg;
    bool ok = true;
    for (int m = 2; m <= m_max && ok; ++m) {
        const auto rep =
            exact::log_concavity_scan(exact::exact_params(exact::rational(1, 2), m), true);
        if (rep.first_violation) {
            ok = false;
            msg << "violation at m=" << m << " k=" << *rep.first_violation;
        }
    }
    if (ok) msg << "no violation for 2 <= m <= " << m_max << " including the extended index";
    return {4, "p-half-log-concavity", ok, msg.str(), 0.0};
}

// 5. For p != 1/2 the extended-index check eventually fails: pinned onsets
// for 1/10 and 3/10, and onset + recurrence across the twentieths grid.
inline criterion_result check_violation_onset(const options&) {
    using exact::rational;
    std::ostringstream msg;
    bool ok = true;

    const auto expect = [&](const rational& p, int want) {
        const auto got = analysis::min_m_extended_violation(p, 200);
        if (!got || *got != want) {
            ok = false;
            msg << "onset for p=" << detail::fraction(p) << " expected m=" << want;
        }
    };
    expect(rational(1, 10), 2);
    expect(rational(3, 10), 4);

    for (int a = 1; a <= 9 && ok; ++a) {
        const rational p(a, 20);
        const auto m_star = analysis::min_m_extended_violation(p, 200);
        if (!m_star) {
            ok = false;
            msg << "no violation up to m=200 for p=" << detail::fraction(p);
            break;
        }
        for (int bump : {10, 50}) {
            if (!analysis::extended_index_violation(exact::exact_params(p, *m_star + bump))) {
                ok = false;
                msg << "violation does not recur at m*=" << *m_star << "+" << bump
                    << " for p=" << detail::fraction(p);
            }
        }
    }
    if (ok) msg << "onsets pinned (1/10 -> 2, 3/10 -> 4); onset <= 200 and recurrence on a/20 grid";
    return {5, "log-concavity-violation-onset", ok, msg.str(), 0.0};
}

// 6. The simplified two-sided form agrees in sign with the defining-formula
// comparison at the extended index, exactly.
inline criterion_result check_boundary_form_equivalence(const options& opt) {
    const int m_max = opt.quick ? 40 : 100;
    std::ostringstream msg;
    bool ok = true;
    int cells = 0;
    for (const auto& p : detail::tenths_grid()) {
        for (int m = 2; m <= m_max && ok; ++m) {
            ++cells;
            const exact::exact_params ep(p, m);
            const auto sides = analysis::log_concavity_boundary_sides(ep);
            const auto mass = exact::masses_up_to(ep, m + 1);
            const exact::rational direct =
                mass[size_t(m) - 1] * mass[size_t(m) - 1] - mass[size_t(m) - 2] * mass[size_t(m)];
            if (detail::sign_of(sides.lhs - sides.rhs) != detail::sign_of(direct)) {
                ok = false;
                msg << "sign mismatch at p=" << detail::fraction(p) << " m=" << m;
            }
        }
    }
    if (ok) msg << "signs agree on " << cells << " cells (m <= " << m_max << ")";
    return {6, "boundary-form-equivalence", ok, msg.str(), 0.0};
}

// 7. Closed-form second derivative vs 50-digit central differences.
inline criterion_result check_second_derivative(const options&) {
    std::ostringstream msg;
    bool ok = true;
    int points = 0;
    for (double p : {0.1, 0.3, 0.45}) {
        for (int m : {5, 20, 50}) {
            const params par(p, m);
            for (int i = 0; i < 20 && ok; ++i) {
                const double x = (double(m) - 2.0) * i / 19.0;
                const double closed = analysis::d2_ratio_closed_form(par, x);
                if (closed > 0.0) {
                    ok = false;
                    msg << "positive second derivative at p=" << p << " m=" << m << " x=" << x;
                    break;
                }
                if (std::fabs(closed) < 1e-250) continue;
                ++points;
                const double fd = detail::fd_second_derivative(par, x);
                if (std::fabs(closed - fd) / std::fabs(closed) > 1e-5) {
                    ok = false;
                    msg << "finite-difference mismatch at p=" << p << " m=" << m << " x=" << x;
                }
            }
        }
    }
    if (ok) msg << points << " grid points within 1e-5 of central differences, all non-positive";
    return {7, "second-derivative-closed-form", ok, msg.str(), 0.0};
}

// 8. g concave on every tested grid; boundary value matches g(m-2), zero
// only at p = 1/2.
inline criterion_result check_g_concavity_and_boundary(const options&) {
    std::ostringstream msg;
    bool ok = true;
    double worst = -1.0;
    const std::vector<std::pair<double, int>> named = {{0.3, 10}, {0.5, 10}, {0.05, 50}};
    std::vector<std::tuple<double, int, int>> grids;
    for (auto [p, m] : named) grids.emplace_back(p, m, p == 0.05 ? 200 : 100);
    for (double p : {0.05, 0.1, 0.3, 0.45, 0.5, 0.55, 0.7, 0.95}) {
        for (int m : {2, 5, 10, 50, 100}) grids.emplace_back(p, m, 100);
    }
    for (const auto& [p, m, n] : grids) {
        const params par(p, m);
        const auto rep = analysis::check_g_concavity(par, n);
        worst = std::max(worst, rep.max_second_difference);
        if (!rep.is_concave) {
            ok = false;
            msg << "second difference " << rep.max_second_difference << " at p=" << p
                << " m=" << m;
            break;
        }
        const double boundary = analysis::g_boundary(par);
        const double direct = g_func(par, double(m) - 2.0);
        const double scale = std::max(std::fabs(boundary), 1e-30);
        if (std::fabs(boundary - direct) / scale > 1e-12 && std::fabs(boundary - direct) > 1e-14) {
            ok = false;
            msg << "boundary form mismatch at p=" << p << " m=" << m;
            break;
        }
        if (p == 0.5 ? boundary != 0.0 : !(boundary > 0.0)) {
            ok = false;
            msg << "boundary sign wrong at p=" << p << " m=" << m;
            break;
        }
    }
    if (ok) {
        msg << grids.size() << " grids concave (max second difference " << worst
            << "); boundary closed form checks out";
    }
    return {8, "g-concavity-and-boundary", ok, msg.str(), 0.0};
}

// 9. Scaled sides converge: at m = 400 the left side sits within 2% of 4 and
// the right within 2% of 2(p/q + q/p).
inline criterion_result check_asymptotic_scaling(const options&) {
    std::ostringstream msg;
    bool ok = true;
    for (double p : {0.1, 0.3, 0.5}) {
        const params par(p, 400);
        const auto s = analysis::asymptotic_scaled_sides(par);
        const double rhs_limit = 2.0 * (par.p / par.q + par.q / par.p);
        if (std::fabs(s.lhs_scaled - 4.0) / 4.0 > 0.02 ||
            std::fabs(s.rhs_scaled - rhs_limit) / rhs_limit > 0.02) {
            ok = false;
            msg << "scaled sides off limit at p=" << p;
        }
        if (p != 0.5 && !(s.lhs_scaled < s.rhs_scaled)) {
            ok = false;
            msg << "expected lhs < rhs at p=" << p << " m=400";
        }
    }
    if (ok) msg << "m=400 scaled sides within 2% of limits for p in {0.1, 0.3, 0.5}";
    return {9, "asymptotic-scaling", ok, msg.str(), 0.0};
}

// 10. Pinned-seed sampling: both mechanisms fit the exact pmf, and fit each
// other, at the spec'd thresholds.
inline criterion_result check_samplers(const options& opt) {
    const std::int64_t n = opt.quick ? 100000 : 1000000;
    std::ostringstream msg;
    bool ok = true;
    struct cell {
        exact::rational p;
        double pf;
        int m;
    };
    for (const auto& c : {cell{exact::rational(3, 10), 0.3, 5},
                          cell{exact::rational(1, 2), 0.5, 10}}) {
        const params par(c.pf, c.m);
        std::vector<double> probs;
        for (const auto& f : exact::masses_up_to(exact::exact_params(c.p, c.m), c.m)) {
            probs.push_back(exact::to_double(f));
        }
        sample_summary deck{{}, 0, mechanism::deck};
        sample_summary trials{{}, 0, mechanism::trials};
        for (auto mech : {mechanism::deck, mechanism::trials}) {
            const std::uint64_t seed = mech == mechanism::deck ? 42 : 1042;
            const auto s = empirical_pmf(par, n, seed, mech);
            (mech == mechanism::deck ? deck : trials) = s;
            const auto r = gof_statistics(s, probs);
            if (r.tv_distance > 0.005) {
                ok = false;
                msg << "tv=" << r.tv_distance << " for " << mechanism_name(mech)
                    << " at m=" << c.m << "; ";
            }
        }
        const auto ts = two_sample_chi_square(deck, trials);
        if (ts.chi_square >= chi_square_critical_999(ts.degrees_of_freedom)) {
            ok = false;
            msg << "two-sample chi-square " << ts.chi_square << " at m=" << c.m << "; ";
        }
    }
    if (ok) msg << "tv <= 0.005 and two-sample chi-square below the 99.9% line at n=" << n;
    return {10, "sampler-goodness-of-fit", ok, msg.str(), 0.0};
}

// 11. Floating point vs the exact oracle: pmf error, mode sets, and the
// binary-search mode variant. Mode sets are compared under the library's
// published tie tolerance, replayed in exact arithmetic: a relative gap
// below 1e-9 is a tie to the double scan by contract (at p=1/10, m=19 the
// true gap is 5.3e-17 -- no double implementation can split it). The strict
// exact argmax must always be contained in the reported mode set.
inline criterion_result check_float_vs_exact(const options& opt) {
    const int m_max = opt.quick ? 40 : 100;
    const exact::rational tie_tol(1, 1000000000);  // matches mode_tie_rel_tol
    std::ostringstream msg;
    bool ok = true;
    double worst = 0.0;
    for (const auto& p : detail::tenths_grid()) {
        for (int m = 1; m <= m_max && ok; ++m) {
            const exact::exact_params ep(p, m);
            const double err = exact::float_error(ep);
            worst = std::max(worst, err);
            if (err > 1e-12) {
                ok = false;
                msg << "pmf error " << err << " at p=" << detail::fraction(p) << " m=" << m;
                break;
            }
            const params par(exact::to_double(p), m);
            const auto lin = mode(par);
            const auto bin = mode_binary_search(par);
            const auto argmax = exact::mode_set(ep);
            const bool contains_argmax =
                std::all_of(argmax.begin(), argmax.end(), [&](int k) {
                    return std::find(lin.modes.begin(), lin.modes.end(), k) != lin.modes.end();
                });
            if (lin.modes != exact::mode_set_with_tolerance(ep, tie_tol) || !contains_argmax ||
                bin.modes != lin.modes || bin.first_descent != lin.first_descent) {
                ok = false;
                msg << "mode mismatch at p=" << detail::fraction(p) << " m=" << m;
            }
        }
    }
    if (ok) {
        msg << "max |pmf - exact| = " << worst << " (m <= " << m_max
            << "); mode sets agree under the tie tolerance, binary search agrees";
    }
    return {11, "float-vs-exact-audit", ok, msg.str(), 0.0};
}

inline std::vector<criterion_result> run_all(const options& opt = {}) {
    using runner = criterion_result (*)(const options&);
    constexpr runner runners[] = {
        check_exact_normalization, check_unimodality,          check_p_half_shape,
        check_p_half_log_concavity, check_violation_onset,     check_boundary_form_equivalence,
        check_second_derivative,    check_g_concavity_and_boundary, check_asymptotic_scaling,
        check_samplers,             check_float_vs_exact,
    };
    std::vector<criterion_result> out;
    for (auto run : runners) {
        const auto t0 = std::chrono::steady_clock::now();
        auto res = run(opt);
        const auto t1 = std::chrono::steady_clock::now();
        res.seconds = std::chrono::duration<double>(t1 - t0).count();
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace riffshuffle::verify
