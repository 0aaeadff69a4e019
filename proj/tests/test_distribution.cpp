#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "riffshuffle/distribution.hpp"
#include "riffshuffle/exact.hpp"

using namespace riffshuffle;
using Catch::Approx;

namespace {

const std::vector<double> kPGrid = {0.01, 0.05, 0.1, 0.25, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99};
const std::vector<int> kMGrid = {1, 2, 3, 5, 10, 49, 50, 51, 100, 200};

}  // namespace

TEST_CASE("params validates its domain") {
    const params par(0.3, 5);
    CHECK(par.p == 0.3);
    CHECK(par.q == Approx(0.7).margin(1e-16));
    CHECK(par.m == 5);

    CHECK_THROWS_AS(params(1.0, 5), std::domain_error);
    CHECK_THROWS_AS(params(0.0, 5), std::domain_error);
    CHECK_THROWS_AS(params(-0.2, 5), std::domain_error);
    CHECK_THROWS_AS(params(std::nan(""), 5), std::domain_error);
    CHECK_THROWS_AS(params(0.5, 0), std::domain_error);
    CHECK_THROWS_AS(params(0.5, -3), std::domain_error);
}

TEST_CASE("pmf matches the exact oracle on pinned cases") {
    CHECK(pmf(params(0.3, 1), 0) == Approx(1.0).margin(1e-15));
    CHECK(pmf(params(0.5, 3), 1) == Approx(0.375).margin(1e-15));
    CHECK(pmf(params(0.1, 4), 0) == Approx(0.6562).margin(1e-14));  // 3281/5000

    CHECK_THROWS_AS(pmf(params(0.5, 3), -1), std::out_of_range);
    CHECK_THROWS_AS(pmf(params(0.5, 3), 3), std::out_of_range);
}

TEST_CASE("extended_pmf extends the formula past the support") {
    CHECK(extended_pmf(params(0.1, 2), 2) == Approx(0.0486).margin(1e-14));  // 243/5000
    CHECK(extended_pmf(params(0.5, 3), 1) == Approx(0.375).margin(1e-15));
    CHECK(extended_pmf(params(0.5, 2), 2) == Approx(0.375).margin(1e-15));  // 3/8

    CHECK_THROWS_AS(extended_pmf(params(0.5, 3), -1), std::out_of_range);
}

TEST_CASE("extended_pmf is bit-identical to pmf on the support") {
    for (double p : {0.1, 0.5, 0.93}) {
        for (int m : {1, 7, 60}) {
            const params par(p, m);
            for (int k = 0; k < m; ++k) CHECK(extended_pmf(par, k) == pmf(par, k));
        }
    }
}

TEST_CASE("log_pmf agrees with the arbitrary-precision oracle") {
    CHECK(log_pmf(params(0.3, 1), 0) == Approx(0.0).margin(1e-15));

    const double expected38 = exact::log_value(exact::rational(3, 8));
    CHECK(log_pmf(params(0.5, 3), 1) == Approx(expected38).epsilon(1e-12));

    // large-m case: oracle evaluated at the exact dyadic value of the double 0.3
    const exact::exact_params ep(exact::rational(0.3), 500);
    const auto mass = exact::masses_up_to(ep, 251);
    const double expected = exact::log_value(mass[250]);
    const double got = log_pmf(params(0.3, 500), 250);
    REQUIRE(std::isfinite(got));
    CHECK(got == Approx(expected).epsilon(1e-9));

    CHECK_THROWS_AS(log_pmf(params(0.3, 5), 5), std::out_of_range);
}

TEST_CASE("pmf_table pinned values and structure") {
    const auto t2 = make_pmf_table(params(0.5, 2));
    REQUIRE(t2.mass.size() == 2);
    CHECK(t2.mass[0] == Approx(0.5).margin(1e-15));
    CHECK(t2.mass[1] == Approx(0.5).margin(1e-15));

    const auto t3 = make_pmf_table(params(0.5, 3));
    CHECK(t3.mass[0] == Approx(0.25).margin(1e-15));
    CHECK(t3.mass[1] == Approx(0.375).margin(1e-15));
    CHECK(t3.mass[2] == Approx(0.375).margin(1e-15));

    const auto t1 = make_pmf_table(params(0.9, 1));
    CHECK(t1.mass[0] == Approx(1.0).margin(1e-15));

    for (double p : kPGrid) {
        for (int m : kMGrid) {
            const auto t = make_pmf_table(params(p, m));
            REQUIRE(t.mass.size() == size_t(m));
            CHECK(t.cumulative.back() == Approx(1.0).margin(1e-12));
            for (size_t k = 0; k < t.mass.size(); ++k) {
                CHECK(t.mass[k] > 0.0);
                if (k > 0) CHECK(t.cumulative[k] >= t.cumulative[k - 1]);
            }
        }
    }
}

TEST_CASE("cdf accumulates the pmf") {
    CHECK(cdf(params(0.5, 3), 1) == Approx(0.625).margin(1e-15));
    CHECK(cdf(params(0.2, 7), 6) == Approx(1.0).margin(1e-12));
    CHECK(cdf(params(0.1, 4), 0) == Approx(0.6562).margin(1e-14));
    CHECK_THROWS_AS(cdf(params(0.5, 3), 3), std::out_of_range);
}

TEST_CASE("moments") {
    const auto deg = moments(params(0.4, 1));
    CHECK(deg.mean == 0.0);
    CHECK(deg.variance == 0.0);

    const auto m2 = moments(params(0.5, 2));
    CHECK(m2.mean == Approx(0.5).margin(1e-15));
    CHECK(m2.variance == Approx(0.25).margin(1e-15));

    CHECK(moments(params(0.5, 3)).mean == Approx(1.125).margin(1e-15));
}

TEST_CASE("ratio by the factored formula") {
    CHECK(ratio(params(0.5, 5), 0) == Approx(2.5).epsilon(1e-13));
    CHECK(ratio(params(0.5, 3), 1) == Approx(1.0).epsilon(1e-12));  // the p=1/2 top tie
    CHECK(ratio(params(0.1, 4), 0) == Approx(0.40048765620237731).epsilon(1e-10));  // 1314/3281

    CHECK_THROWS_AS(ratio(params(0.5, 3), 2), std::out_of_range);
    CHECK_THROWS_AS(ratio(params(0.5, 3), -1), std::out_of_range);
    CHECK_THROWS_AS(ratio(params(0.5, 1), 0), std::out_of_range);  // empty domain at m=1
}

TEST_CASE("ratio is consistent with pmf quotients") {
    for (double p : kPGrid) {
        for (int m : kMGrid) {
            if (m < 2) continue;
            const params par(p, m);
            for (int k = 0; k + 1 < m; ++k) {
                const double r = ratio(par, k);
                const double q = pmf(par, k + 1) / pmf(par, k);
                CHECK(std::fabs(r - q) / r <= 1e-10);
            }
        }
    }
}

TEST_CASE("h and g auxiliary functions") {
    CHECK(h_func(params(0.5, 2), 0.0) == Approx(0.5).margin(1e-15));
    CHECK(h_func(params(1.0 / 3.0, 1), 1.0) == Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(h_func(params(0.3, 10), 2.5) > 0.0);
    CHECK_THROWS_AS(h_func(params(0.3, 10), std::nan("")), std::domain_error);

    CHECK(g_func(params(0.5, 5), 3.0) == Approx(0.0).margin(1e-13));
    CHECK(g_func(params(1.0 / 3.0, 6), 4.0) == Approx(0.5).epsilon(1e-12));
    CHECK(g_func(params(0.25, 2), 0.0) == Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(g_func(params(0.3, 10), -0.5), std::domain_error);
    CHECK_THROWS_AS(g_func(params(0.3, 1), 0.0), std::domain_error);  // empty domain

    // log-space path above the direct-evaluation threshold
    const params big(0.3, 80);
    CHECK(h_func(big, 3.0) == Approx(std::exp(log_h_func(big, 3.0))));
    CHECK(h_func(big, 3.0) > 0.0);
    CHECK(log_h_func(params(0.3, 10), 2.0) == Approx(std::log(h_func(params(0.3, 10), 2.0))));
}

TEST_CASE("extended values beyond the support on the log path") {
    const exact::exact_params ep(exact::rational(0.3), 60);
    const auto mass = exact::masses_up_to(ep, 61);
    const double got = extended_pmf(params(0.3, 60), 60);
    CHECK(got == Approx(exact::to_double(mass[60])).epsilon(1e-11));
}

TEST_CASE("g sign matches descent for integer arguments") {
    for (double p : kPGrid) {
        for (int m : {2, 5, 10, 60}) {
            const params par(p, m);
            for (int k = 0; k + 1 < m; ++k) {
                const double g = g_func(par, double(k));
                if (std::fabs(g) < 1e-9) continue;  // knife-edge left to the exact oracle
                CHECK((g >= 0.0) == (pmf(par, k + 1) <= pmf(par, k)));
            }
        }
    }
}

TEST_CASE("mode pinned cases") {
    const auto m1 = mode(params(0.7, 1));
    CHECK(m1.modes == std::vector<int>{0});
    CHECK_FALSE(m1.first_descent.has_value());

    const auto m5 = mode(params(0.5, 5));
    CHECK(m5.modes == std::vector<int>{3, 4});
    REQUIRE(m5.first_descent.has_value());
    CHECK(*m5.first_descent == 3);

    const auto m4 = mode(params(0.1, 4));
    CHECK(m4.modes == std::vector<int>{0});
    REQUIRE(m4.first_descent.has_value());
    CHECK(*m4.first_descent == 0);
}

TEST_CASE("binary-search mode agrees with the linear scan") {
    for (double p : kPGrid) {
        for (int m : kMGrid) {
            const params par(p, m);
            const auto lin = mode(par);
            const auto bin = mode_binary_search(par);
            CHECK(lin.modes == bin.modes);
            CHECK(lin.first_descent == bin.first_descent);
        }
    }
}

TEST_CASE("descent persistence: no re-ascent after the first descent") {
    for (double p : kPGrid) {
        for (int m : kMGrid) {
            if (m < 2) continue;
            const params par(p, m);
            const auto res = mode(par);
            const auto rep = check_shape(par);
            CHECK(rep.is_unimodal);
            CHECK(rep.modes.size() <= 2);
            if (rep.modes.size() == 2) CHECK(rep.modes[1] == rep.modes[0] + 1);
            CHECK(rep.modes == res.modes);
            if (res.first_descent) {
                for (int k = *res.first_descent + 1; k + 1 < m; ++k) {
                    CHECK(ratio(par, k) < 1.0 + mode_tie_rel_tol);
                }
            }
        }
    }
}

TEST_CASE("pmf is symmetric under p <-> q for dyadic pairs") {
    const std::vector<std::pair<double, double>> pairs = {
        {0.25, 0.75}, {0.375, 0.625}, {0.0625, 0.9375}};
    for (auto [p, q] : pairs) {
        for (int m : {1, 3, 10, 80}) {
            const auto tp = make_pmf_table(params(p, m));
            const auto tq = make_pmf_table(params(q, m));
            for (size_t k = 0; k < tp.mass.size(); ++k) {
                CHECK(std::fabs(tp.mass[k] - tq.mass[k]) <= 1e-14);
            }
        }
    }
}

TEST_CASE("p = 1/2 shape in floating point") {
    for (int m : {2, 3, 10, 50, 120}) {
        const params par(0.5, m);
        const auto t = make_pmf_table(par);
        for (int k = 0; k + 2 < m; ++k) CHECK(t.mass[size_t(k)] < t.mass[size_t(k) + 1]);
        CHECK(ratio(par, m - 2) == Approx(1.0).epsilon(1e-12));
        const auto res = mode(par);
        CHECK(res.modes == std::vector<int>{m - 2, m - 1});
    }
}
