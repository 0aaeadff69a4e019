#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "riffshuffle/exact.hpp"
#include "riffshuffle/sampler.hpp"

using namespace riffshuffle;
using exact::rational;
using Catch::Approx;

namespace {

std::vector<double> exact_probs(const rational& p, int m) {
    const auto mass = exact::masses_up_to(exact::exact_params(p, m), m);
    std::vector<double> out;
    out.reserve(mass.size());
    for (const auto& f : mass) out.push_back(exact::to_double(f));
    return out;
}

}  // namespace

TEST_CASE("splitmix64 is a fixed, reproducible sequence") {
    splitmix64 gen0(0);
    CHECK(gen0.next() == 0xE220A8397B1DCDAFULL);  // canonical first output for seed 0

    splitmix64 gen(1234567ULL);
    CHECK(gen.next() == 0x599ED017FB08FC85ULL);
    CHECK(gen.next() == 0x2C73F08458540FA5ULL);
    CHECK(gen.next() == 0x883EBCE5A3F27C77ULL);

    splitmix64 a(99), b(99);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.next_unit();
        CHECK(u == b.next_unit());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("draws stay inside the support") {
    for (double p : {0.01, 0.3, 0.5, 0.99}) {
        for (int m : {1, 2, 5, 17}) {
            const params par(p, m);
            splitmix64 gen(7);
            for (int i = 0; i < 2000; ++i) {
                const int d = sample_deck(par, gen);
                CHECK(d >= 0);
                CHECK(d <= m - 1);
                const int t = sample_trials(par, gen);
                CHECK(t >= 0);
                CHECK(t <= m - 1);
            }
        }
    }
}

TEST_CASE("m = 1 is degenerate at zero") {
    const params par(0.42, 1);
    splitmix64 gen(3);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_deck(par, gen) == 0);
        CHECK(sample_trials(par, gen) == 0);
    }
    const auto s = empirical_pmf(params(0.5, 1), 1000, 11, mechanism::deck);
    CHECK(s.counts == std::vector<std::int64_t>{1000});
}

TEST_CASE("empirical_pmf is deterministic and conserves n") {
    const params par(0.3, 5);
    const auto a = empirical_pmf(par, 50000, 7, mechanism::deck);
    const auto b = empirical_pmf(par, 50000, 7, mechanism::deck);
    CHECK(a.counts == b.counts);
    std::int64_t total = 0;
    for (auto c : a.counts) total += c;
    CHECK(total == 50000);

    const auto c = empirical_pmf(par, 50000, 8, mechanism::deck);
    CHECK(a.counts != c.counts);  // different seed, different stream

    CHECK_THROWS_AS(empirical_pmf(par, 0, 7, mechanism::deck), std::domain_error);
}

TEST_CASE("gof statistics definitions") {
    // counts exactly proportional to the pmf give (0, 0)
    sample_summary s{{250, 375, 375}, 1000, mechanism::deck};
    const std::vector<double> probs = {0.25, 0.375, 0.375};
    const auto r = gof_statistics(s, probs);
    CHECK(r.tv_distance == 0.0);
    CHECK(r.chi_square == 0.0);

    sample_summary bad{{1, 2}, 3, mechanism::deck};
    CHECK_THROWS_AS(gof_statistics(bad, probs), std::invalid_argument);
}

TEST_CASE("both mechanisms fit the exact pmf at n = 10^6") {
    struct cell {
        rational p;
        double pf;
        int m;
    };
    for (const auto& c : {cell{rational(3, 10), 0.3, 5}, cell{rational(1, 2), 0.5, 10}}) {
        const params par(c.pf, c.m);
        const auto probs = exact_probs(c.p, c.m);
        for (auto mech : {mechanism::deck, mechanism::trials}) {
            const auto s = empirical_pmf(par, 1000000, 42, mech);
            const auto r = gof_statistics(s, probs);
            INFO("mechanism " << mechanism_name(mech) << " m=" << c.m);
            CHECK(r.tv_distance <= 0.005);
            CHECK(r.chi_square < chi_square_critical_999(c.m - 1));
        }
    }
}

TEST_CASE("empirical frequencies track the exact pmf pointwise") {
    const params par(0.3, 5);
    const auto probs = exact_probs(rational(3, 10), 5);
    const auto s = empirical_pmf(par, 1000000, 7, mechanism::deck);
    for (int k = 0; k < 5; ++k) {
        CHECK(std::fabs(double(s.counts[size_t(k)]) / 1e6 - probs[size_t(k)]) <= 0.003);
    }
}

TEST_CASE("deck and trials agree with each other") {
    const params par(0.4, 8);
    const auto a = empirical_pmf(par, 1000000, 42, mechanism::deck);
    const auto b = empirical_pmf(par, 1000000, 1042, mechanism::trials);
    const auto r = two_sample_chi_square(a, b);
    CHECK(r.degrees_of_freedom == 7);
    CHECK(r.chi_square < chi_square_critical_999(r.degrees_of_freedom));
}

TEST_CASE("empirical mode is consistent with the exact mode set") {
    for (int a : {1, 3, 5, 7}) {
        const int m = 9;
        const auto modes = exact::mode_set(exact::exact_params(rational(a, 10), m));
        const auto s = empirical_pmf(params(a / 10.0, m), 1000000, 5, mechanism::deck);
        const int argmax =
            int(std::max_element(s.counts.begin(), s.counts.end()) - s.counts.begin());
        const int lo = modes.front() - 1;
        const int hi = modes.back() + 1;
        CHECK(argmax >= lo);
        CHECK(argmax <= hi);
    }
}

TEST_CASE("chi-square critical values") {
    CHECK(chi_square_critical_999(9) == Approx(27.877165).epsilon(1e-6));
    CHECK(chi_square_critical_999(7) == Approx(24.321886).epsilon(1e-6));
    CHECK(chi_square_critical_999(4) == Approx(18.466827).epsilon(1e-6));
    CHECK(chi_square_critical_999(60) == Approx(99.607).epsilon(0.01));  // Wilson-Hilferty tail
    CHECK_THROWS_AS(chi_square_critical_999(0), std::domain_error);
}
