#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "riffshuffle/distribution.hpp"
#include "riffshuffle/params.hpp"

namespace riffshuffle {

// splitmix64: a 64-bit counter advanced by the golden-ratio Weyl constant,
// output through a two-round xor-multiply mix. Bit-exact across platforms;
// the algorithm is spelled out in the README so results can be reproduced
// independently.
class splitmix64 {
public:
    explicit splitmix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53 random bits
    double next_unit() { return double(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

enum class mechanism { deck, trials };

inline const char* mechanism_name(mechanism mech) {
    return mech == mechanism::deck ? "deck" : "trials";
}

// Draw cards from deck A with probability p and deck B with probability q
// until one deck of m cards is depleted; return the count taken from the
// remaining deck.
inline int sample_deck(const params& par, splitmix64& gen) {
    int from_a = 0, from_b = 0;
    while (from_a < par.m && from_b < par.m) {
        if (gen.next_unit() < par.p) {
            ++from_a;
        } else {
            ++from_b;
        }
    }
    return from_a == par.m ? from_b : from_a;
}

// Run Bernoulli(p) trials until m successes or m failures; return X - m
// where X is the number of trials.
inline int sample_trials(const params& par, splitmix64& gen) {
    int trials = 0, successes = 0, failures = 0;
    while (successes < par.m && failures < par.m) {
        ++trials;
        if (gen.next_unit() < par.p) {
            ++successes;
        } else {
            ++failures;
        }
    }
    return trials - par.m;
}

struct sample_summary {
    std::vector<std::int64_t> counts;  // length m, sums to n
    std::int64_t n;
    mechanism mech;
};

inline sample_summary empirical_pmf(const params& par, std::int64_t n, std::uint64_t seed,
                                    mechanism mech) {
    if (n < 1) throw std::domain_error("empirical_pmf: n must be >= 1");
    sample_summary s{std::vector<std::int64_t>(size_t(par.m), 0), n, mech};
    splitmix64 gen(seed);
    for (std::int64_t i = 0; i < n; ++i) {
        const int k = mech == mechanism::deck ? sample_deck(par, gen) : sample_trials(par, gen);
        ++s.counts[size_t(k)];
    }
    return s;
}

struct gof_result {
    double tv_distance;
    double chi_square;
};

// tv = (1/2) sum_k |counts_k/n - f_k|, chi^2 = sum_k (counts_k - n f_k)^2 / (n f_k)
inline gof_result gof_statistics(const sample_summary& summary,
                                 const std::vector<double>& expected) {
    if (summary.counts.size() != expected.size()) {
        throw std::invalid_argument("gof_statistics: dimension mismatch between counts and pmf");
    }
    const double n = double(summary.n);
    double tv = 0.0, chi = 0.0;
    for (size_t k = 0; k < expected.size(); ++k) {
        const double diff = double(summary.counts[k]) / n - expected[k];
        tv += std::fabs(diff);
        const double mu = n * expected[k];
        chi += (double(summary.counts[k]) - mu) * (double(summary.counts[k]) - mu) / mu;
    }
    return {0.5 * tv, chi};
}

inline gof_result gof_statistics(const sample_summary& summary, const pmf_table& table) {
    return gof_statistics(summary, table.mass);
}

// Two-sample chi-square between equal-m summaries; degrees of freedom are
// (#non-empty cells - 1).
struct two_sample_result {
    double chi_square;
    int degrees_of_freedom;
};

inline two_sample_result two_sample_chi_square(const sample_summary& a, const sample_summary& b) {
    if (a.counts.size() != b.counts.size()) {
        throw std::invalid_argument("two_sample_chi_square: dimension mismatch");
    }
    const double ka = std::sqrt(double(b.n) / double(a.n));
    const double kb = std::sqrt(double(a.n) / double(b.n));
    double chi = 0.0;
    int cells = 0;
    for (size_t k = 0; k < a.counts.size(); ++k) {
        const double ca = double(a.counts[k]);
        const double cb = double(b.counts[k]);
        if (ca + cb == 0.0) continue;
        ++cells;
        const double d = ka * ca - kb * cb;
        chi += d * d / (ca + cb);
    }
    return {chi, cells > 0 ? cells - 1 : 0};
}

// 99.9% chi-square quantiles for df = 1..40 (Wilson-Hilferty beyond).
inline double chi_square_critical_999(int df) {
    static constexpr std::array<double, 40> table = {
        10.827566, 13.815511, 16.266236, 18.466827, 20.515006, 22.457744, 24.321886, 26.124482,
        27.877165, 29.588298, 31.264134, 32.909490, 34.528179, 36.123274, 37.697298, 39.252355,
        40.790217, 42.312396, 43.820196, 45.314747, 46.797038, 48.267942, 49.728232, 51.178598,
        52.619656, 54.051962, 55.476020, 56.892285, 58.301173, 59.703064, 61.098306, 62.487219,
        63.870099, 65.247217, 66.618829, 67.985168, 69.346452, 70.702887, 72.054663, 73.401958};
    if (df < 1) throw std::domain_error("chi_square_critical_999: df must be >= 1");
    if (df <= int(table.size())) return table[size_t(df) - 1];
    const double d = df;
    const double z = 3.090232306167814;  // standard normal 99.9% quantile
    const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
    return d * t * t * t;
}

}  // namespace riffshuffle
