#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace riffshuffle {

// Validated parameter pair (p, m) of the riff-shuffle distribution.
// q is stored once at construction so that every formula downstream
// sees the same value of 1 - p.
struct params {
    double p;
    double q;
    int m;

    params(double p_, int m_) : p(p_), q(1.0 - p_), m(m_) {
        if (!std::isfinite(p_) || p_ <= 0.0 || p_ >= 1.0) {
            throw std::domain_error("params: p must lie in the open interval (0, 1), got " +
                                    std::to_string(p_));
        }
        if (m_ < 1) {
            throw std::domain_error("params: m must be a positive integer, got " +
                                    std::to_string(m_));
        }
    }
};

inline params make_params(double p, int m) { return params(p, m); }

}  // namespace riffshuffle
