#pragma once

// Random instance generators for the property suites. Every suite seeds its
// own engine so failures reproduce from the case index alone.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "delaylab/quasipoly.hpp"

namespace gen {

using delaylab::cplx;
using delaylab::Quasipolynomial;

constexpr int kCases = 200;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    bool coin() { return integer(0, 1) == 1; }

    cplx complex_in(double re_lo, double re_hi, double im_max) {
        return {uniform(re_lo, re_hi), uniform(-im_max, im_max)};
    }

    std::vector<double> coefficients(std::size_t k, double mag) {
        std::vector<double> v(k);
        for (double& x : v) x = uniform(-mag, mag);
        return v;
    }

    /// Retarded quasipolynomial with n in [1, max_n] and m < n.
    Quasipolynomial retarded(int max_n = 4, double mag = 3.0) {
        Quasipolynomial qp;
        qp.n = integer(1, max_n);
        qp.m = integer(0, qp.n - 1);
        qp.a = coefficients(static_cast<std::size_t>(qp.n), mag);
        qp.b = coefficients(static_cast<std::size_t>(qp.m + 1), mag);
        qp.tau = uniform(0.2, 2.0);
        return qp;
    }

    /// Any valid quasipolynomial, neutral ones with |b_n| < 1.
    Quasipolynomial any(int max_n = 4, double mag = 3.0) {
        Quasipolynomial qp = retarded(max_n, mag);
        if (coin()) {
            qp.m = qp.n;
            qp.b = coefficients(static_cast<std::size_t>(qp.m + 1), mag);
            qp.b.back() = uniform(-0.9, 0.9);
        }
        return qp;
    }

    /// n+m+1 distinct real roots spaced at least `gap` apart in [lo, hi].
    std::vector<double> distinct_roots(int count, double lo, double hi, double gap) {
        for (;;) {
            std::vector<double> r(static_cast<std::size_t>(count));
            for (double& x : r) x = uniform(lo, hi);
            std::sort(r.begin(), r.end());
            bool ok = true;
            for (std::size_t k = 1; k < r.size(); ++k) ok = ok && r[k] - r[k - 1] >= gap;
            if (ok) return r;
        }
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

}  // namespace gen
