#ifndef SMPLAB_RNG_HPP
#define SMPLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "smplab/symmat.hpp"

namespace smplab {

/// Seeded random source for sampling-based checks. Draws are generated with
/// an explicit 53-bit mantissa construction so sequences are identical across
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::vector<double> vec(int n, double lo, double hi) {
        std::vector<double> v(n);
        for (double& x : v)
            x = uniform(lo, hi);
        return v;
    }

    /// Symmetric matrix with entries uniform in [-scale, scale].
    SymMat symmetric(int n, double scale) {
        SymMat m(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                m.at(i, j) = uniform(-scale, scale);
        return m;
    }

    /// Positive semidefinite matrix G^T G with G entries uniform.
    SymMat psd(int n, double scale) {
        std::vector<std::vector<double>> g(n);
        for (auto& row : g)
            row = vec(n, -scale, scale);
        return SymMat::gram(g);
    }

    std::vector<double> unit_vec(int n) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& x : v) {
                x = uniform(-1.0, 1.0);
                norm2 += x * x;
            }
        } while (norm2 < 1e-8);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v)
            x *= inv;
        return v;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace smplab

#endif
