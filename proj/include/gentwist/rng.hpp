#pragma once

#include <cmath>
#include <cstdint>

#include "gentwist/types.hpp"

namespace gentwist {

// splitmix64 stream with a Box-Muller gaussian on top.  Hand-rolled so that
// report bytes are reproducible across standard library implementations.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    Vec gaussianVec(int n) {
        Vec v(n);
        for (int i = 0; i < n; i++) v(i) = gaussian();
        return v;
    }

    Mat gaussianMat(int r, int c) {
        Mat m(r, c);
        for (int i = 0; i < r; i++)
            for (int j = 0; j < c; j++) m(i, j) = gaussian();
        return m;
    }

    // Independent substream for task index i; keeps fan-out order-independent.
    Rng fork(uint64_t i) const {
        Rng r(state ^ (0x9e3779b97f4a7c15ull * (i + 1)));
        r.next();
        return r;
    }

private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Halton low-discrepancy sequence, used for deterministic base-point lattices.
inline double haltonValue(uint64_t index, uint64_t base) {
    double f = 1.0, r = 0.0;
    uint64_t i = index + 1;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

inline Vec haltonPoint(uint64_t index, int dim) {
    static const uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    Vec p(dim);
    for (int k = 0; k < dim; k++) p(k) = haltonValue(index, primes[k % 10]);
    return p;
}

}  // namespace gentwist
