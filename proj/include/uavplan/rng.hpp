// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace uavplan {

// Counter-based generator: a seed fully determines the stream, and split()
// derives independent child streams. Deliberately avoids <random>
// distributions, whose outputs are implementation-defined; sweep output must
// be byte-identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 significant bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n), n > 0.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    // Knuth's product method; adequate for the per-slot arrival rates used
    // here (lambda of a few).
    int poisson(double lambda) {
        const double limit = std::exp(-lambda);
        double prod = 1.0;
        int count = -1;
        do {
            prod *= next_double();
            ++count;
        } while (prod > limit);
        return count;
    }

    // Exponential with the given rate (inter-arrival times).
    double exponential(double rate) {
        double u;
        do {
            u = next_double();
        } while (u <= 0.0);
        return -std::log(u) / rate;
    }

    // Independent child stream; distinct tags give distinct streams.
    Rng split(std::uint64_t tag) const {
        Rng child(state_ ^ (0xA0761D6478BD642FULL + tag * 0xE7037ED1A0B428DBULL));
        child.next_u64();
        return child;
    }

  private:
    std::uint64_t state_;
};

}  // namespace uavplan
