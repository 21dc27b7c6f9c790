#pragma once

#include "eqlab/rational.hpp"

#include <cstdint>
#include <random>

namespace eqlab {

/// Deterministic rational sampler. Draws go through raw mt19937_64 output so the
/// streams are identical on every standard library.
class RationalSampler {
public:
    explicit RationalSampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [lo, hi].
    long uniform_int(long lo, long hi)
    {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long>(engine_() % span);
    }

    /// Numerator in [num_lo, num_hi], denominator in [1, den_hi].
    Rational draw(long num_lo, long num_hi, long den_hi)
    {
        const long num = uniform_int(num_lo, num_hi);
        const long den = uniform_int(1, den_hi);
        return make_rational(num, den);
    }

    /// Small coefficients used for synthesized fields.
    Rational small() { return draw(-9, 9, 9); }

    /// Parameter substitutions for generic-rank trials.
    Rational parameter() { return draw(1, 1000000, 1000000); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace eqlab
