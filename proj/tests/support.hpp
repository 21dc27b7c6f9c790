#pragma once

#include "eqlab/sampling.hpp"
#include "eqlab/tensor.hpp"

namespace eqlab::testing {

inline JetScalar random_jet(RationalSampler& rng, std::size_t dim, int order)
{
    const MonomialBasis& basis = MonomialBasis::get(dim, order);
    std::vector<std::pair<MultiIndex, Rational>> terms;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        terms.emplace_back(basis.exponent(k), rng.small());
    }
    return JetScalar::from_terms(dim, order, terms);
}

inline TensorField random_tensor(RationalSampler& rng, std::size_t dim, Valence v, int order)
{
    return build_tensor(dim, std::move(v), [&](std::span<const std::size_t>) { return random_jet(rng, dim, order); });
}

inline JetScalar x(std::size_t dim, int order, std::size_t k) { return JetScalar::coordinate(dim, order, k); }
inline JetScalar c(std::size_t dim, int order, long num, long den = 1)
{
    return JetScalar::constant(dim, order, make_rational(num, den));
}

}  // namespace eqlab::testing
