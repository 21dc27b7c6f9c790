#pragma once

#include "eqlab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eqlab {

using MultiIndex = std::vector<int>;

/// All monomials x^alpha with |alpha| <= order in `dim` variables, graded by degree.
///
/// Within one degree the ordering does not depend on `order`, so the basis for a
/// lower order is always a prefix of the basis for a higher one. Truncation is
/// therefore a resize of the coefficient vector.
class MonomialBasis {
public:
    struct ProductTerm {
        std::uint32_t lhs;
        std::uint32_t rhs;
        std::uint32_t out;
    };
    struct DerivativeTerm {
        std::uint32_t src;
        std::uint32_t dst;
        int factor;
    };

    /// Shared, lazily built basis. Thread safe.
    static const MonomialBasis& get(std::size_t dim, int order);

    std::size_t dim() const { return dim_; }
    int order() const { return order_; }
    std::size_t size() const { return exponents_.size(); }
    const MultiIndex& exponent(std::size_t idx) const { return exponents_[idx]; }
    /// Number of monomials of degree <= d (a prefix length).
    std::size_t prefix_size(int d) const { return degree_end_[static_cast<std::size_t>(d)]; }
    /// Position of alpha, or size() if |alpha| > order.
    std::size_t index_of(const MultiIndex& alpha) const;

    const std::vector<ProductTerm>& products() const { return products_; }
    const std::vector<DerivativeTerm>& derivative(std::size_t coord) const { return derivatives_[coord]; }

private:
    MonomialBasis(std::size_t dim, int order);

    std::size_t dim_;
    int order_;
    std::vector<MultiIndex> exponents_;
    std::vector<std::size_t> degree_end_;
    std::vector<ProductTerm> products_;
    std::vector<std::vector<DerivativeTerm>> derivatives_;
};

/// Truncated multivariate Taylor expansion at the coordinate origin with exact
/// rational coefficients.
///
/// Orders propagate by the minimum rule: every binary operation truncates to the
/// smaller order of its operands and each partial derivative lowers it by one.
class JetScalar {
public:
    JetScalar() = default;
    /// The zero jet.
    JetScalar(std::size_t dim, int order);

    static JetScalar constant(std::size_t dim, int order, const Rational& value);
    /// The coordinate function x_k (0-based k).
    static JetScalar coordinate(std::size_t dim, int order, std::size_t k);
    /// Builds from sparse (alpha, coefficient) pairs; terms above `order` are dropped.
    static JetScalar from_terms(std::size_t dim, int order,
                                const std::vector<std::pair<MultiIndex, Rational>>& terms);

    std::size_t dim() const { return dim_; }
    int order() const { return order_; }
    const MonomialBasis& basis() const { return MonomialBasis::get(dim_, order_); }
    std::span<const Rational> coefficients() const { return coeffs_; }
    Rational coefficient(const MultiIndex& alpha) const;
    const Rational& value_at_base() const { return coeffs_.front(); }
    bool is_zero() const;

    JetScalar truncated(int order) const;
    /// Formal partial derivative along coordinate k. Throws OrderExhausted at order 0.
    JetScalar partial(std::size_t k) const;
    /// Multiplicative inverse up to the truncation order. Throws NotInvertible if value_at_base() == 0.
    JetScalar inverse() const;

    JetScalar operator-() const;
    JetScalar& operator+=(const JetScalar& other);
    JetScalar& operator-=(const JetScalar& other);
    JetScalar& operator*=(const Rational& c);

    friend JetScalar operator+(JetScalar a, const JetScalar& b) { return a += b; }
    friend JetScalar operator-(JetScalar a, const JetScalar& b) { return a -= b; }
    friend JetScalar operator*(const JetScalar& a, const JetScalar& b);
    friend JetScalar operator*(JetScalar a, const Rational& c) { return a *= c; }
    friend JetScalar operator*(const Rational& c, JetScalar a) { return a *= c; }

    /// Exact equality of dim, order and every coefficient.
    friend bool operator==(const JetScalar& a, const JetScalar& b);

    /// Human-readable polynomial, e.g. "1 + 2*x1 - 1/2*x1*x2^2".
    std::string to_string() const;

private:
    void check_compatible(const JetScalar& other) const;

    std::size_t dim_ = 0;
    int order_ = 0;
    std::vector<Rational> coeffs_;
};

}  // namespace eqlab
