#pragma once

#include "eqlab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eqlab {

/// Dense row-major matrix of exact rationals.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols);
    RationalMatrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries);
    static RationalMatrix identity(std::size_t n);
    /// Stacks equally sized rows.
    static RationalMatrix from_rows(const std::vector<std::vector<Rational>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rational& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    std::span<const Rational> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

    friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> entries_;
};

/// Rank over Q. Rows are cleared to integers, then reduced by fraction-free
/// (Bareiss) elimination with full pivoting.
std::size_t rank_exact(const RationalMatrix& m);

/// Solves A x = b exactly. Returns nullopt when inconsistent; free variables are set to 0.
std::optional<std::vector<Rational>> solve_exact(const RationalMatrix& a, std::span<const Rational> b);

/// Multivariate polynomial with rational coefficients over a named parameter list.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(const Rational& constant);
    /// The single parameter with index `var` out of `nvars`.
    static Polynomial variable(std::size_t var, std::size_t nvars);

    Rational evaluate(std::span<const Rational> values) const;
    bool is_zero() const { return terms_.empty(); }
    /// Coefficient of the monomial with the given exponent vector.
    Rational coefficient(const std::vector<int>& exponents) const;

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator*=(const Rational& c);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void add_term(const std::vector<int>& exponents, const Rational& c);

    std::map<std::vector<int>, Rational> terms_;
};

/// Matrix whose entries are polynomials in a finite list of named parameters.
class ParamMatrix {
public:
    ParamMatrix(std::size_t rows, std::size_t cols, std::vector<std::string> parameters);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<std::string>& parameters() const { return parameters_; }
    Polynomial& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Polynomial& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    Polynomial variable(std::size_t var) const { return Polynomial::variable(var, parameters_.size()); }
    Polynomial variable(const std::string& name) const;

    RationalMatrix substitute(std::span<const Rational> values) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::string> parameters_;
    std::vector<Polynomial> entries_;
};

struct GenericRankResult {
    std::size_t rank = 0;
    /// rank_exact of each substitution, in trial order.
    std::vector<std::size_t> trial_ranks;
};

/// Maximum of rank_exact over `trials` random rational substitutions
/// (numerators and denominators uniform in [1, 10^6]). Throws for trials < 1.
GenericRankResult generic_rank_detail(const ParamMatrix& m, int trials, std::uint64_t seed);
std::size_t generic_rank(const ParamMatrix& m, int trials, std::uint64_t seed);

}  // namespace eqlab
