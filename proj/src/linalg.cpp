#include "eqlab/linalg.hpp"

#include "eqlab/errors.hpp"
#include "eqlab/sampling.hpp"

#include <algorithm>
#include <utility>

namespace eqlab {

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Rational(0))
{
}

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries))
{
    if (entries_.size() != rows * cols) {
        throw DimensionMismatch("matrix entry count does not match rows x cols");
    }
}

RationalMatrix RationalMatrix::identity(std::size_t n)
{
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1;
    }
    return m;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<std::vector<Rational>>& rows)
{
    if (rows.empty()) {
        return {};
    }
    const std::size_t cols = rows.front().size();
    std::vector<Rational> entries;
    entries.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) {
            throw DimensionMismatch("ragged rows");
        }
        entries.insert(entries.end(), r.begin(), r.end());
    }
    return {rows.size(), cols, std::move(entries)};
}

std::size_t rank_exact(const RationalMatrix& m)
{
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    if (rows == 0 || cols == 0) {
        return 0;
    }

    // Clear denominators row by row; scaling a row preserves rank.
    std::vector<std::vector<Integer>> a(rows, std::vector<Integer>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        Integer l = 1;
        for (std::size_t c = 0; c < cols; ++c) {
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
        }
        for (std::size_t c = 0; c < cols; ++c) {
            a[r][c] = m(r, c).get_num() * (l / m(r, c).get_den());
        }
    }

    std::vector<std::size_t> col_of(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        col_of[c] = c;
    }

    Integer prev = 1;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
        // Full pivoting: any nonzero entry of the trailing block, preferring small magnitude.
        std::size_t pr = rows;
        std::size_t pc = cols;
        for (std::size_t r = k; r < rows; ++r) {
            for (std::size_t c = k; c < cols; ++c) {
                const Integer& v = a[r][col_of[c]];
                if (v == 0) {
                    continue;
                }
                if (pr == rows || mpz_cmpabs(v.get_mpz_t(), a[pr][col_of[pc]].get_mpz_t()) < 0) {
                    pr = r;
                    pc = c;
                }
            }
        }
        if (pr == rows) {
            break;
        }
        std::swap(a[k], a[pr]);
        std::swap(col_of[k], col_of[pc]);
        const Integer pivot = a[k][col_of[k]];
        for (std::size_t r = k + 1; r < rows; ++r) {
            const Integer factor = a[r][col_of[k]];
            for (std::size_t c = k + 1; c < cols; ++c) {
                Integer& target = a[r][col_of[c]];
                target = (pivot * target - factor * a[k][col_of[c]]);
                mpz_divexact(target.get_mpz_t(), target.get_mpz_t(), prev.get_mpz_t());
            }
            a[r][col_of[k]] = 0;
        }
        prev = pivot;
        ++rank;
    }
    return rank;
}

std::optional<std::vector<Rational>> solve_exact(const RationalMatrix& a, std::span<const Rational> b)
{
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    if (b.size() != rows) {
        throw DimensionMismatch("right-hand side length differs from row count");
    }
    std::vector<std::vector<Rational>> aug(rows, std::vector<Rational>(cols + 1));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            aug[r][c] = a(r, c);
        }
        aug[r][cols] = b[r];
    }

    std::vector<std::size_t> pivot_cols;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < rows; ++c) {
        std::size_t p = row;
        while (p < rows && aug[p][c] == 0) {
            ++p;
        }
        if (p == rows) {
            continue;
        }
        std::swap(aug[row], aug[p]);
        const Rational inv = 1 / aug[row][c];
        for (auto& v : aug[row]) {
            v *= inv;
        }
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || aug[r][c] == 0) {
                continue;
            }
            const Rational f = aug[r][c];
            for (std::size_t k = c; k <= cols; ++k) {
                aug[r][k] -= f * aug[row][k];
            }
        }
        pivot_cols.push_back(c);
        ++row;
    }
    for (std::size_t r = row; r < rows; ++r) {
        if (aug[r][cols] != 0) {
            return std::nullopt;
        }
    }
    std::vector<Rational> x(cols, Rational(0));
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) {
        x[pivot_cols[r]] = aug[r][cols];
    }
    return x;
}

Polynomial::Polynomial(const Rational& constant)
{
    if (constant != 0) {
        terms_.emplace(std::vector<int>{}, constant);
    }
}

Polynomial Polynomial::variable(std::size_t var, std::size_t nvars)
{
    if (var >= nvars) {
        throw InvalidArgument("parameter index out of range");
    }
    Polynomial p;
    std::vector<int> e(nvars, 0);
    e[var] = 1;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
}

void Polynomial::add_term(const std::vector<int>& exponents, const Rational& c)
{
    // Trailing zeros carry no information; strip them so keys are canonical.
    std::vector<int> key = exponents;
    while (!key.empty() && key.back() == 0) {
        key.pop_back();
    }
    auto [it, inserted] = terms_.try_emplace(key, c);
    if (!inserted) {
        it->second += c;
    }
    if (it->second == 0) {
        terms_.erase(it);
    }
}

Rational Polynomial::coefficient(const std::vector<int>& exponents) const
{
    std::vector<int> key = exponents;
    while (!key.empty() && key.back() == 0) {
        key.pop_back();
    }
    const auto it = terms_.find(key);
    return it == terms_.end() ? Rational(0) : it->second;
}

Rational Polynomial::evaluate(std::span<const Rational> values) const
{
    Rational total = 0;
    for (const auto& [e, c] : terms_) {
        if (e.size() > values.size()) {
            throw DimensionMismatch("too few parameter values for polynomial");
        }
        Rational term = c;
        for (std::size_t k = 0; k < e.size(); ++k) {
            for (int p = 0; p < e[k]; ++p) {
                term *= values[k];
            }
        }
        total += term;
    }
    return total;
}

Polynomial& Polynomial::operator+=(const Polynomial& other)
{
    for (const auto& [e, c] : other.terms_) {
        add_term(e, c);
    }
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c)
{
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) {
        v *= c;
    }
    return *this;
}

Polynomial operator-(Polynomial a, const Polynomial& b)
{
    for (const auto& [e, c] : b.terms_) {
        a.add_term(e, -c);
    }
    return a;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
    Polynomial r;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            std::vector<int> e(std::max(ea.size(), eb.size()), 0);
            for (std::size_t k = 0; k < ea.size(); ++k) {
                e[k] += ea[k];
            }
            for (std::size_t k = 0; k < eb.size(); ++k) {
                e[k] += eb[k];
            }
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

ParamMatrix::ParamMatrix(std::size_t rows, std::size_t cols, std::vector<std::string> parameters)
    : rows_(rows), cols_(cols), parameters_(std::move(parameters)), entries_(rows * cols)
{
}

Polynomial ParamMatrix::variable(const std::string& name) const
{
    const auto it = std::find(parameters_.begin(), parameters_.end(), name);
    if (it == parameters_.end()) {
        throw InvalidArgument("unknown parameter: " + name);
    }
    return variable(static_cast<std::size_t>(it - parameters_.begin()));
}

RationalMatrix ParamMatrix::substitute(std::span<const Rational> values) const
{
    if (values.size() != parameters_.size()) {
        throw DimensionMismatch("substitution needs one value per parameter");
    }
    std::vector<Rational> entries;
    entries.reserve(entries_.size());
    for (const auto& p : entries_) {
        entries.push_back(p.evaluate(values));
    }
    return {rows_, cols_, std::move(entries)};
}

GenericRankResult generic_rank_detail(const ParamMatrix& m, int trials, std::uint64_t seed)
{
    if (trials < 1) {
        throw InvalidArgument("generic_rank needs at least one trial");
    }
    RationalSampler sampler(seed);
    GenericRankResult result;
    std::vector<Rational> values(m.parameters().size());
    for (int t = 0; t < trials; ++t) {
        for (auto& v : values) {
            v = sampler.parameter();
        }
        const std::size_t r = rank_exact(m.substitute(values));
        result.trial_ranks.push_back(r);
        result.rank = std::max(result.rank, r);
    }
    return result;
}

std::size_t generic_rank(const ParamMatrix& m, int trials, std::uint64_t seed)
{
    return generic_rank_detail(m, trials, seed).rank;
}

}  // namespace eqlab
