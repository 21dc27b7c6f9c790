#include "eqlab/jet.hpp"

#include "eqlab/errors.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace eqlab {

Rational make_rational(const Integer& num, const Integer& den)
{
    if (den == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational make_rational(long num, long den) { return make_rational(Integer(num), Integer(den)); }

Rational rational_from_strings(const std::string& num, const std::string& den)
{
    Integer n;
    Integer d;
    if (n.set_str(num, 10) != 0 || d.set_str(den, 10) != 0) {
        throw std::invalid_argument("malformed rational: " + num + "/" + den);
    }
    return make_rational(n, d);
}

std::string to_string(const Rational& q)
{
    if (q.get_den() == 1) {
        return q.get_num().get_str(10);
    }
    return q.get_str(10);
}

std::size_t numerator_digits(const Rational& q)
{
    if (q == 0) {
        return 0;
    }
    Integer n = abs(q.get_num());
    return n.get_str(10).size();
}

namespace {

// Exponent vectors of total degree d, x1^d first.
void append_degree(std::size_t dim, int d, std::vector<MultiIndex>& out)
{
    MultiIndex alpha(dim, 0);
    auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == dim) {
            alpha[pos] = remaining;
            out.push_back(alpha);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            alpha[pos] = e;
            self(self, pos + 1, remaining - e);
        }
    };
    rec(rec, 0, d);
}

int degree(const MultiIndex& alpha)
{
    int d = 0;
    for (int e : alpha) {
        d += e;
    }
    return d;
}

}  // namespace

MonomialBasis::MonomialBasis(std::size_t dim, int order) : dim_(dim), order_(order)
{
    for (int d = 0; d <= order; ++d) {
        append_degree(dim, d, exponents_);
        degree_end_.push_back(exponents_.size());
    }

    std::map<MultiIndex, std::uint32_t> lookup;
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
        lookup.emplace(exponents_[i], static_cast<std::uint32_t>(i));
    }

    for (std::size_t a = 0; a < exponents_.size(); ++a) {
        const int da = degree(exponents_[a]);
        // Only monomials with deg(b) <= order - deg(a) contribute: a prefix.
        const std::size_t limit = degree_end_[static_cast<std::size_t>(order - da)];
        for (std::size_t b = 0; b < limit; ++b) {
            MultiIndex sum(dim);
            for (std::size_t k = 0; k < dim; ++k) {
                sum[k] = exponents_[a][k] + exponents_[b][k];
            }
            products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), lookup.at(sum)});
        }
    }

    derivatives_.resize(dim);
    if (order >= 1) {
        const std::size_t src_end = exponents_.size();
        for (std::size_t k = 0; k < dim; ++k) {
            for (std::size_t src = 0; src < src_end; ++src) {
                const MultiIndex& alpha = exponents_[src];
                if (alpha[k] == 0) {
                    continue;
                }
                MultiIndex lowered = alpha;
                --lowered[k];
                derivatives_[k].push_back({static_cast<std::uint32_t>(src), lookup.at(lowered), alpha[k]});
            }
        }
    }
}

const MonomialBasis& MonomialBasis::get(std::size_t dim, int order)
{
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, std::unique_ptr<MonomialBasis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, order}];
    if (!slot) {
        slot.reset(new MonomialBasis(dim, order));
    }
    return *slot;
}

std::size_t MonomialBasis::index_of(const MultiIndex& alpha) const
{
    if (alpha.size() != dim_ || degree(alpha) > order_) {
        return size();
    }
    const auto it = std::find(exponents_.begin(), exponents_.end(), alpha);
    return static_cast<std::size_t>(it - exponents_.begin());
}

JetScalar::JetScalar(std::size_t dim, int order) : dim_(dim), order_(order)
{
    if (dim == 0) {
        throw InvalidArgument("jet dimension must be positive");
    }
    if (order < 0) {
        throw InvalidArgument("jet order must be non-negative");
    }
    coeffs_.assign(MonomialBasis::get(dim, order).size(), Rational(0));
}

JetScalar JetScalar::constant(std::size_t dim, int order, const Rational& value)
{
    JetScalar j(dim, order);
    j.coeffs_[0] = value;
    return j;
}

JetScalar JetScalar::coordinate(std::size_t dim, int order, std::size_t k)
{
    if (k >= dim) {
        throw InvalidArgument("coordinate index out of range");
    }
    JetScalar j(dim, order);
    if (order >= 1) {
        MultiIndex alpha(dim, 0);
        alpha[k] = 1;
        j.coeffs_[j.basis().index_of(alpha)] = 1;
    }
    return j;
}

JetScalar JetScalar::from_terms(std::size_t dim, int order,
                                const std::vector<std::pair<MultiIndex, Rational>>& terms)
{
    JetScalar j(dim, order);
    const MonomialBasis& b = j.basis();
    for (const auto& [alpha, c] : terms) {
        if (alpha.size() != dim) {
            throw DimensionMismatch("multi-index length differs from jet dimension");
        }
        const std::size_t idx = b.index_of(alpha);
        if (idx < b.size()) {
            j.coeffs_[idx] += c;
        }
    }
    return j;
}

Rational JetScalar::coefficient(const MultiIndex& alpha) const
{
    const std::size_t idx = basis().index_of(alpha);
    return idx < coeffs_.size() ? coeffs_[idx] : Rational(0);
}

bool JetScalar::is_zero() const
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return q == 0; });
}

JetScalar JetScalar::truncated(int order) const
{
    if (order >= order_) {
        return *this;
    }
    if (order < 0) {
        throw OrderExhausted("cannot truncate below order 0");
    }
    JetScalar r = *this;
    r.order_ = order;
    r.coeffs_.resize(MonomialBasis::get(dim_, order).size());
    return r;
}

JetScalar JetScalar::partial(std::size_t k) const
{
    if (k >= dim_) {
        throw InvalidArgument("coordinate index out of range");
    }
    if (order_ < 1) {
        throw OrderExhausted("partial derivative of an order-0 jet");
    }
    JetScalar r(dim_, order_ - 1);
    for (const auto& term : basis().derivative(k)) {
        if (term.dst < r.coeffs_.size()) {
            r.coeffs_[term.dst] += coeffs_[term.src] * term.factor;
        }
    }
    return r;
}

JetScalar JetScalar::inverse() const
{
    const Rational& a0 = value_at_base();
    if (a0 == 0) {
        throw NotInvertible("jet with zero constant term has no inverse");
    }
    // a = a0 (1 + e) with e nilpotent, so 1/a = (1/a0) sum_k (-e)^k.
    const Rational inv0 = 1 / a0;
    JetScalar neg_e = *this * (-inv0);
    neg_e.coeffs_[0] = 0;
    JetScalar result = constant(dim_, order_, Rational(1));
    JetScalar power = result;
    for (int k = 1; k <= order_; ++k) {
        power = power * neg_e;
        result += power;
    }
    return result * inv0;
}

void JetScalar::check_compatible(const JetScalar& other) const
{
    if (dim_ != other.dim_) {
        throw DimensionMismatch("jets of different dimension: " + std::to_string(dim_) + " vs " +
                                std::to_string(other.dim_));
    }
}

JetScalar JetScalar::operator-() const
{
    JetScalar r = *this;
    for (auto& c : r.coeffs_) {
        c = -c;
    }
    return r;
}

JetScalar& JetScalar::operator+=(const JetScalar& other)
{
    check_compatible(other);
    if (other.order_ < order_) {
        *this = truncated(other.order_);
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] += other.coeffs_[i];
    }
    return *this;
}

JetScalar& JetScalar::operator-=(const JetScalar& other)
{
    check_compatible(other);
    if (other.order_ < order_) {
        *this = truncated(other.order_);
    }
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] -= other.coeffs_[i];
    }
    return *this;
}

JetScalar& JetScalar::operator*=(const Rational& c)
{
    for (auto& q : coeffs_) {
        q *= c;
    }
    return *this;
}

JetScalar operator*(const JetScalar& a, const JetScalar& b)
{
    a.check_compatible(b);
    const int order = std::min(a.order_, b.order_);
    JetScalar r(a.dim_, order);
    Rational tmp;
    for (const auto& t : r.basis().products()) {
        const Rational& x = a.coeffs_[t.lhs];
        if (x == 0) {
            continue;
        }
        const Rational& y = b.coeffs_[t.rhs];
        if (y == 0) {
            continue;
        }
        mpq_mul(tmp.get_mpq_t(), x.get_mpq_t(), y.get_mpq_t());
        r.coeffs_[t.out] += tmp;
    }
    return r;
}

bool operator==(const JetScalar& a, const JetScalar& b)
{
    return a.dim_ == b.dim_ && a.order_ == b.order_ && a.coeffs_ == b.coeffs_;
}

std::string JetScalar::to_string() const
{
    std::ostringstream out;
    bool first = true;
    const MonomialBasis& b = basis();
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const Rational& c = coeffs_[i];
        if (c == 0) {
            continue;
        }
        const MultiIndex& alpha = b.exponent(i);
        Rational mag = abs(c);
        if (first) {
            out << (c < 0 ? "-" : "");
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;
        std::ostringstream mono;
        bool any = false;
        for (std::size_t k = 0; k < alpha.size(); ++k) {
            if (alpha[k] == 0) {
                continue;
            }
            mono << (any ? "*" : "") << 'x' << (k + 1);
            if (alpha[k] > 1) {
                mono << '^' << alpha[k];
            }
            any = true;
        }
        if (!any) {
            out << eqlab::to_string(mag);
        } else if (mag == 1) {
            out << mono.str();
        } else {
            out << eqlab::to_string(mag) << '*' << mono.str();
        }
    }
    if (first) {
        out << '0';
    }
    return out.str();
}

}  // namespace eqlab
