#include "eqlab/tensor.hpp"

#include "eqlab/errors.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace eqlab {

std::string to_string(Variance v) { return v == Variance::Up ? "up" : "down"; }

Variance variance_from_string(const std::string& s)
{
    if (s == "up") {
        return Variance::Up;
    }
    if (s == "down") {
        return Variance::Down;
    }
    throw InvalidArgument("unknown variance: " + s);
}

namespace {

std::size_t ipow(std::size_t base, std::size_t exp)
{
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

void require_same_shape(const TensorField& a, const TensorField& b)
{
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("tensor dimensions differ");
    }
    if (a.valence() != b.valence()) {
        throw ValenceMismatch("tensor valences differ");
    }
}

void require_slot(const TensorField& a, std::size_t s)
{
    if (s >= a.rank()) {
        throw InvalidArgument("slot index out of range");
    }
}

}  // namespace

TensorField::TensorField(std::size_t dim, Valence valence, int order)
    : dim_(dim), valence_(std::move(valence)), components_(ipow(dim, valence_.size()), JetScalar(dim, order))
{
}

TensorField::TensorField(std::size_t dim, Valence valence, std::vector<JetScalar> components)
    : dim_(dim), valence_(std::move(valence)), components_(std::move(components))
{
    if (components_.size() != ipow(dim, valence_.size())) {
        throw DimensionMismatch("component count must be dim^rank");
    }
    const int order = components_.front().order();
    for (const auto& c : components_) {
        if (c.dim() != dim) {
            throw DimensionMismatch("component jet dimension differs from tensor dimension");
        }
        if (c.order() != order) {
            throw InvalidArgument("components of one tensor must share a truncation order");
        }
    }
}

TensorField TensorField::scalar(const JetScalar& value) { return TensorField(value.dim(), {}, {value}); }

TensorField TensorField::kronecker(std::size_t dim, int order)
{
    TensorField d(dim, {Variance::Up, Variance::Down}, order);
    for (std::size_t i = 0; i < dim; ++i) {
        d(i, i) = JetScalar::constant(dim, order, Rational(1));
    }
    return d;
}

std::size_t TensorField::offset(std::span<const std::size_t> idx) const
{
    if (idx.size() != valence_.size()) {
        throw InvalidArgument("index tuple length differs from tensor rank");
    }
    std::size_t off = 0;
    for (std::size_t k : idx) {
        if (k >= dim_) {
            throw InvalidArgument("tensor index out of range");
        }
        off = off * dim_ + k;
    }
    return off;
}

bool TensorField::is_zero() const
{
    return std::all_of(components_.begin(), components_.end(), [](const JetScalar& j) { return j.is_zero(); });
}

TensorField TensorField::truncated(int order) const
{
    TensorField r = *this;
    for (auto& c : r.components_) {
        c = c.truncated(order);
    }
    return r;
}

void for_each_index(std::size_t dim, std::size_t rank, const std::function<void(std::span<const std::size_t>)>& fn)
{
    std::vector<std::size_t> idx(rank, 0);
    while (true) {
        fn(idx);
        std::size_t pos = rank;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < dim) {
                break;
            }
            idx[pos] = 0;
            if (pos == 0) {
                return;
            }
        }
        if (rank == 0) {
            return;
        }
    }
}

TensorField build_tensor(std::size_t dim, Valence valence,
                         const std::function<JetScalar(std::span<const std::size_t>)>& fn)
{
    std::vector<JetScalar> comps;
    comps.reserve(ipow(dim, valence.size()));
    for_each_index(dim, valence.size(), [&](std::span<const std::size_t> idx) { comps.push_back(fn(idx)); });
    // Components built independently may differ in order; unify at the minimum.
    int order = comps.front().order();
    for (const auto& c : comps) {
        order = std::min(order, c.order());
    }
    for (auto& c : comps) {
        c = c.truncated(order);
    }
    return TensorField(dim, std::move(valence), std::move(comps));
}

TensorField tensor_add(const TensorField& a, const TensorField& b)
{
    require_same_shape(a, b);
    std::vector<JetScalar> comps;
    comps.reserve(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        comps.push_back(a.flat(k) + b.flat(k));
    }
    return TensorField(a.dim(), a.valence(), std::move(comps));
}

TensorField tensor_sub(const TensorField& a, const TensorField& b)
{
    require_same_shape(a, b);
    std::vector<JetScalar> comps;
    comps.reserve(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        comps.push_back(a.flat(k) - b.flat(k));
    }
    return TensorField(a.dim(), a.valence(), std::move(comps));
}

TensorField tensor_scale(const Rational& c, const TensorField& a)
{
    std::vector<JetScalar> comps(a.components().begin(), a.components().end());
    for (auto& j : comps) {
        j *= c;
    }
    return TensorField(a.dim(), a.valence(), std::move(comps));
}

TensorField tensor_scale(const JetScalar& c, const TensorField& a)
{
    std::vector<JetScalar> comps;
    comps.reserve(a.size());
    for (const auto& j : a.components()) {
        comps.push_back(c * j);
    }
    return TensorField(a.dim(), a.valence(), std::move(comps));
}

TensorField outer(const TensorField& a, const TensorField& b)
{
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("tensor dimensions differ");
    }
    Valence v = a.valence();
    v.insert(v.end(), b.valence().begin(), b.valence().end());
    std::vector<JetScalar> comps;
    comps.reserve(a.size() * b.size());
    for (const auto& x : a.components()) {
        for (const auto& y : b.components()) {
            comps.push_back(x * y);
        }
    }
    return TensorField(a.dim(), std::move(v), std::move(comps));
}

TensorField contract(const TensorField& a, std::size_t slot_up, std::size_t slot_down)
{
    require_slot(a, slot_up);
    require_slot(a, slot_down);
    if (slot_up == slot_down || a.valence()[slot_up] != Variance::Up || a.valence()[slot_down] != Variance::Down) {
        throw ValenceMismatch("contraction needs one contravariant and one covariant slot");
    }
    Valence v;
    for (std::size_t s = 0; s < a.rank(); ++s) {
        if (s != slot_up && s != slot_down) {
            v.push_back(a.valence()[s]);
        }
    }
    const std::size_t n = a.dim();
    std::vector<std::size_t> full(a.rank());
    return build_tensor(n, v, [&](std::span<const std::size_t> idx) {
        std::size_t src = 0;
        for (std::size_t s = 0; s < a.rank(); ++s) {
            if (s != slot_up && s != slot_down) {
                full[s] = idx[src++];
            }
        }
        JetScalar sum(n, a.order());
        for (std::size_t alpha = 0; alpha < n; ++alpha) {
            full[slot_up] = alpha;
            full[slot_down] = alpha;
            sum += a.at(full);
        }
        return sum;
    });
}

TensorField swap_slots(const TensorField& a, std::size_t s1, std::size_t s2)
{
    require_slot(a, s1);
    require_slot(a, s2);
    if (a.valence()[s1] != a.valence()[s2]) {
        throw ValenceMismatch("swapped slots must share variance");
    }
    std::vector<std::size_t> perm(a.rank());
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[s1], perm[s2]);
    return permute_slots(a, perm);
}

TensorField permute_slots(const TensorField& a, std::span<const std::size_t> perm)
{
    if (perm.size() != a.rank()) {
        throw InvalidArgument("permutation length differs from tensor rank");
    }
    Valence v(a.rank());
    for (std::size_t k = 0; k < a.rank(); ++k) {
        require_slot(a, perm[k]);
        v[k] = a.valence()[perm[k]];
    }
    std::vector<std::size_t> src(a.rank());
    return build_tensor(a.dim(), v, [&](std::span<const std::size_t> idx) {
        for (std::size_t k = 0; k < idx.size(); ++k) {
            src[perm[k]] = idx[k];
        }
        return a.at(src);
    });
}

TensorField antisym_pair_nodiv(const TensorField& a, std::size_t s1, std::size_t s2)
{
    return tensor_sub(a, swap_slots(a, s1, s2));
}

TensorField sym_pair(const TensorField& a, std::size_t s1, std::size_t s2)
{
    return tensor_scale(Rational(1, 2), tensor_add(a, swap_slots(a, s1, s2)));
}

TensorField antisym_pair(const TensorField& a, std::size_t s1, std::size_t s2)
{
    return tensor_scale(Rational(1, 2), antisym_pair_nodiv(a, s1, s2));
}

TensorField partial_deriv_field(const TensorField& a, std::size_t k)
{
    if (k >= a.dim()) {
        throw InvalidArgument("coordinate index out of range");
    }
    std::vector<JetScalar> comps;
    comps.reserve(a.size());
    for (const auto& j : a.components()) {
        comps.push_back(j.partial(k));
    }
    return TensorField(a.dim(), a.valence(), std::move(comps));
}

std::vector<Rational> flatten_at_base(const TensorField& a)
{
    std::vector<Rational> out;
    out.reserve(a.size());
    for (const auto& j : a.components()) {
        out.push_back(j.value_at_base());
    }
    return out;
}

}  // namespace eqlab
