#pragma once

#include "eqlab/jet.hpp"

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace eqlab {

enum class Variance { Up, Down };

using Valence = std::vector<Variance>;

std::string to_string(Variance v);
Variance variance_from_string(const std::string& s);

/// Dense field of JetScalars with a positional slot signature.
///
/// Components are stored row-major: the last slot varies fastest. Slots are
/// identified by position only; names live in the DSL layer.
class TensorField {
public:
    TensorField() = default;
    /// Zero field of the given valence.
    TensorField(std::size_t dim, Valence valence, int order);
    TensorField(std::size_t dim, Valence valence, std::vector<JetScalar> components);

    static TensorField scalar(const JetScalar& value);
    /// delta^i_j at the requested order.
    static TensorField kronecker(std::size_t dim, int order);

    std::size_t dim() const { return dim_; }
    const Valence& valence() const { return valence_; }
    std::size_t rank() const { return valence_.size(); }
    std::size_t size() const { return components_.size(); }
    /// Truncation order shared by every component.
    int order() const { return components_.front().order(); }
    std::span<const JetScalar> components() const { return components_; }

    std::size_t offset(std::span<const std::size_t> idx) const;
    const JetScalar& at(std::span<const std::size_t> idx) const { return components_[offset(idx)]; }
    JetScalar& at(std::span<const std::size_t> idx) { return components_[offset(idx)]; }
    const JetScalar& at(std::initializer_list<std::size_t> idx) const
    {
        return at(std::span<const std::size_t>(idx.begin(), idx.size()));
    }
    JetScalar& at(std::initializer_list<std::size_t> idx)
    {
        return at(std::span<const std::size_t>(idx.begin(), idx.size()));
    }
    const JetScalar& flat(std::size_t k) const { return components_[k]; }
    JetScalar& flat(std::size_t k) { return components_[k]; }

    template <class... I>
    const JetScalar& operator()(I... idx) const
    {
        const std::size_t arr[] = {static_cast<std::size_t>(idx)...};
        return at(std::span<const std::size_t>(arr, sizeof...(I)));
    }
    template <class... I>
    JetScalar& operator()(I... idx)
    {
        const std::size_t arr[] = {static_cast<std::size_t>(idx)...};
        return at(std::span<const std::size_t>(arr, sizeof...(I)));
    }

    bool is_zero() const;
    /// Every component truncated to `order`.
    TensorField truncated(int order) const;

    friend bool operator==(const TensorField&, const TensorField&) = default;

private:
    std::size_t dim_ = 0;
    Valence valence_;
    std::vector<JetScalar> components_;
};

/// Visits every index tuple of `rank` slots over [0, dim) in row-major order.
void for_each_index(std::size_t dim, std::size_t rank, const std::function<void(std::span<const std::size_t>)>& fn);

/// Builds a field component-wise from an index callback.
TensorField build_tensor(std::size_t dim, Valence valence, const std::function<JetScalar(std::span<const std::size_t>)>& fn);

TensorField tensor_add(const TensorField& a, const TensorField& b);
TensorField tensor_sub(const TensorField& a, const TensorField& b);
TensorField tensor_scale(const Rational& c, const TensorField& a);
TensorField tensor_scale(const JetScalar& c, const TensorField& a);
TensorField outer(const TensorField& a, const TensorField& b);

/// Sums over a contravariant/covariant slot pair; both slots are removed.
TensorField contract(const TensorField& a, std::size_t slot_up, std::size_t slot_down);

/// T(s1,s2) - T(s2,s1) with no factor 1/2.
TensorField antisym_pair_nodiv(const TensorField& a, std::size_t s1, std::size_t s2);
/// (T(s1,s2) + T(s2,s1)) / 2.
TensorField sym_pair(const TensorField& a, std::size_t s1, std::size_t s2);
/// (T(s1,s2) - T(s2,s1)) / 2.
TensorField antisym_pair(const TensorField& a, std::size_t s1, std::size_t s2);

/// Exchanges two slots of the same variance (component relabelling).
TensorField swap_slots(const TensorField& a, std::size_t s1, std::size_t s2);
/// Result slot k is input slot perm[k].
TensorField permute_slots(const TensorField& a, std::span<const std::size_t> perm);

/// Componentwise comma derivative; the valence is unchanged.
TensorField partial_deriv_field(const TensorField& a, std::size_t k);

/// value_at_base of every component, row-major.
std::vector<Rational> flatten_at_base(const TensorField& a);

inline TensorField operator+(const TensorField& a, const TensorField& b) { return tensor_add(a, b); }
inline TensorField operator-(const TensorField& a, const TensorField& b) { return tensor_sub(a, b); }
inline TensorField operator*(const Rational& c, const TensorField& a) { return tensor_scale(c, a); }

}  // namespace eqlab
