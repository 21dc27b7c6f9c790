#pragma once

#include "eqlab/tensor.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace eqlab {

/// A generalized Riemannian space: a non-symmetric connection Gamma^i_{jk}
/// (slots up, down, down), optionally derived from a non-symmetric metric.
class Space {
public:
    explicit Space(TensorField gamma);
    /// Builds the connection with christoffel_from_metric.
    static Space from_metric(const TensorField& metric);

    std::size_t dim() const { return gamma_.dim(); }
    const TensorField& gamma() const { return gamma_; }
    const std::optional<TensorField>& metric() const { return metric_; }

    friend bool operator==(const Space&, const Space&) = default;

private:
    TensorField gamma_;
    std::optional<TensorField> metric_;
};

struct ConnectionSplit {
    /// Gamma^i_{(jk)}: the connection of the associated space.
    TensorField sym;
    /// Gamma^i_{[jk]} / 2: the torsion tensor.
    TensorField torsion;
};

ConnectionSplit split_connection(const Space& s);

/// Covariant derivative ";" of the associated (symmetric) connection, appending a
/// covariant slot: one +Gamma term per contravariant slot, one -Gamma term per covariant slot.
TensorField cov_deriv_assoc(const TensorField& a, const Space& s);
/// Same, given the symmetric part directly.
TensorField cov_deriv_sym(const TensorField& a, const TensorField& sym);

/// Covariant derivative of kind 1..4 with respect to the non-symmetric connection.
///
///   kind 1: +Gamma^i_{ak} a^a, -Gamma^a_{jk} a_a
///   kind 2: +Gamma^i_{ka} a^a, -Gamma^a_{kj} a_a
///   kind 3: +Gamma^i_{ak} a^a, -Gamma^a_{kj} a_a
///   kind 4: +Gamma^i_{ka} a^a, -Gamma^a_{jk} a_a
///
/// Works for any valence with the same per-slot rule. Throws InvalidArgument for other kinds.
TensorField cov_deriv_kind(const TensorField& a, const Space& s, int kind);

/// R^i_{jmn} of the associated space.
TensorField curvature_R(const Space& s);
TensorField curvature_R_from_sym(const TensorField& sym);

/// Constants (u, u', v, v', w) selecting a member of the curvature family.
struct FamilyParams {
    Rational u = 0;
    Rational u_prime = 0;
    Rational v = 0;
    Rational v_prime = 0;
    Rational w = 0;

    friend bool operator==(const FamilyParams&, const FamilyParams&) = default;
};

/// The five torsion-built tensors that multiply u, u', v, v', w in K.
struct CurvatureFamilyParts {
    TensorField R;
    /// Gamma^i_{[jm];n}, Gamma^i_{[jn];m}
    TensorField torsion_cd;
    TensorField torsion_cd_swapped;
    /// T^a_{jm} T^i_{an}, T^a_{jn} T^i_{am}, T^a_{mn} T^i_{aj}
    TensorField tt_v;
    TensorField tt_v_prime;
    TensorField tt_w;

    std::array<const TensorField*, 5> coefficient_tensors() const
    {
        return {&torsion_cd, &torsion_cd_swapped, &tt_v, &tt_v_prime, &tt_w};
    }
    TensorField combine(const FamilyParams& p) const;
};

CurvatureFamilyParts curvature_family_parts(const Space& s);
TensorField curvature_K(const Space& s, const FamilyParams& p);

/// Rank of the five coefficient tensors of K, flattened at the base point and
/// concatenated across the given spaces.
std::size_t curvature_family_span_dimension(std::span<const Space> spaces);

/// Christoffel symbols of the second kind of a non-symmetric metric:
/// Gamma_{i.jk} = 1/2 (g_{ji,k} - g_{jk,i} + g_{ik,j}), Gamma^i_{jk} = h^{ia} Gamma_{a.jk}
/// with h^{ia} g_{ja} = delta^i_j. Throws NotInvertible for a singular metric at the base point.
TensorField christoffel_from_metric(const TensorField& g);

/// Jet-valued matrix inverse of a (0,2) field viewed as an N x N matrix.
std::vector<std::vector<JetScalar>> invert_jet_matrix(const std::vector<std::vector<JetScalar>>& m);

/// A space with random rational jet coefficients (numerators in [-9,9], denominators in [1,9]).
Space random_space(std::size_t dim, std::uint64_t seed, int order = 2, bool torsion_free = false);

}  // namespace eqlab
