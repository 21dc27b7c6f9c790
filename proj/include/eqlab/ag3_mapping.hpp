#pragma once

#include "eqlab/geometry.hpp"

#include <cstdint>

namespace eqlab {

/// Data of an equitorsion third-type almost geodesic mapping of kind 1 or 2.
struct AG3Mapping {
    TensorField psi;    // psi_j
    TensorField sigma;  // sigma_{jk}, symmetric
    TensorField phi;    // phi^i
    TensorField nu;     // nu_j
    JetScalar mu;
    int kind = 1;

    std::size_t dim() const { return phi.dim(); }
    /// Throws on bad valences, mixed dimensions, non-symmetric sigma or kind not in {1,2}.
    void validate() const;

    friend bool operator==(const AG3Mapping&, const AG3Mapping&) = default;
};

struct MappedPair {
    Space source;
    AG3Mapping mapping;
    Space target;
};

/// Gamma-bar^i_{jk} = Gamma^i_{jk} + psi_j delta^i_k + psi_k delta^i_j + 2 sigma_{jk} phi^i.
Space transform_connection(const Space& s, const AG3Mapping& m);

/// phi^i_{|j} - nu_j phi^i - mu delta^i_j, with "|" the covariant derivative of m.kind.
TensorField basic_equation_residual(const Space& s, const AG3Mapping& m);

/// Data of the inverse mapping. Throws InvalidArgument when (s, m) does not satisfy the
/// basic equation, and std::logic_error if the computed inverse fails its own postconditions.
AG3Mapping reciprocity_inverse(const Space& s, const AG3Mapping& m);

/// Mapping data of the target side of a pair.
inline AG3Mapping inverse_mapping(const MappedPair& pair) { return reciprocity_inverse(pair.source, pair.mapping); }

/// Gamma^a_{(ja)} + sigma_{ja} phi^a.
TensorField lambda_vector(const TensorField& sym, const AG3Mapping& m);

struct GammaDiffResult {
    /// Gamma-bar^i_{(jk)} - Gamma^i_{(jk)}
    TensorField value;
    /// Factorized right side minus the direct difference.
    TensorField residual;
    bool holds() const { return residual.is_zero(); }
};

/// Evaluates the factorized form of the symmetric-part difference from both sides'
/// (Gamma, sigma, phi) and compares it with the direct difference.
GammaDiffResult gamma_diff_factorized(const MappedPair& pair);

struct SynthOptions {
    int order = 2;
    /// Build a symmetric source connection (torsion zero) instead of a generic one.
    bool torsion_free = false;
    /// Zero the free part B and use nu = 0, constant mu and constant phi.
    bool minimal = false;
};

/// Random exact witness: a source connection solving the basic equation of `kind`
/// for randomly drawn (phi, nu, mu), plus psi, sigma and the transformed target.
MappedPair synthesize_instance(std::size_t n, int kind, std::uint64_t seed, const SynthOptions& opts = {});

}  // namespace eqlab
