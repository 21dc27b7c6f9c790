#pragma once

#include "eqlab/ag3_mapping.hpp"
#include "eqlab/linalg.hpp"
#include "eqlab/report.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <tuple>

namespace eqlab {

/// Everything derived from one (Space, AG3Mapping) pair, computed lazily and cached.
///
/// Not thread-safe; build one per thread.
class InvariantBundle {
public:
    InvariantBundle(Space space, AG3Mapping mapping);

    const Space& space() const { return space_; }
    const AG3Mapping& mapping() const { return mapping_; }
    std::size_t dim() const { return space_.dim(); }

    const TensorField& sym() const { return split_.sym; }
    const TensorField& torsion() const { return split_.torsion; }
    /// Gamma^a_{(ja)}, treated as a (0,1) field.
    const TensorField& trace() const { return trace_; }
    /// sigma_{ja} phi^a
    const TensorField& sigma_phi() const { return sigma_phi_; }

    const CurvatureFamilyParts& curvature_parts();
    const TensorField& R() { return curvature_parts().R; }
    /// Gamma^i_{[jm];n}
    const TensorField& torsion_cd() { return curvature_parts().torsion_cd; }

    const TensorField& eta(int which);
    /// W-star minus R.
    const TensorField& W_correction(int which);
    const TensorField& W(int which);
    /// theta in 1..20
    const TensorField& U(int theta);
    /// p in 1..8
    const TensorField& sigma(int p);
    /// sigma_(p) with m and n exchanged.
    const TensorField& sigma_swapped(int p);
    const TensorField& T_tilde(int rho);
    /// The last K is kept, so a grid of (p, q) cells at one parameter draw builds it once.
    const TensorField& K(const FamilyParams& params);
    TensorField family(int which, int p, int q, const FamilyParams& params);
    const TensorField& W_derived();

private:
    Space space_;
    AG3Mapping mapping_;
    ConnectionSplit split_;
    TensorField trace_;
    TensorField sigma_phi_;
    std::unique_ptr<CurvatureFamilyParts> parts_;
    std::map<int, TensorField> eta_, w_corr_, w_, u_, sigma_, sigma_swapped_, t_tilde_;
    std::unique_ptr<TensorField> w_derived_;
    std::optional<std::pair<FamilyParams, TensorField>> k_last_;
};

TensorField eta_star(const Space& s, const AG3Mapping& m, int which);
TensorField W_star(const Space& s, const AG3Mapping& m, int which);
TensorField U_theta(const Space& s, const AG3Mapping& m, int theta);
TensorField sigma_p(const Space& s, const AG3Mapping& m, int p);
TensorField T_tilde(const Space& s, const AG3Mapping& m, int rho);
TensorField W_family(const Space& s, const AG3Mapping& m, int which, int p, int q, const FamilyParams& params);

/// A corrected W candidate that is invariant for mappings of either kind. It is the
/// W-star shape with the mu-sigma and phi-group signs flipped, the nu term and the
/// delta^i_j c_[m,n] term added, and the torsion term signed by the mapping kind.
/// Diagnostic only; see the README.
TensorField W_derived(const Space& s, const AG3Mapping& m);

/// 8 x 20 coefficients of the sigma_(p) in the U basis; entries depend on N through 1/(N+1).
RationalMatrix sigma_coeff_matrix(std::size_t n);

/// Rows of sigma_coeff_matrix transported through the m <-> n swap.
RationalMatrix sigma_coeff_matrix_swapped(std::size_t n);

/// Image of U_theta (1-based) under m <-> n: the index and a sign.
std::pair<int, int> U_swap(int theta);

struct CoeffValidation {
    bool ok = true;
    /// (p, theta) of every entry that disagrees with an exact fit, 1-based.
    std::vector<std::pair<int, int>> mismatches;
    /// p of every sigma_(p) whose U expansion leaves a nonzero residual.
    std::vector<int> failing_rows;
    /// Rank of the stacked U system used for the fit (20 means the fit is unique).
    std::size_t fit_rank = 0;
};

/// Checks sigma_p = sum_theta u^p_theta U_theta on the given instances, both directly as
/// tensors and by fitting the coefficients exactly from flattened values.
CoeffValidation validate_sigma_coeff_matrix(std::span<const MappedPair> pairs);

/// Parameter-bearing 64 x 26 matrix with parameters (u, u', v, v', w), rows ordered
/// (p, q) = (1,1), (1,2), ..., (8,8).
ParamMatrix build_W_matrix(std::size_t n);

/// Numeric cross-check of the family count. For each of `samples` random parameter draws,
/// the 64 families of kind `which` are evaluated on every pair, flattened at the base
/// point and concatenated into one row per (p, q); returns the largest row rank seen.
std::size_t family_span_dimension(std::span<const MappedPair> pairs, int samples, std::uint64_t seed,
                                  int which = 1);

/// Span dimension of the U-combination parts sum_theta u^rho_theta U_theta across pairs.
std::size_t t_tilde_span_dimension(std::span<const MappedPair> pairs);

/// Torsion covariant-derivative difference against its expansion and against each
/// sigma-bar_(p) - sigma_(p).
VerificationReport torsion_cd_difference_check(const MappedPair& pair, int p);
/// Same, reusing bundles built for the source and for the target with the inverse mapping.
VerificationReport torsion_cd_difference_check(InvariantBundle& src, InvariantBundle& tgt, int p);

/// R-bar and K-bar transformation laws, both sides evaluated independently.
VerificationReport R_and_K_transformation_check(const MappedPair& pair, int which, int p, int q,
                                                const FamilyParams& params);
VerificationReport R_and_K_transformation_check(InvariantBundle& src, InvariantBundle& tgt, int which, int p, int q,
                                                const FamilyParams& params);

/// The family equals W-star plus the explicit torsion terms minus the sigma terms.
VerificationReport correlation_check(const MappedPair& pair, int which, int p, int q, const FamilyParams& params);
VerificationReport correlation_check(InvariantBundle& b, int which, int p, int q, const FamilyParams& params);

}  // namespace eqlab
