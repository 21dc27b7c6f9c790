#include "eqlab/errors.hpp"
#include "eqlab/invariants.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace eqlab;
using eqlab::testing::c;
using eqlab::testing::random_tensor;

namespace {

const Valence kConn{Variance::Up, Variance::Down, Variance::Down};

/// Flat source, constant phi, nu = 0, mu = 0, psi = sigma = 0: the identity mapping.
MappedPair identity_pair(std::size_t n, const Space& s)
{
    AG3Mapping m;
    m.psi = TensorField(n, {Variance::Down}, 2);
    m.sigma = TensorField(n, {Variance::Down, Variance::Down}, 2);
    m.phi = TensorField(n, {Variance::Up}, 2);
    m.phi(0) = c(n, 2, 1);
    m.nu = TensorField(n, {Variance::Down}, 2);
    m.mu = JetScalar(n, 2);
    return {s, m, s};
}

Space flat(std::size_t n) { return Space(TensorField(n, kConn, 2)); }

/// A connection whose lower indices are purely antisymmetric.
Space torsion_only(std::size_t n, std::uint64_t seed)
{
    const Space s = random_space(n, seed);
    return Space(Rational(2) * split_connection(s).torsion);
}

}  // namespace

TEST_CASE("coefficient table")
{
    const RationalMatrix m = sigma_coeff_matrix(3);
    CHECK(m.rows() == 8);
    CHECK(m.cols() == 20);
    std::vector<Rational> row1(20, 0);
    row1[0] = 1;
    row1[2] = -1;
    row1[4] = -1;
    CHECK(std::vector<Rational>(m.row(0).begin(), m.row(0).end()) == row1);
    for (std::size_t n = 2; n <= 6; ++n) {
        CHECK(rank_exact(sigma_coeff_matrix(n)) == 4);
        CHECK(rank_exact(sigma_coeff_matrix_swapped(n)) == 4);
        const Rational a = make_rational(1, static_cast<long>(n + 1));
        const RationalMatrix t = sigma_coeff_matrix(n);
        for (std::size_t p = 0; p < 8; ++p) {
            for (Rational e : t.row(p)) {
                const bool allowed = e == 0 || abs(e) == 1 || abs(e) == a || abs(e) == 2 * a;
                CHECK(allowed);
            }
        }
    }
}

TEST_CASE("U swap table is an involution with two sign flips")
{
    int negated = 0;
    for (int theta = 1; theta <= 20; ++theta) {
        const auto [image, sign] = U_swap(theta);
        CHECK(U_swap(image).first == theta);
        negated += sign < 0;
    }
    CHECK(negated == 2);
    CHECK(U_swap(8).second == -1);
    CHECK(U_swap(14).second == -1);
    CHECK(U_swap(5) == std::pair{5, 1});
    CHECK(U_swap(17).first == 18);
    CHECK_THROWS_AS(U_swap(21), InvalidArgument);
}

TEST_CASE("sigma_p expands in the U basis with the table")
{
    std::vector<MappedPair> pairs;
    for (int kind = 1; kind <= 2; ++kind) {
        for (std::uint64_t seed = 0; seed < 2; ++seed) {
            pairs.push_back(synthesize_instance(3, kind, seed));
        }
    }
    const CoeffValidation v = validate_sigma_coeff_matrix(pairs);
    CHECK(v.ok);
    CHECK(v.mismatches.empty());
    CHECK(v.failing_rows.empty());
    CHECK(v.fit_rank == 20);
}

TEST_CASE("the swapped sigma equals the swapped table expansion")
{
    const MappedPair p = synthesize_instance(3, 1, 3);
    InvariantBundle b(p.source, p.mapping);
    const RationalMatrix t = sigma_coeff_matrix_swapped(3);
    for (int q = 1; q <= 8; ++q) {
        TensorField sum(3, {Variance::Up, Variance::Down, Variance::Down, Variance::Down}, b.U(1).order());
        for (int theta = 1; theta <= 20; ++theta) {
            sum = sum + t(static_cast<std::size_t>(q - 1), static_cast<std::size_t>(theta - 1)) * b.U(theta);
        }
        CHECK(sum == b.sigma_swapped(q));
    }
}

TEST_CASE("torsion-free spaces")
{
    const MappedPair p = synthesize_instance(3, 1, 4, {.torsion_free = true});
    InvariantBundle b(p.source, p.mapping);
    for (int theta = 1; theta <= 20; ++theta) {
        CHECK(b.U(theta).is_zero());
    }
    for (int k = 1; k <= 8; ++k) {
        CHECK(b.sigma(k).is_zero());
        CHECK(b.T_tilde(k).is_zero());
    }
    CHECK(b.eta(1) == b.eta(2));
    CHECK(torsion_cd_difference_check(p, 1).pass);
    std::vector<MappedPair> pairs{p, synthesize_instance(3, 1, 5, {.torsion_free = true})};
    CHECK(family_span_dimension(pairs, 2, 1) < 6);
    CHECK(t_tilde_span_dimension(pairs) == 0);
}

TEST_CASE("U6 vanishes when the symmetric trace does")
{
    const Space s = torsion_only(3, 6);
    const MappedPair p = identity_pair(3, s);
    CHECK(U_theta(s, p.mapping, 6).is_zero());
}

TEST_CASE("identity mapping on flat space")
{
    const MappedPair p = identity_pair(3, flat(3));
    for (int which = 1; which <= 2; ++which) {
        CHECK(eta_star(p.source, p.mapping, which).is_zero());
        CHECK(W_star(p.source, p.mapping, which).is_zero());
    }
    for (int rho = 1; rho <= 8; ++rho) {
        CHECK(T_tilde(p.source, p.mapping, rho).is_zero());
        CHECK(torsion_cd_difference_check(p, rho).pass);
    }
    CHECK(R_and_K_transformation_check(p, 1, 2, 3, {1, 2, 3, 4, 5}).pass);
}

TEST_CASE("identity mapping on a curved space")
{
    const Space s = random_space(3, 7);
    const MappedPair p = identity_pair(3, s);
    // phi is constant and nu = mu = 0, so the basic equation needs Gamma^i_{a j} phi^a = 0; use it only
    // for checks that do not go through the inverse.
    const FamilyParams params{1, 2, 3, 4, 5};
    CHECK(correlation_check(p, 1, 4, 5, params).pass);
}

TEST_CASE("family with zero constants is W-star")
{
    const MappedPair p = synthesize_instance(3, 2, 8);
    for (int which = 1; which <= 2; ++which) {
        CHECK(W_family(p.source, p.mapping, which, 3, 6, {}) == W_star(p.source, p.mapping, which));
    }
}

TEST_CASE("identities on synthesized pairs")
{
    RationalSampler rng(9);
    for (int kind = 1; kind <= 2; ++kind) {
        const MappedPair p = synthesize_instance(3, kind, 10 + static_cast<std::uint64_t>(kind));
        for (int k = 1; k <= 8; ++k) {
            const auto r = torsion_cd_difference_check(p, k);
            CHECK(r.pass);
            CHECK(r.max_abs_residual_num_digits == 0);
        }
        const FamilyParams params{rng.parameter(), rng.parameter(), rng.parameter(), rng.parameter(),
                                  rng.parameter()};
        CHECK(correlation_check(p, 1, 2, 7, params).pass);
        CHECK(correlation_check(p, 2, 8, 1, params).pass);
    }
}

TEST_CASE("T-tilde invariants")
{
    std::vector<MappedPair> pairs;
    for (int kind = 1; kind <= 2; ++kind) {
        const MappedPair p = synthesize_instance(3, kind, 20);
        InvariantBundle src(p.source, p.mapping), tgt(p.target, inverse_mapping(p));
        for (int rho = 1; rho <= 8; ++rho) {
            CHECK(src.T_tilde(rho) == tgt.T_tilde(rho));
        }
        pairs.push_back(p);
    }
    CHECK(t_tilde_span_dimension(pairs) == 4);
    CHECK_THROWS_AS(T_tilde(pairs[0].source, pairs[0].mapping, 9), InvalidArgument);
}

// The printed W-star family is not an invariant of the synthesized mappings. These cases pin that
// finding and the invariance of the corrected candidate; see the README.
TEST_CASE("printed W-star is not invariant but the derived W is")
{
    for (int kind = 1; kind <= 2; ++kind) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const MappedPair p = synthesize_instance(3, kind, seed);
            InvariantBundle src(p.source, p.mapping), tgt(p.target, inverse_mapping(p));
            for (int which = 1; which <= 2; ++which) {
                CHECK_FALSE(src.W(which) == tgt.W(which));
            }
            CHECK(src.W_derived() == tgt.W_derived());
            CHECK_FALSE(R_and_K_transformation_check(p, 1, 1, 1, {}).pass);
        }
    }
}

TEST_CASE("W matrix ranks")
{
    for (std::size_t n = 2; n <= 6; ++n) {
        const ParamMatrix w = build_W_matrix(n);
        CHECK(w.rows() == 64);
        CHECK(w.cols() == 26);
        CHECK(generic_rank(w, 5, n) == 6);
    }
    // With u = u' = 0 every row collapses to [1, 0, ..., 0, 0, 0, v, v', w].
    const ParamMatrix w = build_W_matrix(3);
    const std::vector<Rational> vals{0, 0, 3, 5, 7};
    const RationalMatrix m = w.substitute(vals);
    for (std::size_t r = 0; r < 64; ++r) {
        CHECK(std::vector<Rational>(m.row(r).begin(), m.row(r).end()) == std::vector<Rational>(m.row(0).begin(), m.row(0).end()));
    }
    std::size_t nonzero = 0;
    for (const Rational& e : m.row(0)) {
        nonzero += e != 0;
    }
    CHECK(nonzero == 4);
    CHECK(rank_exact(m) == 1);
}

TEST_CASE("numeric family span")
{
    std::vector<MappedPair> pairs{synthesize_instance(3, 1, 30), synthesize_instance(3, 1, 31)};
    CHECK(family_span_dimension(pairs, 3, 1) == 6);
    CHECK(family_span_dimension(pairs, 1, 2) == 6);
    CHECK(family_span_dimension(pairs, 3, 1, 2) == 6);
    CHECK(family_span_dimension({}, 3, 1) == 0);
}
