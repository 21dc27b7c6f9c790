#include "eqlab/ag3_mapping.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/json_io.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace eqlab;
using eqlab::testing::c;
using eqlab::testing::random_tensor;
using eqlab::testing::x;

namespace {

const Valence kUp{Variance::Up};
const Valence kDown{Variance::Down};

AG3Mapping identity_mapping(std::size_t n, int order, const TensorField& phi, const TensorField& nu, const JetScalar& mu,
                            int kind = 1)
{
    AG3Mapping m;
    m.psi = TensorField(n, kDown, order);
    m.sigma = TensorField(n, {Variance::Down, Variance::Down}, order);
    m.phi = phi;
    m.nu = nu;
    m.mu = mu;
    m.kind = kind;
    return m;
}

/// phi^i_{|j} - nu_j phi^i - mu delta^i_j from cov_deriv_kind directly.
TensorField residual_oracle(const Space& s, const AG3Mapping& m)
{
    const TensorField d = cov_deriv_kind(m.phi, s, m.kind);
    const std::size_t n = s.dim();
    return build_tensor(n, {Variance::Up, Variance::Down}, [&](std::span<const std::size_t> i) {
        JetScalar v = d(i[0], i[1]) - m.nu(i[1]) * m.phi(i[0]);
        if (i[0] == i[1]) {
            v -= m.mu;
        }
        return v;
    });
}

}  // namespace

TEST_CASE("identity mapping leaves the connection unchanged")
{
    const Space s = random_space(3, 1);
    RationalSampler rng(1);
    const AG3Mapping m = identity_mapping(3, 2, random_tensor(rng, 3, kUp, 2), random_tensor(rng, 3, kDown, 2),
                                          c(3, 2, 1));
    CHECK(transform_connection(s, m) == s);
}

TEST_CASE("flat basic equation")
{
    const std::size_t n = 3;
    const Rational k = make_rational(5, 2);
    const TensorField phi = build_tensor(n, kUp, [&](std::span<const std::size_t> i) { return k * x(n, 2, i[0]); });
    const AG3Mapping m = identity_mapping(n, 2, phi, TensorField(n, kDown, 2), JetScalar::constant(n, 2, k));
    const Space flat(TensorField(n, {Variance::Up, Variance::Down, Variance::Down}, 2));
    CHECK(basic_equation_residual(flat, m).is_zero());

    const AG3Mapping inv = reciprocity_inverse(flat, m);
    CHECK(inv.nu == m.nu);
    CHECK(inv.mu == m.mu);
    CHECK(inv.phi == m.phi);
}

TEST_CASE("unrelated data leaves a residual")
{
    RationalSampler rng(2);
    const AG3Mapping m = identity_mapping(3, 2, random_tensor(rng, 3, kUp, 2), random_tensor(rng, 3, kDown, 2),
                                          random_tensor(rng, 3, {}, 2).flat(0));
    const Space s = random_space(3, 2);
    CHECK_FALSE(basic_equation_residual(s, m).is_zero());
    CHECK_THROWS_AS(reciprocity_inverse(s, m), InvalidArgument);
}

TEST_CASE("synthesized instances solve the basic equation")
{
    for (int kind = 1; kind <= 2; ++kind) {
        for (std::size_t n = 2; n <= 4; ++n) {
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                const MappedPair p = synthesize_instance(n, kind, seed);
                REQUIRE(residual_oracle(p.source, p.mapping).is_zero());
                REQUIRE(basic_equation_residual(p.source, p.mapping).is_zero());
                REQUIRE(transform_connection(p.source, p.mapping) == p.target);
                REQUIRE(split_connection(p.source).torsion == split_connection(p.target).torsion);
                const AG3Mapping inv = inverse_mapping(p);
                REQUIRE(basic_equation_residual(p.target, inv).is_zero());
                REQUIRE(transform_connection(p.target, inv) == p.source);
                REQUIRE(inv.psi == Rational(-1) * p.mapping.psi);
                REQUIRE(inv.sigma == Rational(-1) * p.mapping.sigma);
                REQUIRE(inv.phi == p.mapping.phi);
                REQUIRE(gamma_diff_factorized(p).holds());
            }
        }
    }
}

TEST_CASE("synthesis is deterministic and honours its options")
{
    CHECK(pair_to_json(synthesize_instance(3, 1, 42)) == pair_to_json(synthesize_instance(3, 1, 42)));
    CHECK_FALSE(pair_to_json(synthesize_instance(3, 1, 42)) == pair_to_json(synthesize_instance(3, 1, 43)));
    const MappedPair o3 = synthesize_instance(3, 2, 5, {.order = 3});
    CHECK(o3.source.gamma().order() >= 2);
    CHECK(basic_equation_residual(o3.source, o3.mapping).is_zero());

    const MappedPair tf = synthesize_instance(3, 1, 5, {.torsion_free = true});
    CHECK(split_connection(tf.source).torsion.is_zero());
    CHECK(basic_equation_residual(tf.source, tf.mapping).is_zero());

    CHECK_THROWS_AS(synthesize_instance(1, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(synthesize_instance(3, 3, 0), InvalidArgument);
}

TEST_CASE("minimal synthesis has the hand-expanded connection")
{
    const MappedPair p = synthesize_instance(3, 1, 9, {.minimal = true});
    const AG3Mapping& m = p.mapping;
    const int order = p.source.gamma().order();
    TensorField w(3, kDown, order);
    w(0) = m.phi(0).inverse().truncated(order);
    const TensorField& g = p.source.gamma();
    const TensorField& t = split_connection(p.source).torsion;
    const JetScalar mu = m.mu.truncated(order);
    for_each_index(3, 3, [&](std::span<const std::size_t> i) {
        const JetScalar dij = c(3, order, i[0] == i[2] ? 1 : 0), dik = c(3, order, i[0] == i[1] ? 1 : 0);
        CHECK(g(i[0], i[1], i[2]) == mu * dij * w(i[1]));
        CHECK(t(i[0], i[1], i[2]) == Rational(1, 2) * mu * (dij * w(i[1]) - dik * w(i[2])));
    });
}

TEST_CASE("identity mapping has no factorized difference")
{
    const Space s = random_space(3, 3);
    RationalSampler rng(3);
    const std::size_t n = 3;
    const TensorField phi = build_tensor(n, kUp, [&](std::span<const std::size_t> i) { return x(n, 2, i[0]); });
    const Space flat(TensorField(n, {Variance::Up, Variance::Down, Variance::Down}, 2));
    const AG3Mapping m = identity_mapping(n, 2, phi, TensorField(n, kDown, 2), c(n, 2, 1));
    const GammaDiffResult r = gamma_diff_factorized({flat, m, flat});
    CHECK(r.value.is_zero());
    CHECK(r.holds());
}

TEST_CASE("mapping validation")
{
    MappedPair p = synthesize_instance(3, 1, 1);
    AG3Mapping bad = p.mapping;
    bad.sigma(0, 1) += c(3, bad.sigma.order(), 1);
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = p.mapping;
    bad.kind = 4;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = p.mapping;
    bad.phi = TensorField(3, kDown, 2);
    CHECK_THROWS_AS(bad.validate(), ValenceMismatch);
}

TEST_CASE("pair json round trip")
{
    const MappedPair p = synthesize_instance(3, 2, 8);
    const MappedPair q = pair_from_json(pair_to_json(p));
    CHECK(q.source == p.source);
    CHECK(q.target == p.target);
    CHECK(q.mapping == p.mapping);
    CHECK_THROWS_AS(pair_from_json(Json::object()), InvalidArgument);
}
