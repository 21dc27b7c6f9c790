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
const Valence kMixed{Variance::Up, Variance::Down};
const Valence kDownDown{Variance::Down, Variance::Down};

}  // namespace

TEST_CASE("add and scale examples")
{
    const TensorField delta = TensorField::kronecker(3, 2);
    CHECK(delta + TensorField(3, kMixed, 2) == delta);
    const TensorField two = Rational(2) * delta;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(two(i, j).value_at_base() == (i == j ? 2 : 0));
        }
    }
    CHECK(tensor_scale(c(3, 2, 2), delta) == two);
}

TEST_CASE("mismatched operands are rejected")
{
    CHECK_THROWS_AS(TensorField::kronecker(3, 2) + TensorField::kronecker(2, 2), DimensionMismatch);
    CHECK_THROWS_AS(TensorField::kronecker(2, 2) + TensorField(2, kDownDown, 2), ValenceMismatch);
    CHECK_THROWS_AS(contract(TensorField(2, kDownDown, 2), 0, 1), ValenceMismatch);
    CHECK_THROWS_AS(swap_slots(TensorField::kronecker(2, 2), 0, 1), ValenceMismatch);
    CHECK_THROWS_AS(TensorField(2, kMixed, std::vector<JetScalar>(3, c(2, 1, 0))), DimensionMismatch);
}

TEST_CASE("contraction examples")
{
    const TensorField tr = contract(TensorField::kronecker(4, 2), 0, 1);
    CHECK(tr.rank() == 0);
    CHECK(tr.flat(0) == c(4, 2, 4));
    RationalSampler rng(5);
    const TensorField phi = random_tensor(rng, 3, kUp, 2), psi = random_tensor(rng, 3, kDown, 2);
    JetScalar loop(3, 2);
    for (std::size_t a = 0; a < 3; ++a) {
        loop += psi(a) * phi(a);
    }
    CHECK(contract(outer(phi, psi), 0, 1).flat(0) == loop);
    CHECK(contract(TensorField(3, {Variance::Up, Variance::Down, Variance::Down}, 2), 0, 2).is_zero());
}

TEST_CASE("antisymmetrization without division")
{
    RationalSampler rng(6);
    const TensorField a = random_tensor(rng, 3, kDownDown, 2);
    const TensorField sym = a + swap_slots(a, 0, 1);
    CHECK(antisym_pair_nodiv(sym, 0, 1).is_zero());

    TensorField eta(2, kDownDown, 1);
    eta(0, 1) = c(2, 1, 1);
    const TensorField r = antisym_pair_nodiv(eta, 0, 1);
    CHECK(r(0, 1) == c(2, 1, 1));
    CHECK(r(1, 0) == c(2, 1, -1));
    CHECK(antisym_pair_nodiv(antisym_pair_nodiv(a, 0, 1), 0, 1) == Rational(2) * antisym_pair_nodiv(a, 0, 1));
}

TEST_CASE("symmetric and antisymmetric parts")
{
    RationalSampler rng(7);
    const TensorField a = random_tensor(rng, 3, kDownDown, 2);
    CHECK(sym_pair(a, 0, 1) + antisym_pair(a, 0, 1) == a);
    CHECK(antisym_pair(sym_pair(a, 0, 1), 0, 1).is_zero());
}

TEST_CASE("field derivatives")
{
    CHECK(partial_deriv_field(TensorField::kronecker(3, 2), 0).is_zero());
    const TensorField xd = tensor_scale(x(3, 2, 0), TensorField::kronecker(3, 2));
    CHECK(partial_deriv_field(xd, 0) == TensorField::kronecker(3, 1));
    CHECK(partial_deriv_field(xd, 1).is_zero());
}

TEST_CASE("flatten at base")
{
    const auto flat = flatten_at_base(TensorField::kronecker(2, 2));
    CHECK(flat == std::vector<Rational>{1, 0, 0, 1});
    for (const Rational& q : flatten_at_base(TensorField(3, kDownDown, 1))) {
        CHECK(q == 0);
    }
    RationalSampler rng(8);
    const TensorField phi = random_tensor(rng, 3, kUp, 2), psi = random_tensor(rng, 3, kDown, 2);
    const auto fo = flatten_at_base(outer(phi, psi));
    const auto fp = flatten_at_base(phi), fq = flatten_at_base(psi);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(fo[i * 3 + j] == fp[i] * fq[j]);
        }
    }
}

TEST_CASE("slot permutation")
{
    RationalSampler rng(9);
    const TensorField a = random_tensor(rng, 2, {Variance::Up, Variance::Down, Variance::Down}, 1);
    const std::vector<std::size_t> perm{0, 2, 1};
    CHECK(permute_slots(a, perm) == swap_slots(a, 1, 2));
    const std::vector<std::size_t> rot{1, 2, 0};
    const TensorField r = permute_slots(a, rot);
    CHECK(r.valence() == Valence{Variance::Down, Variance::Down, Variance::Up});
    CHECK(r(1, 0, 1) == a(1, 1, 0));
}

TEST_CASE("json round trip")
{
    RationalSampler rng(10);
    const TensorField a = random_tensor(rng, 3, kMixed, 2);
    CHECK(tensor_from_json(tensor_to_json(a)) == a);
    CHECK(tensor_to_json(a)["valence"] == Json::array({"up", "down"}));
}

// Property suites on 100 random cases each.

TEST_CASE("contraction of an outer product equals the explicit loop")
{
    RationalSampler rng(31);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
        const TensorField a = random_tensor(rng, n, kMixed, 1), b = random_tensor(rng, n, kMixed, 1);
        // a^i_j b^k_l contracted over i and l.
        const TensorField got = contract(outer(a, b), 0, 3);
        const TensorField want = build_tensor(n, {Variance::Down, Variance::Up}, [&](std::span<const std::size_t> idx) {
            JetScalar s(n, 1);
            for (std::size_t q = 0; q < n; ++q) {
                s += a(q, idx[0]) * b(idx[1], q);
            }
            return s;
        });
        REQUIRE(got == want);
    }
}

TEST_CASE("antisym_pair_nodiv is antisymmetric")
{
    RationalSampler rng(32);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
        const TensorField a = random_tensor(rng, n, {Variance::Up, Variance::Down, Variance::Down}, 1);
        const TensorField r = antisym_pair_nodiv(a, 1, 2);
        REQUIRE(swap_slots(r, 1, 2) == Rational(-1) * r);
    }
}

TEST_CASE("sym plus antisym reconstructs the tensor")
{
    RationalSampler rng(33);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 3);
        const TensorField a = random_tensor(rng, n, {Variance::Up, Variance::Down, Variance::Down}, 1 + t % 2);
        REQUIRE(sym_pair(a, 1, 2) + antisym_pair(a, 1, 2) == a);
        REQUIRE(swap_slots(sym_pair(a, 1, 2), 1, 2) == sym_pair(a, 1, 2));
    }
}

TEST_CASE("field derivatives commute and obey Leibniz")
{
    RationalSampler rng(34);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 2);
        const TensorField a = random_tensor(rng, n, kMixed, 2), f = random_tensor(rng, n, {}, 2);
        const std::size_t j = static_cast<std::size_t>(t) % n, k = static_cast<std::size_t>(t / 2) % n;
        REQUIRE(partial_deriv_field(partial_deriv_field(a, j), k) == partial_deriv_field(partial_deriv_field(a, k), j));
        REQUIRE(partial_deriv_field(outer(f, a), j) ==
                outer(partial_deriv_field(f, j), a) + outer(f, partial_deriv_field(a, j)));
    }
}
