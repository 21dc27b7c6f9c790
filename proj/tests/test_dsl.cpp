#include "eqlab/dsl.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/geometry.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace eqlab;
using eqlab::testing::random_tensor;
using dsl::Index;

namespace {

const char* kCurvature =
    "d(Gamma[^i,_j,_m],_n) - d(Gamma[^i,_j,_n],_m) + Gamma[^a,_j,_m]*Gamma[^i,_a,_n] - Gamma[^a,_j,_n]*Gamma[^i,_a,_m]";

std::size_t error_position(const std::string& src)
{
    try {
        dsl::parse(src);
    } catch (const dsl::ParseError& e) {
        return e.position();
    }
    FAIL("expected a parse error for " << src);
    return 0;
}

}  // namespace

TEST_CASE("free indices of a reference")
{
    const auto plan = dsl::parse("Gamma[^i,_j,_k]");
    const std::vector<Index> want{{"i", Variance::Up}, {"j", Variance::Down}, {"k", Variance::Down}};
    CHECK(plan.free_indices() == want);
    CHECK(plan.root->bound.empty());
}

TEST_CASE("contraction across a product")
{
    const auto plan = dsl::parse("Gamma[^a,_j,_m]*Gamma[^i,_a,_n]");
    const std::vector<Index> want{{"i", Variance::Up}, {"j", Variance::Down}, {"m", Variance::Down}, {"n", Variance::Down}};
    CHECK(plan.free_indices() == want);
    CHECK(plan.root->bound == std::vector<std::string>{"a"});
}

TEST_CASE("index discipline errors")
{
    CHECK_THROWS_AS(dsl::parse("T[^i,_j] + S[_j,^i]"), dsl::ParseError);
    CHECK_THROWS_AS(dsl::parse("T[^i,_j] + S[^i,_k]"), dsl::ParseError);
    CHECK_THROWS_AS(dsl::parse("A[^a,_a]*B[^a]"), dsl::ParseError);
    CHECK_THROWS_AS(dsl::parse("A[_a]*B[_a]"), dsl::ParseError);
    CHECK_THROWS_AS(dsl::parse("A[^i,^i]"), dsl::ParseError);
    CHECK_THROWS_AS(dsl::parse("d(A[_i],_i)"), dsl::ParseError);
    CHECK_THROWS_AS(dsl::parse("d(A[_i],^j)"), dsl::ParseError);
}

TEST_CASE("syntax errors carry a position")
{
    CHECK(error_position("T[^i,_j") == 7);
    CHECK(error_position("T[i]") == 2);
    CHECK(error_position("A[^i] +") == 7);
    CHECK(error_position("A[^i] B[^i]") == 6);
    CHECK(error_position("") == 0);
    CHECK(error_position("1/") == 2);
}

TEST_CASE("summands may list the same indices in another order")
{
    const auto plan = dsl::parse("A[^i,_j,_k] - A[^i,_k,_j]");
    RationalSampler rng(4);
    const TensorField a = random_tensor(rng, 3, {Variance::Up, Variance::Down, Variance::Down}, 1);
    CHECK(dsl::evaluate(plan, {{"A", a}}) == antisym_pair_nodiv(a, 1, 2));
}

TEST_CASE("evaluation examples")
{
    const TensorField delta = TensorField::kronecker(3, 2);
    CHECK(dsl::evaluate(dsl::parse("delta[^i,_j]"), {{"delta", delta}}) == delta);
    RationalSampler rng(5);
    const TensorField a = random_tensor(rng, 3, {Variance::Up, Variance::Down}, 2);
    CHECK(dsl::evaluate(dsl::parse("0*A[^i,_j]"), {{"A", a}}).is_zero());
    CHECK(dsl::evaluate(dsl::parse("delta[^i,_i]"), {{"delta", delta}}).flat(0).value_at_base() == 3);
    CHECK(dsl::evaluate(dsl::parse("-1/2*A[^i,_j] + 1/2*A[^i,_j]"), {{"A", a}}).is_zero());
    CHECK(dsl::evaluate(dsl::parse("(A[^i,_k] + A[^i,_k])*delta[^k,_j]"), {{"A", a}, {"delta", delta}}) ==
          Rational(2) * a);
}

TEST_CASE("summands with mismatched slot variance are rejected")
{
    CHECK_THROWS_AS(dsl::parse("T[_j,^i] + A[^i,_j]"), dsl::ParseError);
}

TEST_CASE("evaluation errors")
{
    const TensorField delta = TensorField::kronecker(2, 2);
    CHECK_THROWS_AS(dsl::evaluate(dsl::parse("X[^i]"), {{"delta", delta}}), dsl::UnboundName);
    CHECK_THROWS_AS(dsl::evaluate(dsl::parse("delta[_i,^j]"), {{"delta", delta}}), ValenceMismatch);
    CHECK_THROWS_AS(dsl::evaluate(dsl::parse("delta[^i]"), {{"delta", delta}}), ValenceMismatch);
    const TensorField flat = TensorField::kronecker(2, 0);
    CHECK_THROWS_AS(dsl::evaluate(dsl::parse("d(delta[^i,_j],_k)"), {{"delta", flat}}), OrderExhausted);
}

TEST_CASE("derivative contracting with an upper index is a divergence")
{
    RationalSampler rng(6);
    const TensorField v = random_tensor(rng, 3, {Variance::Up}, 2);
    JetScalar div(3, 1);
    for (std::size_t k = 0; k < 3; ++k) {
        div += v(k).partial(k);
    }
    CHECK(dsl::evaluate(dsl::parse("d(v[^a],_a)"), {{"v", v}}).flat(0) == div);
}

TEST_CASE("curvature from source text matches the built-in")
{
    const auto plan = dsl::parse(kCurvature);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        // The curvature formula is written for the symmetric part of the connection.
        const Space s = random_space(3, seed);
        const TensorField sym = split_connection(s).sym;
        REQUIRE(dsl::evaluate(plan, {{"Gamma", sym}}) == curvature_R(s));
    }
}

TEST_CASE("print and reparse give the same plan")
{
    for (const char* src : {kCurvature, "-A[^i,_j]", "1/2*(A[^i,_j] - (B[^i,_j] + A[^i,_j]))*c",
                            "d(d(f,_i),_j)", "A[^a,_a]", "3"}) {
        const auto plan = dsl::parse(src);
        CHECK(dsl::parse(dsl::print(plan)) == plan);
    }
}

TEST_CASE("renaming bound indices does not change the value")
{
    RationalSampler rng(7);
    for (int t = 0; t < 10; ++t) {
        const Space s = random_space(2 + static_cast<std::size_t>(t % 2), static_cast<std::uint64_t>(t));
        const dsl::Bindings b{{"Gamma", s.gamma()}};
        CHECK(dsl::evaluate(dsl::parse("Gamma[^a,_j,_m]*Gamma[^i,_a,_n]"), b) ==
              dsl::evaluate(dsl::parse("Gamma[^z,_j,_m]*Gamma[^i,_z,_n]"), b));
    }
}

TEST_CASE("programs")
{
    const auto program = dsl::parse_program("# comment\n\nT[_j,^i] = A[^i,_j]\nS[_j,^i] = T[_j,^i] + T[_j,^i]  # tail\n");
    REQUIRE(program.size() == 2);
    CHECK(program[0].line == 3);
    CHECK(program[1].line == 4);
    RationalSampler rng(8);
    const TensorField a = random_tensor(rng, 2, {Variance::Up, Variance::Down}, 1);
    const auto out = dsl::run_program(program, {{"A", a}});
    REQUIRE(out.size() == 2);
    CHECK(out[0].second.valence() == Valence{Variance::Down, Variance::Up});
    CHECK(out[0].second(1, 0) == a(0, 1));
    CHECK(out[1].second == Rational(2) * out[0].second);
    CHECK(dsl::parse_program("").empty());
    CHECK(dsl::parse_program("  # nothing\n").empty());
}

TEST_CASE("program errors name the line")
{
    try {
        dsl::run_program(dsl::parse_program("X[^i] = A[^i]\nY[^i] = Missing[^i]\n"), {{"A", TensorField(2, {Variance::Up}, 1)}});
        FAIL("expected an error");
    } catch (const dsl::ProgramError& e) {
        CHECK(e.line() == 2);
        CHECK(e.unbound());
        CHECK(std::string(e.what()).find("Missing") != std::string::npos);
    }
    CHECK_THROWS_AS(dsl::parse_program("X[^i] = A[^j]"), dsl::ProgramError);
    CHECK_THROWS_AS(dsl::parse_program("no equals sign"), dsl::ProgramError);
}
