#include "eqlab/errors.hpp"
#include "eqlab/linalg.hpp"
#include "eqlab/sampling.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace eqlab;

namespace {

RationalMatrix random_matrix(RationalSampler& rng, std::size_t rows, std::size_t cols, std::size_t rank)
{
    // Product of random (rows x rank) and (rank x cols) factors: rank <= `rank`, generically equal.
    RationalMatrix a(rows, rank), b(rank, cols), m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < rank; ++k) {
            a(r, k) = rng.small();
        }
    }
    for (std::size_t k = 0; k < rank; ++k) {
        for (std::size_t c = 0; c < cols; ++c) {
            b(k, c) = rng.small();
        }
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            for (std::size_t k = 0; k < rank; ++k) {
                m(r, c) += a(r, k) * b(k, c);
            }
        }
    }
    return m;
}

}  // namespace

TEST_CASE("rank examples")
{
    CHECK(rank_exact(RationalMatrix::identity(3)) == 3);
    CHECK(rank_exact(RationalMatrix(4, 7)) == 0);
    CHECK(rank_exact(RationalMatrix::from_rows({{1, 2}, {2, 4}})) == 1);
    CHECK(rank_exact(RationalMatrix()) == 0);
    CHECK(rank_exact(RationalMatrix::from_rows({{make_rational(1, 3), make_rational(1, 2)},
                                                {make_rational(2, 3), make_rational(1, 1)}})) == 1);
}

TEST_CASE("ragged rows are rejected")
{
    CHECK_THROWS_AS(RationalMatrix::from_rows({{1, 2}, {3}}), DimensionMismatch);
}

TEST_CASE("solve_exact")
{
    const RationalMatrix a = RationalMatrix::from_rows({{2, 1}, {1, 3}});
    const std::vector<Rational> b{3, 5};
    const auto x = solve_exact(a, b);
    REQUIRE(x);
    CHECK((*x)[0] == make_rational(4, 5));
    CHECK((*x)[1] == make_rational(7, 5));
    const RationalMatrix singular = RationalMatrix::from_rows({{1, 1}, {1, 1}});
    const std::vector<Rational> inconsistent{1, 2};
    CHECK_FALSE(solve_exact(singular, inconsistent));
}

TEST_CASE("generic rank examples")
{
    ParamMatrix diag(2, 2, {"u"});
    diag(0, 0) = diag.variable("u");
    diag(1, 1) = diag.variable("u");
    CHECK(generic_rank(diag, 5, 1) == 2);
    ParamMatrix same(2, 2, {"u"});
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            same(r, c) = same.variable(0);
        }
    }
    CHECK(generic_rank(same, 5, 1) == 1);
    CHECK_THROWS_AS(generic_rank(same, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(diag.variable("q"), InvalidArgument);
}

TEST_CASE("generic rank is monotone in trials and bounds each substitution")
{
    ParamMatrix m(3, 3, {"a", "b"});
    m(0, 0) = m.variable(0);
    m(0, 1) = m.variable(1);
    m(1, 0) = m.variable(1);
    m(1, 1) = m.variable(0);
    m(2, 2) = m.variable(0) - m.variable(1);
    std::size_t prev = 0;
    for (int trials = 1; trials <= 6; ++trials) {
        const GenericRankResult r = generic_rank_detail(m, trials, 5);
        CHECK(r.rank >= prev);
        CHECK(r.trial_ranks.size() == static_cast<std::size_t>(trials));
        for (std::size_t t : r.trial_ranks) {
            CHECK(r.rank >= t);
        }
        prev = r.rank;
    }
    CHECK(prev == 3);
    const std::vector<Rational> equal{1, 1};
    CHECK(rank_exact(m.substitute(equal)) == 1);
}

TEST_CASE("polynomial arithmetic")
{
    const Polynomial u = Polynomial::variable(0, 2), v = Polynomial::variable(1, 2);
    const Polynomial p = (u + v) * (u - v);
    const std::vector<Rational> at{3, 2};
    CHECK(p.evaluate(at) == 5);
    CHECK(p.coefficient({2, 0}) == 1);
    CHECK(p.coefficient({1, 1}) == 0);
    CHECK((p - p).is_zero());
}

TEST_CASE("rank is invariant under permutation and row scaling")
{
    RationalSampler rng(21);
    for (int t = 0; t < 100; ++t) {
        const std::size_t rows = 2 + static_cast<std::size_t>(t % 5), cols = 2 + static_cast<std::size_t>(t % 4);
        const std::size_t target = 1 + static_cast<std::size_t>(t % std::min(rows, cols));
        const RationalMatrix m = random_matrix(rng, rows, cols, target);
        const std::size_t r = rank_exact(m);
        REQUIRE(r <= target);
        std::vector<std::size_t> rp(rows), cp(cols);
        std::iota(rp.begin(), rp.end(), 0);
        std::iota(cp.begin(), cp.end(), 0);
        std::shuffle(rp.begin(), rp.end(), rng.engine());
        std::shuffle(cp.begin(), cp.end(), rng.engine());
        RationalMatrix p(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            Rational scale = rng.small();
            if (scale == 0) {
                scale = 1;
            }
            for (std::size_t j = 0; j < cols; ++j) {
                p(i, j) = scale * m(rp[i], cp[j]);
            }
        }
        REQUIRE(rank_exact(p) == r);
    }
}
