#include "eqlab/geometry.hpp"

#include "eqlab/errors.hpp"
#include "eqlab/linalg.hpp"
#include "eqlab/sampling.hpp"

#include <algorithm>

namespace eqlab {

namespace {

const Valence kConnectionValence{Variance::Up, Variance::Down, Variance::Down};

void require_connection(const TensorField& gamma)
{
    if (gamma.valence() != kConnectionValence) {
        throw ValenceMismatch("connection must have valence (up, down, down)");
    }
}

// Shared machinery for ";" and the four kinds: `up_coeff(i, a, k)` multiplies
// a^{..a..} in a contravariant slot, `down_coeff(a, j, k)` multiplies a_{..a..}.
template <class Up, class Down>
TensorField covariant_derivative(const TensorField& a, Up up_coeff, Down down_coeff)
{
    const std::size_t n = a.dim();
    const std::size_t r = a.rank();
    Valence v = a.valence();
    v.push_back(Variance::Down);
    std::vector<std::size_t> src(r);
    std::vector<TensorField> partials;
    partials.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        partials.push_back(partial_deriv_field(a, k));
    }
    return build_tensor(n, v, [&](std::span<const std::size_t> idx) {
        const std::size_t k = idx[r];
        std::copy(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(r), src.begin());
        JetScalar value = partials[k].at(src);
        for (std::size_t slot = 0; slot < r; ++slot) {
            const std::size_t orig = idx[slot];
            for (std::size_t alpha = 0; alpha < n; ++alpha) {
                src[slot] = alpha;
                if (a.valence()[slot] == Variance::Up) {
                    value += up_coeff(orig, alpha, k) * a.at(src);
                } else {
                    value -= down_coeff(alpha, orig, k) * a.at(src);
                }
            }
            src[slot] = orig;
        }
        return value;
    });
}

}  // namespace

Space::Space(TensorField gamma) : gamma_(std::move(gamma)) { require_connection(gamma_); }

Space Space::from_metric(const TensorField& metric)
{
    Space s(christoffel_from_metric(metric));
    s.metric_ = metric;
    return s;
}

ConnectionSplit split_connection(const Space& s)
{
    return {sym_pair(s.gamma(), 1, 2), antisym_pair(s.gamma(), 1, 2)};
}

TensorField cov_deriv_sym(const TensorField& a, const TensorField& sym)
{
    if (a.dim() != sym.dim()) {
        throw DimensionMismatch("field and connection dimensions differ");
    }
    return covariant_derivative(
        a, [&](std::size_t i, std::size_t alpha, std::size_t k) -> const JetScalar& { return sym(i, alpha, k); },
        [&](std::size_t alpha, std::size_t j, std::size_t k) -> const JetScalar& { return sym(alpha, j, k); });
}

TensorField cov_deriv_assoc(const TensorField& a, const Space& s)
{
    return cov_deriv_sym(a, split_connection(s).sym);
}

TensorField cov_deriv_kind(const TensorField& a, const Space& s, int kind)
{
    if (kind < 1 || kind > 4) {
        throw InvalidArgument("covariant derivative kind must be 1, 2, 3 or 4");
    }
    if (a.dim() != s.dim()) {
        throw DimensionMismatch("field and connection dimensions differ");
    }
    const TensorField& g = s.gamma();
    const bool up_first = kind == 1 || kind == 3;    // Gamma^i_{ak}
    const bool down_first = kind == 1 || kind == 4;  // Gamma^a_{jk}
    return covariant_derivative(
        a,
        [&](std::size_t i, std::size_t alpha, std::size_t k) -> const JetScalar& {
            return up_first ? g(i, alpha, k) : g(i, k, alpha);
        },
        [&](std::size_t alpha, std::size_t j, std::size_t k) -> const JetScalar& {
            return down_first ? g(alpha, j, k) : g(alpha, k, j);
        });
}

TensorField curvature_R_from_sym(const TensorField& sym)
{
    const std::size_t n = sym.dim();
    std::vector<TensorField> d;
    for (std::size_t k = 0; k < n; ++k) {
        d.push_back(partial_deriv_field(sym, k));
    }
    const Valence v{Variance::Up, Variance::Down, Variance::Down, Variance::Down};
    return build_tensor(n, v, [&](std::span<const std::size_t> idx) {
        const std::size_t i = idx[0], j = idx[1], m = idx[2], nn = idx[3];
        JetScalar r = d[nn](i, j, m) - d[m](i, j, nn);
        for (std::size_t a = 0; a < n; ++a) {
            r += sym(a, j, m) * sym(i, a, nn);
            r -= sym(a, j, nn) * sym(i, a, m);
        }
        return r;
    });
}

TensorField curvature_R(const Space& s) { return curvature_R_from_sym(split_connection(s).sym); }

TensorField CurvatureFamilyParts::combine(const FamilyParams& p) const
{
    TensorField k = R;
    k = k + p.u * torsion_cd;
    k = k + p.u_prime * torsion_cd_swapped;
    k = k + p.v * tt_v;
    k = k + p.v_prime * tt_v_prime;
    k = k + p.w * tt_w;
    return k;
}

CurvatureFamilyParts curvature_family_parts(const Space& s)
{
    const auto [sym, torsion] = split_connection(s);
    const std::size_t n = s.dim();
    const Valence v{Variance::Up, Variance::Down, Variance::Down, Variance::Down};
    TensorField tcd = cov_deriv_sym(torsion, sym);
    TensorField tcd_swapped = swap_slots(tcd, 2, 3);
    auto tt = [&](auto pick) {
        return build_tensor(n, v, [&](std::span<const std::size_t> idx) {
            JetScalar sum(n, torsion.order());
            for (std::size_t a = 0; a < n; ++a) {
                sum += pick(idx[0], idx[1], idx[2], idx[3], a);
            }
            return sum;
        });
    };
    TensorField tt_v = tt([&](std::size_t i, std::size_t j, std::size_t m, std::size_t nn, std::size_t a) {
        return torsion(a, j, m) * torsion(i, a, nn);
    });
    TensorField tt_vp = tt([&](std::size_t i, std::size_t j, std::size_t m, std::size_t nn, std::size_t a) {
        return torsion(a, j, nn) * torsion(i, a, m);
    });
    TensorField tt_w = tt([&](std::size_t i, std::size_t j, std::size_t m, std::size_t nn, std::size_t a) {
        return torsion(a, m, nn) * torsion(i, a, j);
    });
    return {curvature_R_from_sym(sym), std::move(tcd), std::move(tcd_swapped), std::move(tt_v), std::move(tt_vp),
            std::move(tt_w)};
}

TensorField curvature_K(const Space& s, const FamilyParams& p) { return curvature_family_parts(s).combine(p); }

std::size_t curvature_family_span_dimension(std::span<const Space> spaces)
{
    std::vector<std::vector<Rational>> rows(5);
    for (const Space& s : spaces) {
        const CurvatureFamilyParts parts = curvature_family_parts(s);
        const auto coeffs = parts.coefficient_tensors();
        for (std::size_t r = 0; r < 5; ++r) {
            const auto flat = flatten_at_base(*coeffs[r]);
            rows[r].insert(rows[r].end(), flat.begin(), flat.end());
        }
    }
    if (rows.front().empty()) {
        return 0;
    }
    return rank_exact(RationalMatrix::from_rows(rows));
}

std::vector<std::vector<JetScalar>> invert_jet_matrix(const std::vector<std::vector<JetScalar>>& m)
{
    const std::size_t n = m.size();
    const std::size_t dim = m.front().front().dim();
    int order = m.front().front().order();
    for (const auto& row : m) {
        for (const auto& e : row) {
            order = std::min(order, e.order());
        }
    }
    std::vector<std::vector<JetScalar>> a(n, std::vector<JetScalar>(2 * n, JetScalar(dim, order)));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            a[r][c] = m[r][c].truncated(order);
        }
        a[r][n + r] = JetScalar::constant(dim, order, Rational(1));
    }
    // Gauss-Jordan; a pivot is usable iff its constant term is nonzero.
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c].value_at_base() == 0) {
            ++p;
        }
        if (p == n) {
            throw NotInvertible("matrix is singular at the base point");
        }
        std::swap(a[c], a[p]);
        const JetScalar inv = a[c][c].inverse();
        for (auto& e : a[c]) {
            e = e * inv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c].is_zero()) {
                continue;
            }
            const JetScalar f = a[r][c];
            for (std::size_t k = 0; k < 2 * n; ++k) {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    std::vector<std::vector<JetScalar>> inv(n);
    for (std::size_t r = 0; r < n; ++r) {
        inv[r].assign(a[r].begin() + static_cast<std::ptrdiff_t>(n), a[r].end());
    }
    return inv;
}

TensorField christoffel_from_metric(const TensorField& g)
{
    if (g.valence() != Valence{Variance::Down, Variance::Down}) {
        throw ValenceMismatch("metric must have valence (down, down)");
    }
    const std::size_t n = g.dim();
    if (g.order() < 1) {
        throw OrderExhausted("metric needs order >= 1 for Christoffel symbols");
    }
    // h^{ia} g_{ja} = delta^i_j  <=>  h = (g^T)^{-1}.
    std::vector<std::vector<JetScalar>> gt(n, std::vector<JetScalar>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            gt[r][c] = g(c, r);
        }
    }
    const auto h = invert_jet_matrix(gt);

    std::vector<TensorField> d;
    for (std::size_t k = 0; k < n; ++k) {
        d.push_back(partial_deriv_field(g, k));
    }
    // Gamma_{i.jk}
    const TensorField lowered =
        build_tensor(n, {Variance::Down, Variance::Down, Variance::Down}, [&](std::span<const std::size_t> idx) {
            const std::size_t i = idx[0], j = idx[1], k = idx[2];
            return (d[k](j, i) - d[i](j, k) + d[j](i, k)) * Rational(1, 2);
        });
    return build_tensor(n, kConnectionValence, [&](std::span<const std::size_t> idx) {
        JetScalar sum(n, lowered.order());
        for (std::size_t a = 0; a < n; ++a) {
            sum += h[idx[0]][a] * lowered(a, idx[1], idx[2]);
        }
        return sum;
    });
}

Space random_space(std::size_t dim, std::uint64_t seed, int order, bool torsion_free)
{
    RationalSampler sampler(seed);
    const MonomialBasis& basis = MonomialBasis::get(dim, order);
    auto draw = [&] {
        JetScalar j(dim, order);
        std::vector<std::pair<MultiIndex, Rational>> terms;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            terms.emplace_back(basis.exponent(k), sampler.small());
        }
        return JetScalar::from_terms(dim, order, terms);
    };
    TensorField gamma(dim, kConnectionValence, order);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            for (std::size_t k = torsion_free ? j : 0; k < dim; ++k) {
                gamma(i, j, k) = draw();
                if (torsion_free) {
                    gamma(i, k, j) = gamma(i, j, k);
                }
            }
        }
    }
    return Space(std::move(gamma));
}

}  // namespace eqlab
