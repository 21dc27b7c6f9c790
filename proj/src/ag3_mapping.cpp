#include "eqlab/ag3_mapping.hpp"

#include "eqlab/errors.hpp"
#include "eqlab/sampling.hpp"

#include <stdexcept>

namespace eqlab {

namespace {

const Valence kCov{Variance::Down};
const Valence kContra{Variance::Up};
const Valence kCov2{Variance::Down, Variance::Down};

void require_field(const TensorField& f, const Valence& v, std::size_t n, const char* name)
{
    if (f.valence() != v) {
        throw ValenceMismatch(std::string("mapping field has wrong valence: ") + name);
    }
    if (f.dim() != n) {
        throw DimensionMismatch(std::string("mapping field has wrong dimension: ") + name);
    }
}

JetScalar contract_vec(const TensorField& cov, const TensorField& contra)
{
    JetScalar sum(cov.dim(), std::min(cov.order(), contra.order()));
    for (std::size_t a = 0; a < cov.dim(); ++a) {
        sum += cov(a) * contra(a);
    }
    return sum;
}

// sigma_{ja} phi^a
TensorField sigma_phi(const AG3Mapping& m)
{
    const std::size_t n = m.dim();
    return build_tensor(n, kCov, [&](std::span<const std::size_t> idx) {
        JetScalar sum(n, m.sigma.order());
        for (std::size_t a = 0; a < n; ++a) {
            sum += m.sigma(idx[0], a) * m.phi(a);
        }
        return sum;
    });
}

bool agree(const TensorField& a, const TensorField& b) { return (a - b).is_zero(); }

}  // namespace

void AG3Mapping::validate() const
{
    if (kind != 1 && kind != 2) {
        throw InvalidArgument("mapping kind must be 1 or 2");
    }
    const std::size_t n = phi.dim();
    require_field(phi, kContra, n, "phi");
    require_field(psi, kCov, n, "psi");
    require_field(nu, kCov, n, "nu");
    require_field(sigma, kCov2, n, "sigma");
    if (mu.dim() != n) {
        throw DimensionMismatch("mu has wrong dimension");
    }
    if (!antisym_pair(sigma, 0, 1).is_zero()) {
        throw InvalidArgument("sigma must be symmetric");
    }
}

Space transform_connection(const Space& s, const AG3Mapping& m)
{
    m.validate();
    if (m.dim() != s.dim()) {
        throw DimensionMismatch("space and mapping dimensions differ");
    }
    const std::size_t n = s.dim();
    const TensorField& g = s.gamma();
    return Space(build_tensor(n, g.valence(), [&](std::span<const std::size_t> idx) {
        const std::size_t i = idx[0], j = idx[1], k = idx[2];
        JetScalar v = g.at(idx) + m.sigma(j, k) * m.phi(i) * Rational(2);
        if (i == k) {
            v += m.psi(j);
        }
        if (i == j) {
            v += m.psi(k);
        }
        return v;
    }));
}

TensorField basic_equation_residual(const Space& s, const AG3Mapping& m)
{
    m.validate();
    if (m.dim() != s.dim()) {
        throw DimensionMismatch("space and mapping dimensions differ");
    }
    const TensorField d = cov_deriv_kind(m.phi, s, m.kind);
    const std::size_t n = s.dim();
    return build_tensor(n, {Variance::Up, Variance::Down}, [&](std::span<const std::size_t> idx) {
        const std::size_t i = idx[0], j = idx[1];
        JetScalar r = d(i, j) - m.nu(j) * m.phi(i);
        if (i == j) {
            r -= m.mu;
        }
        return r;
    });
}

AG3Mapping reciprocity_inverse(const Space& s, const AG3Mapping& m)
{
    if (!basic_equation_residual(s, m).is_zero()) {
        throw InvalidArgument("reciprocity_inverse: the mapping does not satisfy the basic equation");
    }
    const TensorField sp = sigma_phi(m);
    AG3Mapping inv;
    inv.kind = m.kind;
    inv.psi = Rational(-1) * m.psi;
    inv.sigma = Rational(-1) * m.sigma;
    inv.phi = m.phi;
    inv.nu = m.nu + m.psi + Rational(2) * sp;
    inv.mu = m.mu + contract_vec(m.psi, m.phi);

    const Space target = transform_connection(s, m);
    if (!agree(transform_connection(target, inv).gamma(), s.gamma())) {
        throw std::logic_error("reciprocity_inverse: inverse does not map the target back to the source");
    }
    if (!basic_equation_residual(target, inv).is_zero()) {
        throw std::logic_error("reciprocity_inverse: inverse violates the basic equation on the target");
    }
    return inv;
}

TensorField lambda_vector(const TensorField& sym, const AG3Mapping& m)
{
    const TensorField c = contract(sym, 0, 2);
    return c + sigma_phi(m);
}

GammaDiffResult gamma_diff_factorized(const MappedPair& pair)
{
    const AG3Mapping bar = inverse_mapping(pair);
    const TensorField sym = split_connection(pair.source).sym;
    const TensorField sym_bar = split_connection(pair.target).sym;
    const TensorField lam = lambda_vector(sym, pair.mapping);
    const TensorField lam_bar = lambda_vector(sym_bar, bar);
    const std::size_t n = pair.source.dim();
    const Rational inv_n1 = make_rational(1, static_cast<long>(n + 1));

    auto side = [&](const TensorField& l, const AG3Mapping& d) {
        return build_tensor(n, sym.valence(), [&](std::span<const std::size_t> idx) {
            const std::size_t i = idx[0], j = idx[1], k = idx[2];
            JetScalar v = d.sigma(j, k) * d.phi(i) * Rational(-1);
            if (i == k) {
                v += l(j) * inv_n1;
            }
            if (i == j) {
                v += l(k) * inv_n1;
            }
            return v;
        });
    };
    GammaDiffResult r;
    r.value = sym_bar - sym;
    r.residual = (side(lam_bar, bar) - side(lam, pair.mapping)) - r.value;
    return r;
}

MappedPair synthesize_instance(std::size_t n, int kind, std::uint64_t seed, const SynthOptions& opts)
{
    if (n < 2) {
        throw InvalidArgument("synthesize_instance needs N >= 2");
    }
    if (kind != 1 && kind != 2) {
        throw InvalidArgument("mapping kind must be 1 or 2");
    }
    if (opts.order < 1) {
        throw InvalidArgument("synthesis order must be >= 1");
    }
    const int order = opts.order;
    RationalSampler sampler(seed);
    const MonomialBasis& basis = MonomialBasis::get(n, order);
    auto jet = [&](bool constant_only = false) {
        std::vector<std::pair<MultiIndex, Rational>> terms;
        const std::size_t count = constant_only ? 1 : basis.size();
        for (std::size_t k = 0; k < count; ++k) {
            terms.emplace_back(basis.exponent(k), sampler.small());
        }
        return JetScalar::from_terms(n, order, terms);
    };
    auto field = [&](const Valence& v, bool constant_only = false) {
        return build_tensor(n, v, [&](std::span<const std::size_t>) { return jet(constant_only); });
    };

    AG3Mapping m;
    m.kind = kind;
    int tries = 0;
    do {
        if (++tries > 16) {
            throw std::runtime_error("synthesize_instance: phi^1(0) vanished in 16 draws");
        }
        m.phi = field(kContra, opts.minimal);
    } while (m.phi(0).value_at_base() == 0);
    m.nu = opts.minimal ? TensorField(n, kCov, order) : field(kCov);
    m.mu = jet(opts.minimal);
    m.psi = field(kCov);
    m.sigma = TensorField(n, kCov2, order);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j; k < n; ++k) {
            m.sigma(j, k) = jet();
            m.sigma(k, j) = m.sigma(j, k);
        }
    }
    TensorField b(n, {Variance::Up, Variance::Down, Variance::Down}, order);
    if (!opts.minimal) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = opts.torsion_free ? j : 0; k < n; ++k) {
                    b(i, j, k) = jet();
                    if (opts.torsion_free) {
                        b(i, k, j) = b(i, j, k);
                    }
                }
            }
        }
    }

    // Any Gamma with Gamma^i_{kj} phi^k = T^i_j (kind 1) or Gamma^i_{jk} phi^k = T^i_j (kind 2)
    // solves the basic equation; w is a left inverse of phi.
    TensorField w(n, kCov, order);
    w(0) = m.phi(0).inverse();
    const TensorField t = build_tensor(n, {Variance::Up, Variance::Down}, [&](std::span<const std::size_t> idx) {
        const std::size_t i = idx[0], j = idx[1];
        JetScalar v = m.nu(j) * m.phi(i) - m.phi(i).partial(j);
        if (i == j) {
            v += m.mu;
        }
        return v;
    });
    // B^i_{kj} phi^k and B^i_{jk} phi^k
    auto b_phi = [&](std::size_t i, std::size_t j, bool first_slot) {
        JetScalar sum(n, order);
        for (std::size_t a = 0; a < n; ++a) {
            sum += (first_slot ? b(i, a, j) : b(i, j, a)) * m.phi(a);
        }
        return sum;
    };

    TensorField gamma;
    const Valence conn{Variance::Up, Variance::Down, Variance::Down};
    if (opts.torsion_free) {
        // Symmetric solution: T w + w T - (T phi) w w plus B projected on both slots.
        gamma = build_tensor(n, conn, [&](std::span<const std::size_t> idx) {
            const std::size_t i = idx[0], k = idx[1], j = idx[2];
            JetScalar t_phi(n, order), phi_b_phi(n, order);
            for (std::size_t a = 0; a < n; ++a) {
                t_phi += t(i, a) * m.phi(a);
                phi_b_phi += b_phi(i, a, true) * m.phi(a);
            }
            return t(i, j) * w(k) + t(i, k) * w(j) - t_phi * w(k) * w(j) + b(i, k, j) - w(k) * b_phi(i, j, true) -
                   b_phi(i, k, true) * w(j) + phi_b_phi * w(k) * w(j);
        });
    } else if (kind == 1) {
        gamma = build_tensor(n, conn, [&](std::span<const std::size_t> idx) {
            const std::size_t i = idx[0], k = idx[1], j = idx[2];
            return t(i, j) * w(k) + b(i, k, j) - w(k) * b_phi(i, j, true);
        });
    } else {
        gamma = build_tensor(n, conn, [&](std::span<const std::size_t> idx) {
            const std::size_t i = idx[0], j = idx[1], k = idx[2];
            return t(i, j) * w(k) + b(i, j, k) - w(k) * b_phi(i, j, false);
        });
    }

    Space source(std::move(gamma));
    if (!basic_equation_residual(source, m).is_zero()) {
        throw std::logic_error("synthesize_instance: construction left a nonzero residual");
    }
    Space target = transform_connection(source, m);
    return {std::move(source), std::move(m), std::move(target)};
}

}  // namespace eqlab
