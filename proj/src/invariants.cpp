#include "eqlab/invariants.hpp"

#include "eqlab/errors.hpp"
#include "eqlab/sampling.hpp"

#include <algorithm>

namespace eqlab {

namespace {

const Valence kW{Variance::Up, Variance::Down, Variance::Down, Variance::Down};

void require_range(int v, int lo, int hi, const char* what)
{
    if (v < lo || v > hi) {
        throw InvalidArgument(std::string("invalid ") + what + ": " + std::to_string(v));
    }
}

Rational inv_n1(std::size_t n) { return make_rational(1, static_cast<long>(n + 1)); }

TensorField rank4(std::size_t n, const std::function<JetScalar(std::size_t, std::size_t, std::size_t, std::size_t)>& f)
{
    return build_tensor(n, kW, [&](std::span<const std::size_t> idx) { return f(idx[0], idx[1], idx[2], idx[3]); });
}

JetScalar zero_like(const TensorField& t) { return JetScalar(t.dim(), t.order()); }

// Coefficient rows of the sigma_(p) in the U basis, as (theta, multiple of 1 or 1/(N+1)).
struct Coeff {
    int theta;
    int whole;  // multiple of 1
    int frac;   // multiple of 1/(N+1)
};

const std::array<std::vector<Coeff>, 8> kSigmaRows = {{
    {{1, 1, 0}, {3, -1, 0}, {5, -1, 0}},
    {{1, 1, 0}, {9, 1, 0}, {11, 1, 0}, {6, 0, -2}, {7, 0, -1}, {8, 0, 1}, {12, 0, -2}, {13, 0, -1}, {14, 0, 1}},
    {{1, 1, 0}, {3, -1, 0}, {11, 1, 0}, {6, 0, -1}, {7, 0, -1}, {12, 0, -1}, {13, 0, -1}},
    {{1, 1, 0}, {5, -1, 0}, {9, 1, 0}, {6, 0, -1}, {8, 0, 1}, {12, 0, -1}, {14, 0, 1}},
    {{19, -1, 0}, {3, -1, 0}, {5, -1, 0}, {15, 0, 1}, {6, 0, 1}, {17, 0, 1}, {12, 0, 1}},
    {{19, -1, 0}, {9, 1, 0}, {11, 1, 0}, {15, 0, 1}, {6, 0, -1}, {7, 0, -1}, {8, 0, 1}, {17, 0, 1}, {12, 0, -1},
     {13, 0, -1}, {14, 0, 1}},
    {{19, -1, 0}, {3, -1, 0}, {11, 1, 0}, {15, 0, 1}, {7, 0, -1}, {17, 0, 1}, {13, 0, -1}},
    {{19, -1, 0}, {5, -1, 0}, {9, 1, 0}, {15, 0, 1}, {8, 0, 1}, {17, 0, 1}, {14, 0, 1}},
}};

TensorField u_combination(InvariantBundle& b, const RationalMatrix& coeffs, int row)
{
    TensorField sum(b.dim(), kW, b.U(1).order());
    for (int theta = 1; theta <= 20; ++theta) {
        const Rational& c = coeffs(static_cast<std::size_t>(row - 1), static_cast<std::size_t>(theta - 1));
        if (c != 0) {
            sum = sum + c * b.U(theta);
        }
    }
    return sum;
}

nlohmann::ordered_json params_json(const FamilyParams& p)
{
    return {{"u", to_string(p.u)}, {"u_prime", to_string(p.u_prime)}, {"v", to_string(p.v)},
            {"v_prime", to_string(p.v_prime)}, {"w", to_string(p.w)}};
}

}  // namespace

InvariantBundle::InvariantBundle(Space space, AG3Mapping mapping)
    : space_(std::move(space)), mapping_(std::move(mapping))
{
    mapping_.validate();
    if (mapping_.dim() != space_.dim()) {
        throw DimensionMismatch("space and mapping dimensions differ");
    }
    split_ = split_connection(space_);
    trace_ = contract(split_.sym, 0, 2);
    const std::size_t n = dim();
    sigma_phi_ = build_tensor(n, {Variance::Down}, [&](std::span<const std::size_t> idx) {
        JetScalar s = zero_like(mapping_.sigma);
        for (std::size_t a = 0; a < n; ++a) {
            s += mapping_.sigma(idx[0], a) * mapping_.phi(a);
        }
        return s;
    });
}

const CurvatureFamilyParts& InvariantBundle::curvature_parts()
{
    if (!parts_) {
        parts_ = std::make_unique<CurvatureFamilyParts>(curvature_family_parts(space_));
    }
    return *parts_;
}

const TensorField& InvariantBundle::eta(int which)
{
    require_range(which, 1, 2, "eta kind");
    if (auto it = eta_.find(which); it != eta_.end()) {
        return it->second;
    }
    const std::size_t n = dim();
    const Rational a = inv_n1(n);
    const Rational n1(static_cast<long>(n + 1));
    const AG3Mapping& m = mapping_;
    const TensorField lam = trace_ + sigma_phi_;
    const TensorField sigma_cd = cov_deriv_sym(m.sigma, sym());
    const TensorField& t = torsion();
    // p = phi^a Lambda_a
    JetScalar p = zero_like(lam);
    for (std::size_t al = 0; al < n; ++al) {
        p += m.phi(al) * lam(al);
    }
    // T^a_{bk} phi^b
    const TensorField t_phi = build_tensor(n, {Variance::Up, Variance::Down}, [&](std::span<const std::size_t> idx) {
        JetScalar s = zero_like(t);
        for (std::size_t b = 0; b < n; ++b) {
            s += t(idx[0], b, idx[1]) * m.phi(b);
        }
        return s;
    });
    const Rational sign = which == 1 ? Rational(-1) : Rational(1);
    TensorField e = build_tensor(n, {Variance::Down, Variance::Down}, [&](std::span<const std::size_t> idx) {
        const std::size_t j = idx[0], k = idx[1];
        JetScalar first = n1 * (m.sigma(j, k) * p) - lam(j) * lam(k);
        JetScalar second = m.sigma(j, k) * m.mu;
        for (std::size_t al = 0; al < n; ++al) {
            second += sigma_cd(j, al, k) * m.phi(al);
            second += m.sigma(j, al) * (m.nu(k) * m.phi(al) + sign * t_phi(al, k));
        }
        return first * (a * a) - second * a;
    });
    return eta_.emplace(which, std::move(e)).first->second;
}

const TensorField& InvariantBundle::W_correction(int which)
{
    require_range(which, 1, 2, "W kind");
    if (auto it = w_corr_.find(which); it != w_corr_.end()) {
        return it->second;
    }
    const std::size_t n = dim();
    const Rational a = inv_n1(n);
    const Rational n1(static_cast<long>(n + 1));
    const AG3Mapping& m = mapping_;
    const TensorField& e = eta(which);
    const TensorField e_anti = antisym_pair_nodiv(e, 0, 1);
    const TensorField c_cd = cov_deriv_sym(trace_, sym());
    const TensorField sigma_cd = cov_deriv_sym(m.sigma, sym());
    const TensorField& t = torsion();
    const Rational sign = which == 1 ? Rational(1) : Rational(-1);
    // T^i_{an} phi^a
    const TensorField t_phi = build_tensor(n, {Variance::Up, Variance::Down}, [&](std::span<const std::size_t> idx) {
        JetScalar s = zero_like(t);
        for (std::size_t al = 0; al < n; ++al) {
            s += t(idx[0], al, idx[1]) * m.phi(al);
        }
        return s;
    });
    TensorField c = rank4(n, [&](std::size_t i, std::size_t j, std::size_t mm, std::size_t nn) {
        JetScalar v = zero_like(sigma_cd);
        if (i == j) {
            v += e_anti(mm, nn);
        }
        if (i == mm) {
            v -= a * (c_cd(j, nn) - n1 * (e(j, nn) + m.mu * m.sigma(j, nn)));
        }
        if (i == nn) {
            v += a * (c_cd(j, mm) - n1 * (e(j, mm) + m.mu * m.sigma(j, mm)));
        }
        const JetScalar q = m.sigma(j, mm) * sigma_phi_(nn) - m.sigma(j, nn) * sigma_phi_(mm);
        v -= (sigma_cd(j, mm, nn) - sigma_cd(j, nn, mm) - q) * m.phi(i);
        v += sign * (m.sigma(j, mm) * t_phi(i, nn) - m.sigma(j, nn) * t_phi(i, mm));
        return v;
    });
    return w_corr_.emplace(which, std::move(c)).first->second;
}

const TensorField& InvariantBundle::W(int which)
{
    if (auto it = w_.find(which); it != w_.end()) {
        return it->second;
    }
    TensorField w = R() + W_correction(which);
    return w_.emplace(which, std::move(w)).first->second;
}

const TensorField& InvariantBundle::W_derived()
{
    if (w_derived_) {
        return *w_derived_;
    }
    const std::size_t n = dim();
    const Rational a = inv_n1(n);
    const AG3Mapping& m = mapping_;
    const TensorField& e = eta(m.kind);
    const TensorField e_anti = antisym_pair_nodiv(e, 0, 1);
    const TensorField c_cd = cov_deriv_sym(trace_, sym());
    const TensorField sigma_cd = cov_deriv_sym(m.sigma, sym());
    const TensorField& t = torsion();
    const Rational eps = m.kind == 1 ? Rational(1) : Rational(-1);
    const TensorField& r = R();
    TensorField w = rank4(n, [&](std::size_t i, std::size_t j, std::size_t mm, std::size_t nn) {
        JetScalar v = r(i, j, mm, nn);
        if (i == j) {
            v += e_anti(mm, nn) - a * (trace_(mm).partial(nn) - trace_(nn).partial(mm));
        }
        if (i == mm) {
            v += e(j, nn) - m.mu * m.sigma(j, nn) - a * c_cd(j, nn);
        }
        if (i == nn) {
            v -= e(j, mm) - m.mu * m.sigma(j, mm) - a * c_cd(j, mm);
        }
        const JetScalar q = m.sigma(j, mm) * sigma_phi_(nn) - m.sigma(j, nn) * sigma_phi_(mm);
        v += (sigma_cd(j, mm, nn) - sigma_cd(j, nn, mm) - q + m.sigma(j, mm) * m.nu(nn) - m.sigma(j, nn) * m.nu(mm)) *
             m.phi(i);
        for (std::size_t al = 0; al < n; ++al) {
            v -= eps * ((m.sigma(j, mm) * t(i, al, nn) - m.sigma(j, nn) * t(i, al, mm)) * m.phi(al));
        }
        return v;
    });
    w_derived_ = std::make_unique<TensorField>(std::move(w));
    return *w_derived_;
}

const TensorField& InvariantBundle::U(int theta)
{
    require_range(theta, 1, 20, "U index");
    if (u_.empty()) {
        const std::size_t n = dim();
        const TensorField& t = torsion();
        const TensorField& s = sym();
        const TensorField& c = trace_;
        const TensorField& sp = sigma_phi_;
        const TensorField& phi = mapping_.phi;
        const TensorField& sg = mapping_.sigma;
        auto sum = [&](auto term) {
            JetScalar v = zero_like(t);
            for (std::size_t a = 0; a < n; ++a) {
                v += term(a);
            }
            return v;
        };
        using I = std::size_t;
        const std::array<std::function<JetScalar(I, I, I, I)>, 20> defs = {
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(a, j, m) * s(i, a, nn); }); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(a, j, nn) * s(i, a, m); }); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(i, a, m) * s(a, j, nn); }); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(i, a, nn) * s(a, j, m); }); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(i, j, a) * s(a, m, nn); }); },
            [&](I i, I j, I m, I nn) { return t(i, j, m) * c(nn); },
            [&](I i, I j, I m, I nn) { return t(i, j, nn) * c(m); },
            [&](I i, I j, I m, I nn) { return t(i, m, nn) * c(j); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(i, a, m) * phi(a) * sg(j, nn); }); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(i, a, nn) * phi(a) * sg(j, m); }); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(i, j, a) * phi(a) * sg(m, nn); }); },
            [&](I i, I j, I m, I nn) { return t(i, j, m) * sp(nn); },
            [&](I i, I j, I m, I nn) { return t(i, j, nn) * sp(m); },
            [&](I i, I j, I m, I nn) { return t(i, m, nn) * sp(j); },
            [&](I i, I j, I m, I nn) { return i == nn ? sum([&](I a) { return t(a, j, m) * c(a); }) : zero_like(t); },
            [&](I i, I j, I m, I nn) { return i == m ? sum([&](I a) { return t(a, j, nn) * c(a); }) : zero_like(t); },
            [&](I i, I j, I m, I nn) { return i == nn ? sum([&](I a) { return t(a, j, m) * sp(a); }) : zero_like(t); },
            [&](I i, I j, I m, I nn) { return i == m ? sum([&](I a) { return t(a, j, nn) * sp(a); }) : zero_like(t); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(a, j, m) * phi(i) * sg(a, nn); }); },
            [&](I i, I j, I m, I nn) { return sum([&](I a) { return t(a, j, nn) * phi(i) * sg(a, m); }); },
        };
        for (int k = 0; k < 20; ++k) {
            u_.emplace(k + 1, rank4(n, defs[static_cast<std::size_t>(k)]));
        }
    }
    return u_.at(theta);
}

// Transcribed term by term from the printed definitions, without the U table.
const TensorField& InvariantBundle::sigma(int p)
{
    require_range(p, 1, 8, "sigma index");
    if (auto it = sigma_.find(p); it != sigma_.end()) {
        return it->second;
    }
    const std::size_t n = dim();
    const Rational a = inv_n1(n);
    const TensorField& t = torsion();
    const TensorField& s = sym();
    const TensorField& c = trace_;
    const TensorField& sp = sigma_phi_;
    const TensorField& phi = mapping_.phi;
    const TensorField& sg = mapping_.sigma;
    using I = std::size_t;
    auto sum = [&](auto term) {
        JetScalar v = zero_like(t);
        for (I al = 0; al < n; ++al) {
            v += term(al);
        }
        return v;
    };

    TensorField out = rank4(n, [&](I i, I j, I m, I nn) {
        // Gamma^a_{[jm]} Gamma^i_{(an)}
        const JetScalar ts = sum([&](I al) { return t(al, j, m) * s(i, al, nn); });
        // Gamma^i_{[am]} Gamma^a_{(jn)}
        const JetScalar t_am_s_jn = sum([&](I al) { return t(i, al, m) * s(al, j, nn); });
        // Gamma^i_{[ja]} Gamma^a_{(mn)}
        const JetScalar t_ja_s_mn = sum([&](I al) { return t(i, j, al) * s(al, m, nn); });
        // Gamma^i_{[am]} phi^a sigma_{jn}
        const JetScalar t_am_phi = sum([&](I al) { return t(i, al, m) * phi(al); }) * sg(j, nn);
        // Gamma^i_{[ja]} phi^a sigma_{mn}
        const JetScalar t_ja_phi = sum([&](I al) { return t(i, j, al) * phi(al); }) * sg(m, nn);
        // Gamma^a_{[jm]} phi^i sigma_{an}
        const JetScalar t_phi_i = sum([&](I al) { return t(al, j, m) * sg(al, nn); }) * phi(i);
        // delta^i_n Gamma^a_{[jm]} Gamma^b_{(ab)} and delta^i_n Gamma^a_{[jm]} phi^b sigma_{ab}
        const JetScalar d_tc = i == nn ? sum([&](I al) { return t(al, j, m) * c(al); }) : zero_like(t);
        const JetScalar d_tsp = i == nn ? sum([&](I al) { return t(al, j, m) * sp(al); }) : zero_like(t);
        const JetScalar &t_jm = t(i, j, m), &t_jn = t(i, j, nn), &t_mn = t(i, m, nn);

        switch (p) {
        case 1:
            return ts - t_am_s_jn - t_ja_s_mn;
        case 2:
            return ts + t_am_phi + t_ja_phi - a * (Rational(2) * t_jm * c(nn) + t_jn * c(m) - t_mn * c(j)) -
                   a * (Rational(2) * t_jm * sp(nn) + t_jn * sp(m) - t_mn * sp(j));
        case 3:
            return ts - t_am_s_jn + t_ja_phi -
                   a * (t_jm * c(nn) + t_jn * c(m) + t_jm * sp(nn) + t_jn * sp(m));
        case 4:
            return ts - t_ja_s_mn + t_am_phi - a * (t_jm * c(nn) - t_mn * c(j) + t_jm * sp(nn) - t_mn * sp(j));
        case 5:
            return -t_phi_i - t_am_s_jn - t_ja_s_mn + a * (d_tc + t_jm * c(nn) + d_tsp + t_jm * sp(nn));
        case 6:
            return -t_phi_i + t_am_phi + t_ja_phi + a * (d_tc - t_jm * c(nn) - t_jn * c(m) + t_mn * c(j)) +
                   a * (d_tsp - t_jm * sp(nn) - t_jn * sp(m) + t_mn * sp(j));
        case 7:
            return -t_phi_i - t_am_s_jn + t_ja_phi + a * (d_tc - t_jn * c(m)) + a * (d_tsp - t_jn * sp(m));
        default:
            return -t_phi_i - t_ja_s_mn + t_am_phi + a * (d_tc + t_mn * c(j)) + a * (d_tsp + t_mn * sp(j));
        }
    });
    return sigma_.emplace(p, std::move(out)).first->second;
}

const TensorField& InvariantBundle::sigma_swapped(int p)
{
    if (auto it = sigma_swapped_.find(p); it != sigma_swapped_.end()) {
        return it->second;
    }
    TensorField s = swap_slots(sigma(p), 2, 3);
    return sigma_swapped_.emplace(p, std::move(s)).first->second;
}

const TensorField& InvariantBundle::T_tilde(int rho)
{
    require_range(rho, 1, 8, "T-tilde index");
    if (auto it = t_tilde_.find(rho); it != t_tilde_.end()) {
        return it->second;
    }
    TensorField t = torsion_cd() - u_combination(*this, sigma_coeff_matrix(dim()), rho);
    return t_tilde_.emplace(rho, std::move(t)).first->second;
}

const TensorField& InvariantBundle::K(const FamilyParams& params)
{
    if (!k_last_ || !(k_last_->first == params)) {
        k_last_.emplace(params, curvature_parts().combine(params));
    }
    return k_last_->second;
}

TensorField InvariantBundle::family(int which, int p, int q, const FamilyParams& params)
{
    require_range(p, 1, 8, "p");
    require_range(q, 1, 8, "q");
    return K(params) + W_correction(which) - params.u * sigma(p) - params.u_prime * sigma_swapped(q);
}

TensorField eta_star(const Space& s, const AG3Mapping& m, int which) { return InvariantBundle(s, m).eta(which); }
TensorField W_star(const Space& s, const AG3Mapping& m, int which) { return InvariantBundle(s, m).W(which); }
TensorField U_theta(const Space& s, const AG3Mapping& m, int theta) { return InvariantBundle(s, m).U(theta); }
TensorField sigma_p(const Space& s, const AG3Mapping& m, int p) { return InvariantBundle(s, m).sigma(p); }
TensorField T_tilde(const Space& s, const AG3Mapping& m, int rho) { return InvariantBundle(s, m).T_tilde(rho); }
TensorField W_derived(const Space& s, const AG3Mapping& m) { return InvariantBundle(s, m).W_derived(); }

TensorField W_family(const Space& s, const AG3Mapping& m, int which, int p, int q, const FamilyParams& params)
{
    return InvariantBundle(s, m).family(which, p, q, params);
}

RationalMatrix sigma_coeff_matrix(std::size_t n)
{
    if (n < 2) {
        throw InvalidArgument("sigma_coeff_matrix needs N >= 2");
    }
    const Rational a = inv_n1(n);
    RationalMatrix m(8, 20);
    for (std::size_t p = 0; p < 8; ++p) {
        for (const Coeff& c : kSigmaRows[p]) {
            m(p, static_cast<std::size_t>(c.theta - 1)) = Rational(c.whole) + c.frac * a;
        }
    }
    return m;
}

std::pair<int, int> U_swap(int theta)
{
    require_range(theta, 1, 20, "U index");
    // m <-> n image of each U; U8 and U14 change sign.
    static constexpr std::array<int, 20> image = {2, 1, 4, 3, 5, 7, 6, 8, 10, 9, 11, 13, 12, 14, 16, 15, 18, 17, 20, 19};
    const int sign = (theta == 8 || theta == 14) ? -1 : 1;
    return {image[static_cast<std::size_t>(theta - 1)], sign};
}

RationalMatrix sigma_coeff_matrix_swapped(std::size_t n)
{
    const RationalMatrix base = sigma_coeff_matrix(n);
    RationalMatrix out(8, 20);
    for (std::size_t p = 0; p < 8; ++p) {
        for (int theta = 1; theta <= 20; ++theta) {
            const auto [image, sign] = U_swap(theta);
            out(p, static_cast<std::size_t>(image - 1)) += sign * base(p, static_cast<std::size_t>(theta - 1));
        }
    }
    return out;
}

CoeffValidation validate_sigma_coeff_matrix(std::span<const MappedPair> pairs)
{
    CoeffValidation v;
    if (pairs.empty()) {
        throw InvalidArgument("validation needs at least one instance");
    }
    const std::size_t n = pairs.front().source.dim();
    const RationalMatrix table = sigma_coeff_matrix(n);
    std::vector<InvariantBundle> bundles;
    for (const MappedPair& pr : pairs) {
        if (pr.source.dim() != n) {
            throw DimensionMismatch("validation instances must share N");
        }
        bundles.emplace_back(pr.source, pr.mapping);
    }

    // Direct check of every row on every instance.
    for (int p = 1; p <= 8; ++p) {
        for (auto& b : bundles) {
            if (!(u_combination(b, table, p) - b.sigma(p)).is_zero()) {
                v.failing_rows.push_back(p);
                break;
            }
        }
    }

    // Exact fit: U columns flattened over every jet coefficient of every instance.
    std::vector<std::vector<Rational>> cols(20);
    std::vector<std::vector<Rational>> rhs(8);
    auto push_coeffs = [](std::vector<Rational>& dst, const TensorField& t) {
        for (const JetScalar& j : t.components()) {
            const auto cs = j.coefficients();
            dst.insert(dst.end(), cs.begin(), cs.end());
        }
    };
    for (auto& b : bundles) {
        for (int theta = 1; theta <= 20; ++theta) {
            push_coeffs(cols[static_cast<std::size_t>(theta - 1)], b.U(theta));
        }
        for (int p = 1; p <= 8; ++p) {
            push_coeffs(rhs[static_cast<std::size_t>(p - 1)], b.sigma(p).truncated(b.U(1).order()));
        }
    }
    const std::size_t rows = cols.front().size();
    RationalMatrix a(rows, 20);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < 20; ++c) {
            a(r, c) = cols[c][r];
        }
    }
    v.fit_rank = rank_exact(a);
    for (int p = 1; p <= 8; ++p) {
        const auto x = solve_exact(a, rhs[static_cast<std::size_t>(p - 1)]);
        if (!x) {
            continue;  // already recorded as a failing row
        }
        if (v.fit_rank < 20) {
            continue;  // the fit is not unique; entries cannot be attributed
        }
        for (std::size_t theta = 0; theta < 20; ++theta) {
            if ((*x)[theta] != table(static_cast<std::size_t>(p - 1), theta)) {
                v.mismatches.emplace_back(p, static_cast<int>(theta + 1));
            }
        }
    }
    v.ok = v.failing_rows.empty() && v.mismatches.empty();
    return v;
}

ParamMatrix build_W_matrix(std::size_t n)
{
    const RationalMatrix a = sigma_coeff_matrix(n);
    const RationalMatrix b = sigma_coeff_matrix_swapped(n);
    ParamMatrix m(64, 26, {"u", "u_prime", "v", "v_prime", "w"});
    const Polynomial u = m.variable("u");
    const Polynomial up = m.variable("u_prime");
    for (std::size_t p = 0; p < 8; ++p) {
        for (std::size_t q = 0; q < 8; ++q) {
            const std::size_t row = p * 8 + q;
            m(row, 0) = Polynomial(Rational(1));
            for (std::size_t theta = 0; theta < 20; ++theta) {
                Polynomial e = u;
                e *= a(p, theta);
                Polynomial f = up;
                f *= b(q, theta);
                e += f;
                e *= Rational(-1);
                m(row, theta + 1) = e;
            }
            for (std::size_t k = 0; k < 5; ++k) {
                m(row, 21 + k) = m.variable(k);
            }
        }
    }
    return m;
}

std::size_t family_span_dimension(std::span<const MappedPair> pairs, int samples, std::uint64_t seed, int which)
{
    if (samples < 1) {
        throw InvalidArgument("family_span_dimension needs at least one sample");
    }
    if (pairs.empty()) {
        return 0;
    }
    std::vector<InvariantBundle> bundles;
    for (const MappedPair& p : pairs) {
        bundles.emplace_back(p.source, p.mapping);
    }
    RationalSampler sampler(seed);
    std::size_t best = 0;
    for (int s = 0; s < samples; ++s) {
        const FamilyParams params{sampler.parameter(), sampler.parameter(), sampler.parameter(), sampler.parameter(),
                                  sampler.parameter()};
        std::vector<std::vector<Rational>> rows;
        for (int p = 1; p <= 8; ++p) {
            for (int q = 1; q <= 8; ++q) {
                std::vector<Rational> row;
                for (auto& b : bundles) {
                    const auto flat = flatten_at_base(b.family(which, p, q, params));
                    row.insert(row.end(), flat.begin(), flat.end());
                }
                rows.push_back(std::move(row));
            }
        }
        best = std::max(best, rank_exact(RationalMatrix::from_rows(rows)));
    }
    return best;
}

std::size_t t_tilde_span_dimension(std::span<const MappedPair> pairs)
{
    if (pairs.empty()) {
        return 0;
    }
    const RationalMatrix table = sigma_coeff_matrix(pairs.front().source.dim());
    std::vector<std::vector<Rational>> rows(8);
    for (const MappedPair& pr : pairs) {
        InvariantBundle b(pr.source, pr.mapping);
        for (int rho = 1; rho <= 8; ++rho) {
            const TensorField part = u_combination(b, table, rho);
            const auto flat = flatten_at_base(part);
            auto& row = rows[static_cast<std::size_t>(rho - 1)];
            row.insert(row.end(), flat.begin(), flat.end());
        }
    }
    return rank_exact(RationalMatrix::from_rows(rows));
}

VerificationReport torsion_cd_difference_check(const MappedPair& pair, int p)
{
    InvariantBundle src(pair.source, pair.mapping);
    InvariantBundle tgt(pair.target, inverse_mapping(pair));
    return torsion_cd_difference_check(src, tgt, p);
}

VerificationReport torsion_cd_difference_check(InvariantBundle& src, InvariantBundle& tgt, int p)
{
    require_range(p, 1, 8, "p");
    const std::size_t n = src.dim();
    const TensorField lhs = tgt.torsion_cd() - src.torsion_cd();
    const TensorField d = tgt.sym() - src.sym();
    const TensorField& t = src.torsion();
    const TensorField rhs = rank4(n, [&](std::size_t i, std::size_t j, std::size_t m, std::size_t nn) {
        JetScalar v = zero_like(d);
        for (std::size_t a = 0; a < n; ++a) {
            v += t(a, j, m) * d(i, a, nn) - t(i, a, m) * d(a, j, nn) - t(i, j, a) * d(a, m, nn);
        }
        return v;
    });
    VerificationReport r;
    r.check = "torsion_cd_difference";
    r.params = {{"dim", n}, {"kind", src.mapping().kind}, {"p", p}};
    r.absorb(lhs - rhs);
    r.absorb(lhs - (tgt.sigma(p) - src.sigma(p)));
    return r;
}

VerificationReport R_and_K_transformation_check(const MappedPair& pair, int which, int p, int q,
                                                const FamilyParams& params)
{
    InvariantBundle src(pair.source, pair.mapping);
    InvariantBundle tgt(pair.target, inverse_mapping(pair));
    return R_and_K_transformation_check(src, tgt, which, p, q, params);
}

VerificationReport R_and_K_transformation_check(InvariantBundle& src, InvariantBundle& tgt, int which, int p, int q,
                                                const FamilyParams& params)
{
    require_range(which, 1, 2, "which");
    require_range(p, 1, 8, "p");
    require_range(q, 1, 8, "q");
    const TensorField shift = src.W_correction(which) - tgt.W_correction(which);
    VerificationReport r;
    r.check = "R_and_K_transformation";
    r.params = {{"dim", src.dim()}, {"kind", src.mapping().kind}, {"which", which}, {"p", p}, {"q", q}};
    r.params.update(params_json(params));
    r.absorb(tgt.R() - (src.R() + shift));
    const TensorField k_rhs = src.K(params) + shift + params.u * (tgt.sigma(p) - src.sigma(p)) +
                              params.u_prime * (tgt.sigma_swapped(q) - src.sigma_swapped(q));
    r.absorb(tgt.K(params) - k_rhs);
    return r;
}

VerificationReport correlation_check(const MappedPair& pair, int which, int p, int q, const FamilyParams& params)
{
    InvariantBundle b(pair.source, pair.mapping);
    return correlation_check(b, which, p, q, params);
}

VerificationReport correlation_check(InvariantBundle& b, int which, int p, int q, const FamilyParams& params)
{
    const CurvatureFamilyParts& k = b.curvature_parts();
    const TensorField expected = b.W(which) + params.u * k.torsion_cd + params.u_prime * k.torsion_cd_swapped +
                                 params.v * k.tt_v + params.v_prime * k.tt_v_prime + params.w * k.tt_w -
                                 params.u * b.sigma(p) - params.u_prime * b.sigma_swapped(q);
    VerificationReport r;
    r.check = "correlation";
    r.params = {{"dim", b.dim()}, {"kind", b.mapping().kind}, {"which", which}, {"p", p}, {"q", q}};
    r.params.update(params_json(params));
    r.absorb(b.family(which, p, q, params) - expected);
    return r;
}

}  // namespace eqlab
