#include "eqlab/suite.hpp"

#include "eqlab/sampling.hpp"

namespace eqlab {

namespace {

struct Fold {
    VerificationReport report;
    std::size_t cells = 0;
    std::size_t failed = 0;

    Fold(std::string check, nlohmann::ordered_json params)
    {
        report.check = std::move(check);
        report.params = std::move(params);
    }

    void add(const VerificationReport& r)
    {
        ++cells;
        report.max_abs_residual_num_digits = std::max(report.max_abs_residual_num_digits, r.max_abs_residual_num_digits);
        if (!r.pass) {
            ++failed;
            if (report.pass) {
                report.residual = r.residual;
                report.params["first_failure"] = r.params;
            }
            report.pass = false;
        }
    }

    VerificationReport done()
    {
        if (cells > 1 && failed > 0) {
            report.note = std::to_string(failed) + " of " + std::to_string(cells) + " cells differ";
        }
        return std::move(report);
    }
};

}  // namespace

AG3Mapping corrupt_psi_bar(const AG3Mapping& inverse)
{
    // Reciprocity written in barred psi: nu-bar = nu - psi-bar + 2 sigma phi, mu-bar = mu - psi-bar.phi.
    // Flipping psi-bar therefore moves nu-bar by 2 psi-bar and mu-bar by 2 psi-bar.phi.
    AG3Mapping m = inverse;
    m.psi = Rational(-1) * inverse.psi;
    m.nu = inverse.nu + Rational(2) * inverse.psi;
    const JetScalar psi_phi = contract(outer(inverse.phi, inverse.psi), 0, 1).flat(0);
    m.mu = inverse.mu + Rational(2) * psi_phi;
    return m;
}

std::vector<FamilyParams> draw_family_params(int draws, std::uint64_t seed)
{
    RationalSampler sampler(seed);
    std::vector<FamilyParams> out;
    for (int d = 0; d < draws; ++d) {
        FamilyParams p;
        p.u = sampler.parameter();
        p.u_prime = sampler.parameter();
        p.v = sampler.parameter();
        p.v_prime = sampler.parameter();
        p.w = sampler.parameter();
        out.push_back(p);
    }
    return out;
}

VerificationReport invariance_report(const std::string& check, const TensorField& source, const TensorField& target,
                                     nlohmann::ordered_json params)
{
    VerificationReport r;
    r.check = check;
    r.params = std::move(params);
    r.absorb(target - source);
    return r;
}

std::vector<VerificationReport> verify_pair(const MappedPair& pair, const SuiteOptions& opts)
{
    AG3Mapping inverse = inverse_mapping(pair);
    if (opts.corrupt_psi_bar) {
        inverse = corrupt_psi_bar(inverse);
    }
    InvariantBundle src(pair.source, pair.mapping);
    InvariantBundle tgt(pair.target, inverse);
    const std::size_t n = src.dim();
    const int kind = pair.mapping.kind;
    const auto base = [&] { return nlohmann::ordered_json{{"dim", n}, {"kind", kind}}; };
    const auto grid = [&](int which) {
        auto j = base();
        j["which"] = which;
        j["p"] = opts.p_list;
        j["q"] = opts.q_list;
        j["draws"] = opts.draws;
        return j;
    };
    const std::vector<FamilyParams> params = draw_family_params(opts.draws, opts.param_seed);
    std::vector<VerificationReport> out;

    {
        VerificationReport r;
        r.check = "basic_equation";
        r.params = base();
        r.absorb(basic_equation_residual(pair.source, pair.mapping));
        out.push_back(std::move(r));
    }
    {
        VerificationReport r;
        r.check = "basic_equation_inverse";
        r.params = base();
        r.absorb(basic_equation_residual(pair.target, inverse));
        out.push_back(std::move(r));
    }
    for (int which = 1; which <= 2; ++which) {
        auto j = base();
        j["which"] = which;
        out.push_back(invariance_report("W_star_invariance", src.W(which), tgt.W(which), j));
    }
    {
        Fold f("T_tilde_invariance", base());
        for (int rho = 1; rho <= 8; ++rho) {
            auto j = base();
            j["rho"] = rho;
            f.add(invariance_report("T_tilde_invariance", src.T_tilde(rho), tgt.T_tilde(rho), j));
        }
        out.push_back(f.done());
    }
    for (int which = 1; which <= 2; ++which) {
        Fold fam("family_invariance", grid(which));
        Fold cor("correlation", grid(which));
        Fold rk("R_K_transformation", grid(which));
        for (const FamilyParams& fp : params) {
            for (int p : opts.p_list) {
                for (int q : opts.q_list) {
                    auto j = base();
                    j["which"] = which;
                    j["p"] = p;
                    j["q"] = q;
                    fam.add(invariance_report("family_invariance", src.family(which, p, q, fp),
                                              tgt.family(which, p, q, fp), j));
                    cor.add(correlation_check(src, which, p, q, fp));
                    rk.add(R_and_K_transformation_check(src, tgt, which, p, q, fp));
                }
            }
        }
        out.push_back(fam.done());
        out.push_back(cor.done());
        out.push_back(rk.done());
    }
    {
        Fold f("torsion_cd_difference", base());
        for (int p = 1; p <= 8; ++p) {
            f.add(torsion_cd_difference_check(src, tgt, p));
        }
        out.push_back(f.done());
    }
    {
        VerificationReport r;
        r.check = "gamma_diff_factorization";
        r.params = base();
        r.absorb(gamma_diff_factorized(pair).residual);
        out.push_back(std::move(r));
    }
    out.push_back(invariance_report("W_derived_invariance", src.W_derived(), tgt.W_derived(), base()));

    if (src.torsion().is_zero()) {
        for (auto& r : out) {
            r.note = r.note.empty() ? "degenerate: torsion is zero" : r.note + "; degenerate: torsion is zero";
        }
    }
    return out;
}

}  // namespace eqlab
