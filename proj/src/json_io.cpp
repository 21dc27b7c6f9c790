#include "eqlab/json_io.hpp"

#include "eqlab/errors.hpp"

namespace eqlab {

Json jet_to_json(const JetScalar& j)
{
    const MonomialBasis& basis = MonomialBasis::get(j.dim(), j.order());
    Json coeffs = Json::array();
    const auto cs = j.coefficients();
    for (std::size_t k = 0; k < cs.size(); ++k) {
        if (cs[k] == 0) {
            continue;
        }
        coeffs.push_back(
            {{"alpha", basis.exponent(k)}, {"num", numerator_string(cs[k])}, {"den", denominator_string(cs[k])}});
    }
    return {{"dim", j.dim()}, {"order", j.order()}, {"coeffs", std::move(coeffs)}};
}

JetScalar jet_from_json(const Json& j)
{
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        const int order = j.at("order").get<int>();
        std::vector<std::pair<MultiIndex, Rational>> terms;
        for (const Json& c : j.at("coeffs")) {
            terms.emplace_back(c.at("alpha").get<MultiIndex>(),
                               rational_from_strings(c.at("num").get<std::string>(), c.at("den").get<std::string>()));
        }
        return JetScalar::from_terms(dim, order, terms);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed jet JSON: ") + e.what());
    }
}

Json tensor_to_json(const TensorField& t)
{
    Json valence = Json::array();
    for (Variance v : t.valence()) {
        valence.push_back(to_string(v));
    }
    Json comps = Json::array();
    for (const JetScalar& c : t.components()) {
        comps.push_back(jet_to_json(c));
    }
    return {{"dim", t.dim()}, {"valence", std::move(valence)}, {"components", std::move(comps)}};
}

TensorField tensor_from_json(const Json& j)
{
    try {
        Valence v;
        for (const Json& s : j.at("valence")) {
            v.push_back(variance_from_string(s.get<std::string>()));
        }
        std::vector<JetScalar> comps;
        for (const Json& c : j.at("components")) {
            comps.push_back(jet_from_json(c));
        }
        if (comps.empty()) {
            throw InvalidArgument("tensor JSON has no components");
        }
        return TensorField(j.at("dim").get<std::size_t>(), std::move(v), std::move(comps));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed tensor JSON: ") + e.what());
    }
}

Json space_to_json(const Space& s)
{
    return {{"dim", s.dim()},
            {"gamma", tensor_to_json(s.gamma())},
            {"metric", s.metric() ? tensor_to_json(*s.metric()) : Json(nullptr)}};
}

Space space_from_json(const Json& j)
{
    if (j.contains("metric") && !j.at("metric").is_null()) {
        return Space::from_metric(tensor_from_json(j.at("metric")));
    }
    return Space(tensor_from_json(j.at("gamma")));
}

Json mapping_to_json(const AG3Mapping& m)
{
    return {{"kind", m.kind},
            {"psi", tensor_to_json(m.psi)},
            {"sigma", tensor_to_json(m.sigma)},
            {"phi", tensor_to_json(m.phi)},
            {"nu", tensor_to_json(m.nu)},
            {"mu", jet_to_json(m.mu)}};
}

AG3Mapping mapping_from_json(const Json& j)
{
    try {
        AG3Mapping m;
        m.kind = j.at("kind").get<int>();
        m.psi = tensor_from_json(j.at("psi"));
        m.sigma = tensor_from_json(j.at("sigma"));
        m.phi = tensor_from_json(j.at("phi"));
        m.nu = tensor_from_json(j.at("nu"));
        m.mu = jet_from_json(j.at("mu"));
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed mapping JSON: ") + e.what());
    }
}

Json pair_to_json(const MappedPair& p)
{
    return {{"source", space_to_json(p.source)}, {"mapping", mapping_to_json(p.mapping)},
            {"target", space_to_json(p.target)}};
}

MappedPair pair_from_json(const Json& j)
{
    try {
        MappedPair p{space_from_json(j.at("source")), mapping_from_json(j.at("mapping")),
                     space_from_json(j.at("target"))};
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed pair JSON: ") + e.what());
    }
}

}  // namespace eqlab
