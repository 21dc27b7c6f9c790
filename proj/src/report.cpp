#include "eqlab/report.hpp"

#include "eqlab/json_io.hpp"

#include <algorithm>

namespace eqlab {

std::size_t max_abs_num_digits(const TensorField& t)
{
    std::size_t best = 0;
    for (const JetScalar& j : t.components()) {
        for (const Rational& c : j.coefficients()) {
            if (c != 0) {
                best = std::max(best, numerator_digits(c));
            }
        }
    }
    return best;
}

void VerificationReport::absorb(const TensorField& r)
{
    if (r.is_zero()) {
        return;
    }
    if (pass) {
        residual = r;
    }
    pass = false;
    max_abs_residual_num_digits = std::max(max_abs_residual_num_digits, max_abs_num_digits(r));
}

nlohmann::ordered_json VerificationReport::to_json() const
{
    nlohmann::ordered_json j;
    j["check"] = check;
    j["params"] = params;
    j["pass"] = pass;
    j["max_abs_residual_num_digits"] = max_abs_residual_num_digits;
    j["residual"] = (!pass && residual) ? tensor_to_json(*residual) : nlohmann::ordered_json(nullptr);
    j["rank"] = rank ? nlohmann::ordered_json(*rank) : nlohmann::ordered_json(nullptr);
    if (!note.empty()) {
        j["note"] = note;
    }
    return j;
}

}  // namespace eqlab
