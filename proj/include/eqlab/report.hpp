#pragma once

#include "eqlab/tensor.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace eqlab {

/// One pass/fail record. The residual travels only on failure.
struct VerificationReport {
    std::string check;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    bool pass = true;
    std::size_t max_abs_residual_num_digits = 0;
    std::optional<TensorField> residual;
    std::optional<std::size_t> rank;
    std::string note;

    /// Folds a residual in: keeps the first failing residual and the largest digit count.
    void absorb(const TensorField& r);

    nlohmann::ordered_json to_json() const;
};

/// Decimal digits of the largest numerator magnitude among all jet coefficients; 0 for zero.
std::size_t max_abs_num_digits(const TensorField& t);

}  // namespace eqlab
