#pragma once

#include "eqlab/invariants.hpp"

#include <cstdint>
#include <vector>

namespace eqlab {

struct SuiteOptions {
    std::vector<int> p_list{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> q_list{1, 2, 3, 4, 5, 6, 7, 8};
    /// Random (u, u', v, v', w) draws per grid cell.
    int draws = 3;
    std::uint64_t param_seed = 0;
    /// Negative control: the target side uses the inverse mapping with psi negated.
    bool corrupt_psi_bar = false;
};

/// Negates psi-bar and carries the flip through the reciprocity formulas for nu-bar and mu-bar.
AG3Mapping corrupt_psi_bar(const AG3Mapping& inverse);

std::vector<FamilyParams> draw_family_params(int draws, std::uint64_t seed);

/// Source-side and target-side evaluations of one quantity; passes iff they are equal.
VerificationReport invariance_report(const std::string& check, const TensorField& source, const TensorField& target,
                                     nlohmann::ordered_json params);

/// The full identity and invariance suite on one pair. Grid checks are folded into one
/// report per check and `which`; the note counts failing cells.
std::vector<VerificationReport> verify_pair(const MappedPair& pair, const SuiteOptions& opts = {});

}  // namespace eqlab
