#pragma once

#include <string>
#include <vector>

namespace lps::validation {

struct CriterionResult {
    std::string name;
    bool pass = false;
    double elapsed_s = 0.0;
    std::string detail;
};

// The acceptance criteria, one runner each. Tolerances are pinned here.
CriterionResult scaling_reproduction();
CriterionResult dark_signal_identity();
CriterionResult bound_suite(unsigned seed);
CriterionResult asymptotic_consistency();
CriterionResult series_oracle_equivalence(unsigned seed);
CriterionResult discretization_order();
CriterionResult qualitative_reproduction();
CriterionResult antisymmetry_determinism();

std::vector<CriterionResult> run_all(unsigned seed);

}  // namespace lps::validation
