#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ifsdim/classifier.hpp"
#include "ifsdim/system.hpp"

namespace ifsdim {

struct Term {
    double weight = 1.0;
    double base = 0.5;
};

// Σ w_i b_i^s = target
struct DimensionEquation {
    std::vector<Term> terms;
    double target = 1.0;
    Family family = Family::UNCLASSIFIED;
    std::string provenance;
};

struct DimensionResult {
    double s = 0.0;
    double residual = 0.0;
    double lo = 0.0, hi = 0.0;
    int iterations = 0;
    std::string uniqueness_note;
};

struct ClosedForm {
    double denominator = 1.0;                      // u = ref^(s/denominator)
    double ref_base = 0.0;
    std::vector<std::pair<int, double>> poly;      // (exponent, coefficient), descending; constant included
    std::string polynomial;                        // e.g. "u^2 + u - 1 = 0"
    std::optional<std::string> radical;            // exact root for degree <= 2
    double u = 0.0;
    double s = 0.0;
};

// Throws GuardRefusal for UNCLASSIFIED / PLANAR_TWO_MAP reports.
DimensionEquation build_equation(const ClassificationReport& report, std::span<const OverlapSpec> overlaps = {});

void validate(const DimensionEquation& eq);
double eval_lhs(const DimensionEquation& eq, double s);
DimensionResult solve_dimension(const DimensionEquation& eq, int ambient_m);
std::optional<ClosedForm> closed_form_check(const DimensionEquation& eq);

std::string equation_text(const DimensionEquation& eq);

}  // namespace ifsdim
