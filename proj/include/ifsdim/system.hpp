#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ifsdim/affine_map.hpp"

namespace ifsdim {

// A declared homothetic copy x -> lambda*x + t of the attractor; |lambda| = p.
struct HomotheticCopy {
    double lambda = 0.0;
    Vector translation;
};

struct OverlapSpec {
    std::vector<std::size_t> indices;
    int multiplicity_q = 2;
    double scale_p = 0.0;
    std::optional<HomotheticCopy> homothety;  // used only by empirical checks
};

struct IfsSystem {
    std::vector<AffineMap> maps;
    std::vector<OverlapSpec> overlaps;
    std::string name;

    std::size_t dim() const { return maps.empty() ? 0 : maps.front().dim(); }
    std::size_t size() const { return maps.size(); }
};

// Throws InvalidArgument/DimensionMismatch on an ill-formed system.
void validate(const IfsSystem& system);

}  // namespace ifsdim
