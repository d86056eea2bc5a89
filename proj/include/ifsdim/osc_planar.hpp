#pragma once

#include <array>
#include <string>
#include <vector>

#include "ifsdim/affine_map.hpp"
#include "ifsdim/classifier.hpp"

namespace ifsdim {

enum class OscCase { NEG_cI_POS_r, NEG_cI_NEG_r, POS_cI_POS_r, POS_cI_NEG_r };
const char* to_string(OscCase c);

struct Margin {
    std::string name;
    double value = 0.0;  // >= -tolerance when satisfied
    double tolerance = 0.0;
    bool ok() const { return value >= -tolerance; }
};

struct OscCertificate {
    OscCase case_tag = OscCase::NEG_cI_POS_r;
    Vector axis_u, axis_w;
    double lambda = 0.0;  // oblique coefficient, NEG_cI_NEG_r only
    double k_offset = 0.0;
    std::array<double, 2> alpha{}, beta{};
    std::array<Vector, 4> vertices;  // (α1,β1), (α2,β1), (α2,β2), (α1,β2) mapped back
    double c = 0.0, r = 0.0;
    bool verified = false;
    std::vector<Margin> margins;
};

struct CertificateCheck {
    bool passed = false;
    std::vector<Margin> margins;
    std::string violated;  // first failing inequality, empty when passed
    Interval f_u, g_u, f_w, g_w;
};

// Throws HypothesisError naming the failing clause; verifies before returning.
OscCertificate certify_osc(const AffineMap& f, const AffineMap& g);
CertificateCheck verify_certificate(const OscCertificate& cert, const AffineMap& f, const AffineMap& g);

enum class Topology { CONNECTED, TOTALLY_DISCONNECTED, BOTTLENECK_BOTH, INAPPLICABLE };
const char* to_string(Topology t);

struct TopologyVerdict {
    double sum_cr = 0.0;
    double c = 0.0, r = 0.0;
    Topology verdict = Topology::INAPPLICABLE;
    std::string reason;
};

TopologyVerdict classify_topology(const AffineMap& f, const AffineMap& g);

// Parameter interval H of the 1D model f~(t) = ±ct, g~(t) = ±rt + 1 ∓ r with
// H ⊂ f~(H) ∪ g~(H). Throws HypothesisError when c + r < 1.
Interval invariant_interval_1d(OscCase case_tag, double c, double r);

}  // namespace ifsdim
