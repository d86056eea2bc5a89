#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ifsdim/affine_map.hpp"
#include "ifsdim/system.hpp"

namespace ifsdim {

enum class Family { ALIGNED_GN, K_ITERATE, HYBRID, OVERLAP_DECLARED, PLANAR_TWO_MAP, UNCLASSIFIED };

const char* to_string(Family f);
std::optional<Family> family_from_string(const std::string& s);

struct GnOrder {
    std::size_t map_index = 0;
    std::optional<int> order_n;  // empty: none up to n_max
    std::optional<double> ratio_c;
    bool strict = false;
};

struct AlignmentPair {
    std::size_t similarity_index = 0;
    std::size_t affine_index = 0;
    double commutator_norm = 0.0;
    bool aligned = false;
};

struct AlignmentReport {
    std::vector<AlignmentPair> pairs;
    bool all_aligned() const;
};

struct WordRatio {
    Word word;
    double ratio = 0.0;
};

struct KUniform {
    int k = 0;
    std::vector<WordRatio> ratios;
};

enum class ASquareForm { PLUS_cI, MINUS_cI, NEITHER };
enum class SForm { PLUS_rI, MINUS_rI, AXIAL_REFLECTION, OTHER };

const char* to_string(ASquareForm f);
const char* to_string(SForm f);

struct PlanarClass {
    std::size_t f_index = 0;
    std::size_t g_index = 1;
    ASquareForm a_square_form = ASquareForm::NEITHER;
    std::optional<double> c;
    int det_sign = 1;
    SForm s_form = SForm::OTHER;
    std::optional<double> r;
    bool fixed_points_distinct = false;
    bool collinear_degenerate = false;
};

// Ratios that parameterise the chosen family's equation.
struct FamilyParameters {
    int order = 0;                           // n (ALIGNED_GN, HYBRID) or k (K_ITERATE, OVERLAP_DECLARED)
    std::vector<std::size_t> iterate_maps;   // maps whose order-th iterate contributes c
    std::vector<double> iterate_ratios;      // c_i: ratio of the order-th iterate / length-k word
    std::vector<std::size_t> similarity_maps;
    std::vector<double> similarity_ratios;   // r_j
};

struct ClassificationReport {
    Family family = Family::UNCLASSIFIED;
    std::size_t ambient_dim = 0;
    std::vector<GnOrder> gn_orders;
    AlignmentReport alignment;
    std::optional<KUniform> k_uniform;
    std::optional<PlanarClass> planar;
    FamilyParameters parameters;
    std::vector<std::string> guard_notes;
};

struct ClassifierOptions {
    int n_max = 8;
    int k_max = 8;
    double similarity_tol = kSimilarityTol;
    double alignment_tol = 1e-9;
    double planar_tol = 1e-9;
    std::optional<Family> forced;  // evaluate only this family
};

GnOrder gn_order(const AffineMap& f, int n_max, double tol = kSimilarityTol);

// Throws NotSimilarity when g fails similarity_test.
std::pair<bool, double> is_f_aligned(const AffineMap& g, const AffineMap& f, double tol = 1e-9);

struct UniformKResult {
    std::optional<std::vector<WordRatio>> ratios;
    std::optional<Word> first_failure;
};

UniformKResult uniform_k_similarity(std::span<const AffineMap> maps, int k, double tol = kSimilarityTol);
inline UniformKResult uniform_k_similarity(const IfsSystem& system, int k, double tol = kSimilarityTol) {
    return uniform_k_similarity(system.maps, k, tol);
}

PlanarClass planar_classify(const AffineMap& f, const AffineMap& g, double tol = 1e-9);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct DecoupledBound {
    std::size_t axis = 0;
    Interval interval;
    int word_length = 0;
    std::vector<Word> words;
    std::vector<std::pair<double, double>> maps_1d;  // t -> a t + b
};

std::optional<DecoupledBound> decoupled_projection_bound(const IfsSystem& system, int max_word_len = 3);

ClassificationReport classify_system(const IfsSystem& system, const ClassifierOptions& options = {});

}  // namespace ifsdim
