#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ifsdim/linalg.hpp"

namespace ifsdim {

inline constexpr std::size_t kMaxAmbientDim = 8;
inline constexpr double kSingularDet = 1e-12;
inline constexpr double kSimilarityTol = 1e-9;

class AffineMap {
public:
    AffineMap(Matrix linear, Vector translation, std::string label = {});
    // Unchecked: allows singular linear parts (intermediate products).
    static AffineMap unchecked(Matrix linear, Vector translation, std::string label = {});

    std::size_t dim() const noexcept { return linear_.size(); }
    const Matrix& linear() const noexcept { return linear_; }
    const Vector& translation() const noexcept { return translation_; }
    const std::string& label() const noexcept { return label_; }

    Vector operator()(std::span<const double> x) const;

private:
    struct NoCheck {};
    AffineMap(Matrix linear, Vector translation, std::string label, NoCheck);

    Matrix linear_;
    Vector translation_;
    std::string label_;
};

struct SimilarityTestResult {
    bool is_similarity = false;
    std::optional<double> ratio;
    std::optional<Matrix> orthogonal_part;
    double residual = 0.0;
};

// outer(inner(x))
AffineMap compose(const AffineMap& outer, const AffineMap& inner);
AffineMap iterate(const AffineMap& f, int n);
Vector fixed_point(const AffineMap& f);
SimilarityTestResult similarity_test(const AffineMap& f, double tol = kSimilarityTol);
SimilarityTestResult similarity_test(const Matrix& a, double tol = kSimilarityTol);
Vector singular_values(const AffineMap& f);
AffineMap inverse(const AffineMap& f);

// A word (j1..jL) denotes f_{j1} ∘ ... ∘ f_{jL}.
using Word = std::vector<std::size_t>;

std::size_t word_count(std::size_t n_maps, int length);
inline constexpr std::size_t kMaxWords = 1'000'000;

// Depth-first enumeration of all length-L compositions in lexicographic word
// order. Throws TooLarge beyond kMaxWords.
void for_each_word(std::span<const AffineMap> maps, int length,
                   const std::function<void(const Word&, const AffineMap&)>& visit);

AffineMap compose_word(std::span<const AffineMap> maps, const Word& w);
std::string word_to_string(std::span<const AffineMap> maps, const Word& w);

}  // namespace ifsdim
