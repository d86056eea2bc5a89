#include "ifsdim/affine_map.hpp"

#include <cmath>

#include "ifsdim/error.hpp"
#include "ifsdim/system.hpp"

namespace ifsdim {

AffineMap::AffineMap(Matrix linear, Vector translation, std::string label, NoCheck)
    : linear_(std::move(linear)), translation_(std::move(translation)), label_(std::move(label)) {
    if (linear_.size() == 0) throw Error(ErrorKind::InvalidArgument, "ambient dimension must be >= 1");
    if (linear_.size() > kMaxAmbientDim)
        throw Error(ErrorKind::InvalidArgument,
                    "ambient dimension " + std::to_string(linear_.size()) + " exceeds 8");
    if (translation_.size() != linear_.size())
        throw Error(ErrorKind::DimensionMismatch, "translation length " + std::to_string(translation_.size()) +
                                                      " does not match matrix size " +
                                                      std::to_string(linear_.size()));
}

AffineMap::AffineMap(Matrix linear, Vector translation, std::string label)
    : AffineMap(std::move(linear), std::move(translation), std::move(label), NoCheck{}) {
    if (std::abs(determinant(linear_)) <= kSingularDet)
        throw Error(ErrorKind::Singular, "linear part of map '" + label_ + "' is singular");
}

AffineMap AffineMap::unchecked(Matrix linear, Vector translation, std::string label) {
    return AffineMap(std::move(linear), std::move(translation), std::move(label), NoCheck{});
}

Vector AffineMap::operator()(std::span<const double> x) const {
    Vector y = linear_ * x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += translation_[i];
    return y;
}

AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
    if (outer.dim() != inner.dim())
        throw Error(ErrorKind::DimensionMismatch, "cannot compose maps of dimension " +
                                                      std::to_string(outer.dim()) + " and " +
                                                      std::to_string(inner.dim()));
    return AffineMap::unchecked(outer.linear() * inner.linear(), outer(inner.translation()));
}

AffineMap iterate(const AffineMap& f, int n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "iterate requires n >= 1");
    AffineMap out = f;
    for (int i = 1; i < n; ++i) out = compose(f, out);
    return out;
}

Vector fixed_point(const AffineMap& f) {
    const Matrix m = Matrix::identity(f.dim()) - f.linear();
    try {
        return solve(m, f.translation());
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Singular) throw;
        throw Error(ErrorKind::NoFixedPoint, "no unique fixed point: I - A is singular");
    }
}

SimilarityTestResult similarity_test(const Matrix& a, double tol) {
    const std::size_t m = a.size();
    const double sigma = std::pow(std::abs(determinant(a)), 1.0 / static_cast<double>(m));
    const Matrix ata = a.transpose() * a;
    SimilarityTestResult r;
    r.residual = (ata - Matrix::scalar(m, sigma * sigma)).frobenius();
    r.is_similarity = sigma > 0 && r.residual <= tol * std::max(1.0, sigma * sigma);
    if (r.is_similarity) {
        r.ratio = sigma;
        r.orthogonal_part = (1.0 / sigma) * a;
    }
    return r;
}

SimilarityTestResult similarity_test(const AffineMap& f, double tol) { return similarity_test(f.linear(), tol); }

Vector singular_values(const AffineMap& f) { return singular_values(f.linear()); }

AffineMap inverse(const AffineMap& f) {
    Matrix inv = inverse(f.linear());
    Vector t = inv * f.translation();
    for (double& v : t) v = -v;
    return AffineMap::unchecked(std::move(inv), std::move(t), f.label());
}

std::size_t word_count(std::size_t n_maps, int length) {
    std::size_t total = 1;
    for (int i = 0; i < length; ++i) {
        if (n_maps != 0 && total > kMaxWords / n_maps) return kMaxWords + 1;
        total *= n_maps;
    }
    return total;
}

void for_each_word(std::span<const AffineMap> maps, int length,
                   const std::function<void(const Word&, const AffineMap&)>& visit) {
    if (length < 1) throw Error(ErrorKind::InvalidArgument, "word length must be >= 1");
    if (maps.empty()) throw Error(ErrorKind::InvalidArgument, "no maps to compose");
    if (word_count(maps.size(), length) > kMaxWords)
        throw Error(ErrorKind::TooLarge, "k too large: " + std::to_string(maps.size()) + "^" +
                                             std::to_string(length) + " words exceed 10^6");
    Word w(static_cast<std::size_t>(length), 0);
    std::vector<AffineMap> prefix;
    prefix.reserve(static_cast<std::size_t>(length));
    const std::size_t L = static_cast<std::size_t>(length);

    // prefix[t] = f_{w0} ∘ ... ∘ f_{wt}
    auto rebuild_from = [&](std::size_t t) {
        prefix.erase(prefix.begin() + static_cast<std::ptrdiff_t>(t), prefix.end());
        for (std::size_t i = t; i < L; ++i)
            prefix.push_back(i == 0 ? maps[w[0]] : compose(prefix.back(), maps[w[i]]));
    };
    rebuild_from(0);
    while (true) {
        visit(w, prefix.back());
        std::size_t t = L;
        while (t > 0 && w[t - 1] + 1 == maps.size()) {
            w[t - 1] = 0;
            --t;
        }
        if (t == 0) return;
        ++w[t - 1];
        rebuild_from(t - 1);
    }
}

AffineMap compose_word(std::span<const AffineMap> maps, const Word& w) {
    if (w.empty()) throw Error(ErrorKind::InvalidArgument, "empty word");
    AffineMap out = maps[w.back()];
    for (std::size_t i = w.size() - 1; i-- > 0;) out = compose(maps[w[i]], out);
    return out;
}

std::string word_to_string(std::span<const AffineMap> maps, const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += "∘";
        const std::string& label = maps[w[i]].label();
        s += label.empty() ? "f" + std::to_string(w[i]) : label;
    }
    return s;
}

void validate(const IfsSystem& system) {
    if (system.maps.empty()) throw Error(ErrorKind::InvalidArgument, "system has no maps");
    const std::size_t m = system.dim();
    for (std::size_t i = 0; i < system.maps.size(); ++i)
        if (system.maps[i].dim() != m)
            throw Error(ErrorKind::DimensionMismatch,
                        "map " + std::to_string(i) + " has dimension " + std::to_string(system.maps[i].dim()) +
                            ", expected " + std::to_string(m));
    for (std::size_t j = 0; j < system.overlaps.size(); ++j) {
        const OverlapSpec& o = system.overlaps[j];
        const std::string where = "overlap " + std::to_string(j) + ": ";
        if (o.indices.empty()) throw Error(ErrorKind::InvalidArgument, where + "empty index set");
        for (std::size_t a = 0; a < o.indices.size(); ++a) {
            if (o.indices[a] >= system.maps.size())
                throw Error(ErrorKind::InvalidArgument, where + "index " + std::to_string(o.indices[a]) +
                                                            " out of range");
            for (std::size_t b = 0; b < a; ++b)
                if (o.indices[a] == o.indices[b])
                    throw Error(ErrorKind::InvalidArgument, where + "duplicate index");
        }
        if (o.multiplicity_q < 1 || static_cast<std::size_t>(o.multiplicity_q) != o.indices.size())
            throw Error(ErrorKind::InvalidArgument, where + "q must equal the number of indices");
        if (!(o.scale_p > 0 && o.scale_p < 1)) throw Error(ErrorKind::InvalidArgument, where + "p must lie in (0,1)");
        if (o.homothety) {
            if (std::abs(std::abs(o.homothety->lambda) - o.scale_p) > 1e-12)
                throw Error(ErrorKind::InvalidArgument, where + "homothety ratio must have magnitude p");
            if (o.homothety->translation.size() != m)
                throw Error(ErrorKind::DimensionMismatch, where + "homothety translation length");
        }
    }
}

}  // namespace ifsdim
