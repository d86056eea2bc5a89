#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ifsdim/affine_map.hpp"
#include "ifsdim/error.hpp"
#include "ifsdim/linalg.hpp"
#include "ifsdim/rng.hpp"
#include "systems.hpp"

using namespace ifsdim;

namespace {

Matrix random_matrix(SplitMix64& rng, std::size_t m, double scale = 1.0) {
    Matrix a(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) a(i, j) = scale * (2 * rng.uniform() - 1);
    return a;
}

Vector random_vector(SplitMix64& rng, std::size_t m, double scale = 1.0) {
    Vector v(m);
    for (auto& x : v) x = scale * (2 * rng.uniform() - 1);
    return v;
}

// Random orthogonal by modified Gram-Schmidt.
Matrix random_orthogonal(SplitMix64& rng, std::size_t m) {
    Matrix a = random_matrix(rng, m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t p = 0; p < j; ++p) {
            double d = 0;
            for (std::size_t i = 0; i < m; ++i) d += a(i, j) * a(i, p);
            for (std::size_t i = 0; i < m; ++i) a(i, j) -= d * a(i, p);
        }
        double n = 0;
        for (std::size_t i = 0; i < m; ++i) n += a(i, j) * a(i, j);
        n = std::sqrt(n);
        for (std::size_t i = 0; i < m; ++i) a(i, j) /= n;
    }
    return a;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    return d;
}

AffineMap random_invertible(SplitMix64& rng, std::size_t m, double scale) {
    for (;;) {
        Matrix a = random_matrix(rng, m, scale);
        if (std::abs(determinant(a)) > 1e-3 * std::pow(scale, double(m))) return AffineMap(a, random_vector(rng, m));
    }
}

}  // namespace

TEST_SUITE("affine_core") {

TEST_CASE("linalg basics") {
    Matrix a{{2, 1}, {1, 3}};
    CHECK(determinant(a) == doctest::Approx(5.0));
    Vector x = solve(a, Vector{3, 5});
    CHECK(x[0] == doctest::Approx(0.8));
    CHECK(x[1] == doctest::Approx(1.4));
    CHECK(max_abs_diff(a * inverse(a), Matrix::identity(2)) < 1e-14);
    CHECK_THROWS_AS(solve(Matrix{{1, 2}, {2, 4}}, Vector{1, 1}), Error);
}

TEST_CASE("singular values: closed form, Jacobi, product equals |det|") {
    SplitMix64 rng(42);
    for (std::size_t m : {2u, 3u, 5u, 8u}) {
        for (int trial = 0; trial < 20; ++trial) {
            Matrix a = random_matrix(rng, m);
            Vector s = singular_values(a);
            REQUIRE(s.size() == m);
            double prod = 1;
            for (std::size_t i = 0; i < m; ++i) {
                prod *= s[i];
                if (i) CHECK(s[i] <= s[i - 1] + 1e-14);
            }
            CHECK(std::abs(prod - std::abs(determinant(a))) <= 1e-10 * std::max(1.0, prod));
            // Σ σ² = ‖A‖_F²
            double ss = 0;
            for (double v : s) ss += v * v;
            CHECK(ss == doctest::Approx(a.frobenius() * a.frobenius()).epsilon(1e-12));
        }
    }
    Vector s = singular_values(Matrix{{0, -1.0 / 3}, {1, 0}});
    CHECK(s[0] == doctest::Approx(1.0));
    CHECK(s[1] == doctest::Approx(1.0 / 3));
}

TEST_CASE("constructor rejects singular and mismatched maps") {
    CHECK_THROWS_AS(AffineMap(Matrix{{1, 2}, {2, 4}}, {0, 0}), Error);
    CHECK_THROWS_AS(AffineMap(Matrix{{1, 0}, {0, 1}}, {0, 0, 0}), Error);
    CHECK_NOTHROW(AffineMap::unchecked(Matrix{{1, 2}, {2, 4}}, {0, 0}));
    try {
        AffineMap(Matrix{{0, 0}, {0, 0}}, {0, 0});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Singular);
    }
}

TEST_CASE("composition applies inner first and is associative") {
    AffineMap f = fixtures::map2(0, -1.0 / 3, 1, 0, 0, 0);
    AffineMap g = fixtures::map2(2.0 / 3, 0, 0, 2.0 / 3, -1, 0);
    Vector z{0.3, -0.7};
    Vector fg = compose(f, g)(z);
    Vector expect = f(g(z));
    CHECK(fg[0] == doctest::Approx(expect[0]));
    CHECK(fg[1] == doctest::Approx(expect[1]));

    SplitMix64 rng(7);
    for (std::size_t m : {2u, 3u, 4u}) {
        for (int t = 0; t < 10; ++t) {
            AffineMap a = random_invertible(rng, m, 1), b = random_invertible(rng, m, 1), c = random_invertible(rng, m, 1);
            AffineMap l = compose(compose(a, b), c), r = compose(a, compose(b, c));
            CHECK(max_abs_diff(l.linear(), r.linear()) < 1e-12);
            for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(l.translation()[i] - r.translation()[i]) < 1e-12);
        }
    }
}

TEST_CASE("iterate matches repeated composition") {
    AffineMap f = fixtures::map2(0, .25, 2, 0, 0.1, -0.2);
    AffineMap f3 = iterate(f, 3);
    AffineMap manual = compose(f, compose(f, f));
    CHECK(max_abs_diff(f3.linear(), manual.linear()) < 1e-15);
    CHECK_THROWS_AS(iterate(f, 0), Error);
}

TEST_CASE("fixed point residual") {
    SplitMix64 rng(11);
    for (std::size_t m : {2u, 3u, 6u}) {
        for (int t = 0; t < 20; ++t) {
            AffineMap f = random_invertible(rng, m, 0.6);
            if (std::abs(determinant(Matrix::identity(m) - f.linear())) < 1e-6) continue;
            Vector z = fixed_point(f);
            Vector fz = f(z);
            CHECK(norm(fz - z) <= 1e-10 * (1 + norm(z)));
        }
    }
    // identity linear part with nonzero translation has no fixed point
    try {
        fixed_point(AffineMap(Matrix::identity(2), {1, 0}));
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoFixedPoint);
    }
}

TEST_CASE("similarity test") {
    SplitMix64 rng(3);
    for (std::size_t m : {2u, 3u, 5u}) {
        for (int t = 0; t < 10; ++t) {
            double r = 0.1 + 0.8 * rng.uniform();
            Matrix q = random_orthogonal(rng, m);
            auto res = similarity_test(r * q);
            REQUIRE(res.is_similarity);
            CHECK(*res.ratio == doctest::Approx(r).epsilon(1e-12));
            // AᵀA = ratio² I holds for every accepted map
            Matrix ata = (r * q).transpose() * (r * q);
            CHECK(max_abs_diff(ata, Matrix::scalar(m, *res.ratio * *res.ratio)) <= 1e-9 * std::max(1.0, r * r));
        }
    }
    CHECK_FALSE(similarity_test(Matrix{{0, -1.0 / 3}, {1, 0}}).is_similarity);
    CHECK_FALSE(similarity_test(Matrix{{.5, .1}, {0, .5}}).is_similarity);
    // reflection is a similarity
    auto refl = similarity_test(Matrix{{.8, 0}, {0, -.8}});
    CHECK(refl.is_similarity);
    CHECK(*refl.ratio == doctest::Approx(.8));
}

TEST_CASE("word enumeration order and count") {
    auto s = fixtures::ex2_2();
    std::vector<Word> seen;
    for_each_word(s.maps, 2, [&](const Word& w, const AffineMap& m) {
        seen.push_back(w);
        AffineMap direct = compose(s.maps[w[0]], s.maps[w[1]]);
        CHECK(max_abs_diff(direct.linear(), m.linear()) < 1e-15);
    });
    REQUIRE(seen.size() == 9);
    CHECK(seen.front() == Word{0, 0});
    CHECK(seen[1] == Word{0, 1});
    CHECK(seen.back() == Word{2, 2});
    CHECK(word_count(3, 4) == 81);
    CHECK(word_to_string(s.maps, Word{0, 1}) == "f2∘g2a");
    CHECK_THROWS_AS(for_each_word(s.maps, 13, [](const Word&, const AffineMap&) {}), Error);
}

TEST_CASE("system validation") {
    IfsSystem empty;
    CHECK_THROWS_AS(validate(empty), Error);
    IfsSystem mixed = fixtures::sys({fixtures::map2(.5, 0, 0, .5),
                                     AffineMap(Matrix::scalar(3, .5), {0, 0, 0})});
    CHECK_THROWS_AS(validate(mixed), Error);
    CHECK_NOTHROW(validate(fixtures::ex4_2()));
    IfsSystem bad_overlap = fixtures::ex4_3();
    bad_overlap.overlaps[0].indices = {2, 9};
    CHECK_THROWS_AS(validate(bad_overlap), Error);
}

}
