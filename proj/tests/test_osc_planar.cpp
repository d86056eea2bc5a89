#include <doctest.h>

#include <array>
#include <cmath>
#include <string>

#include "ifsdim/error.hpp"
#include "ifsdim/osc_planar.hpp"
#include "systems.hpp"

using namespace ifsdim;

namespace {

using V2 = std::array<double, 2>;

void check_vertices(const OscCertificate& cert, const std::array<V2, 4>& want) {
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::abs(cert.vertices[i][0] - want[i][0]) <= 1e-9);
        CHECK(std::abs(cert.vertices[i][1] - want[i][1]) <= 1e-9);
    }
}

std::string clause_of(const AffineMap& f, const AffineMap& g) {
    try {
        certify_osc(f, g);
    } catch (const HypothesisError& e) {
        return e.clause();
    }
    return {};
}

// x -> f(x - t) + t
AffineMap shifted(const AffineMap& f, const Vector& t) {
    return AffineMap(f.linear(), f.translation() + t - f.linear() * t);
}

double length(const Interval& i) { return i.hi - i.lo; }

}  // namespace

TEST_SUITE("osc_planar") {

TEST_CASE("certificate vertices of the worked examples") {
    auto e1 = fixtures::ex6_1();
    OscCertificate c1 = certify_osc(e1.maps[0], e1.maps[1]);
    CHECK(c1.case_tag == OscCase::NEG_cI_POS_r);
    CHECK(c1.verified);
    check_vertices(c1, {{{1.9, 0.1}, {-1.1, -1.4}, {-0.8, 1.3}, {2.2, 2.8}}});

    auto e2 = fixtures::ex6_2();
    OscCertificate c2 = certify_osc(e2.maps[0], e2.maps[1]);
    CHECK(c2.case_tag == OscCase::NEG_cI_NEG_r);
    check_vertices(c2, {{{28.0 / 23, -2.0 / 23}, {-12.0 / 23, -32.0 / 23}, {-25.0 / 23, 10.0 / 23},
                         {15.0 / 23, 40.0 / 23}}});

    auto e3 = fixtures::ex6_3();
    OscCertificate c3 = certify_osc(e3.maps[0], e3.maps[1]);
    CHECK(c3.case_tag == OscCase::POS_cI_POS_r);
    check_vertices(c3, {{{4, 8}, {68.0 / 15, -56.0 / 15}, {0, 0}, {-8.0 / 15, 176.0 / 15}}});

    auto e4 = fixtures::ex6_4();
    OscCertificate c4 = certify_osc(e4.maps[0], e4.maps[1]);
    CHECK(c4.case_tag == OscCase::POS_cI_NEG_r);
    check_vertices(c4, {{{1.75, 1.75}, {1.75, 0}, {0, 0}, {0, 1.75}}});
}

TEST_CASE("certificate structure") {
    for (const IfsSystem& s : {fixtures::ex6_1(), fixtures::ex6_2(), fixtures::ex6_3(), fixtures::ex6_4()}) {
        const OscCertificate c = certify_osc(s.maps[0], s.maps[1]);
        CHECK(c.alpha[0] < c.alpha[1]);
        CHECK(c.beta[0] < c.beta[1]);
        CHECK(std::abs(c.axis_u[0] * c.axis_w[1] - c.axis_u[1] * c.axis_w[0]) > 1e-9);
        // P · vertex reproduces the (α, β) corners
        const std::array<std::array<double, 2>, 4> corners{
            {{c.alpha[0], c.beta[0]}, {c.alpha[1], c.beta[0]}, {c.alpha[1], c.beta[1]}, {c.alpha[0], c.beta[1]}}};
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(std::abs(dot(c.axis_u, c.vertices[i]) - corners[i][0]) <= 1e-9);
            CHECK(std::abs(dot(c.axis_w, c.vertices[i]) - corners[i][1]) <= 1e-9);
        }
        for (const Margin& m : c.margins) CHECK(m.ok());
    }
}

TEST_CASE("projected image lengths and touching at c + r = 1") {
    for (const IfsSystem& s : {fixtures::ex6_1(), fixtures::ex6_2(), fixtures::ex6_3(), fixtures::ex6_4()}) {
        const OscCertificate c = certify_osc(s.maps[0], s.maps[1]);
        const CertificateCheck chk = verify_certificate(c, s.maps[0], s.maps[1]);
        REQUIRE(chk.passed);
        const double L = c.alpha[1] - c.alpha[0];
        CHECK(std::abs(length(chk.f_u) - c.c * L) <= 1e-9 * c.c * L);
        CHECK(std::abs(length(chk.g_u) - c.r * L) <= 1e-9 * c.r * L);
        // touching closures: one shared endpoint, zero gap
        const double gap = std::max(chk.f_u.lo, chk.g_u.lo) - std::min(chk.f_u.hi, chk.g_u.hi);
        CHECK(std::abs(gap) <= 1e-9 * L);
    }
}

TEST_CASE("gap of (1 - c - r) L below the critical line") {
    // ex6_1 with the similarity shrunk from 1/2 to 0.3
    AffineMap f = fixtures::map2(.4, -.6, 1.1, -.4, 0, 0);
    AffineMap g = fixtures::map2(.3, 0, 0, .3, 1, .5);
    const OscCertificate c = certify_osc(f, g);
    const CertificateCheck chk = verify_certificate(c, f, g);
    REQUIRE(chk.passed);
    const double L = c.alpha[1] - c.alpha[0];
    const double gap = std::max(chk.f_u.lo, chk.g_u.lo) - std::min(chk.f_u.hi, chk.g_u.hi);
    CHECK(std::abs(gap - (1 - c.c - c.r) * L) <= 1e-9 * L);
}

TEST_CASE("translation covariance") {
    const Vector t{0.37, -1.25};
    for (const IfsSystem& s : {fixtures::ex6_1(), fixtures::ex6_2(), fixtures::ex6_3(), fixtures::ex6_4()}) {
        const OscCertificate a = certify_osc(s.maps[0], s.maps[1]);
        const OscCertificate b = certify_osc(shifted(s.maps[0], t), shifted(s.maps[1], t));
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(std::abs(b.vertices[i][0] - a.vertices[i][0] - t[0]) <= 1e-9);
            CHECK(std::abs(b.vertices[i][1] - a.vertices[i][1] - t[1]) <= 1e-9);
        }
        CHECK(std::abs((b.alpha[1] - b.alpha[0]) - (a.alpha[1] - a.alpha[0])) <= 1e-9);
        CHECK(std::abs((b.beta[1] - b.beta[0]) - (a.beta[1] - a.beta[0])) <= 1e-9);
    }
}

TEST_CASE("perturbed certificate fails verification") {
    for (const IfsSystem& s : {fixtures::ex6_1(), fixtures::ex6_3(), fixtures::ex6_4()}) {
        OscCertificate c = certify_osc(s.maps[0], s.maps[1]);
        // shrink α₂ by 10% of the width and rebuild the vertices from (u, w)
        c.alpha[1] -= 0.1 * (c.alpha[1] - c.alpha[0]);
        const Matrix p{{c.axis_u[0], c.axis_u[1]}, {c.axis_w[0], c.axis_w[1]}};
        const std::array<std::array<double, 2>, 4> corners{
            {{c.alpha[0], c.beta[0]}, {c.alpha[1], c.beta[0]}, {c.alpha[1], c.beta[1]}, {c.alpha[0], c.beta[1]}}};
        for (std::size_t i = 0; i < 4; ++i) c.vertices[i] = solve(p, Vector{corners[i][0], corners[i][1]});
        const CertificateCheck chk = verify_certificate(c, s.maps[0], s.maps[1]);
        CHECK_FALSE(chk.passed);
        CHECK_FALSE(chk.violated.empty());
    }
}

TEST_CASE("axial reflections are rejected") {
    for (const IfsSystem& s : {fixtures::ex6_5(), fixtures::ex6_6()}) {
        CHECK(clause_of(s.maps[0], s.maps[1]) == "S_axial_reflection");
        try {
            certify_osc(s.maps[0], s.maps[1]);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::HypothesisNotMet);
        }
    }
}

TEST_CASE("hypothesis clauses") {
    AffineMap a61 = fixtures::map2(.4, -.6, 1.1, -.4);
    // g not a similarity
    CHECK(clause_of(a61, fixtures::map2(.5, .1, 0, .5, 1, 0)) == "g_similarity");
    // S a rotation by 90°: neither ±rI nor a reflection
    CHECK(clause_of(a61, fixtures::map2(0, -.5, .5, 0, 1, 0)) == "S_form");
    // A² not scalar
    CHECK(clause_of(fixtures::map2(.5, .1, 0, .3), fixtures::map2(.5, 0, 0, .5, 1, 0)) == "A_square");
    // c + r > 1
    CHECK(clause_of(a61, fixtures::map2(.7, 0, 0, .7, 1, 0)) == "c_plus_r");
    // common fixed point
    CHECK(clause_of(a61, fixtures::map2(.5, 0, 0, .5, 0, 0)) == "fixed_points");
    // A = √c I (det > 0) is outside the A² = cI case
    CHECK(clause_of(fixtures::map2(.5, 0, 0, .5), fixtures::map2(.5, 0, 0, .5, 1, 0)) == "det_sign");
}

TEST_CASE("topology verdicts") {
    for (const IfsSystem& s : fixtures::sec6_1_variants()) {
        TopologyVerdict v = classify_topology(s.maps[0], s.maps[1]);
        CHECK(v.verdict == Topology::BOTTLENECK_BOTH);
        CHECK(v.sum_cr == doctest::Approx(1.0));
    }
    auto d = fixtures::dust();
    CHECK(classify_topology(d.maps[0], d.maps[1]).verdict == Topology::TOTALLY_DISCONNECTED);
    auto e67 = fixtures::ex6_7();
    TopologyVerdict v67 = classify_topology(e67.maps[0], e67.maps[1]);
    CHECK(v67.verdict == Topology::INAPPLICABLE);
    CHECK(v67.c == doctest::Approx(2.0 / 3));
    CHECK(v67.r == doctest::Approx(0.5));
    CHECK_FALSE(v67.reason.empty());
    // c + r > 1
    auto big = fixtures::sys({fixtures::map2(0, .5, 1, 0), fixtures::map2(.7, 0, 0, .7, 1, 0)});
    CHECK(classify_topology(big.maps[0], big.maps[1]).verdict == Topology::CONNECTED);
}

TEST_CASE("invariant interval of the 1D model") {
    Interval h = invariant_interval_1d(OscCase::POS_cI_POS_r, .5, .5);
    CHECK(h.lo == doctest::Approx(0.0));
    CHECK(h.hi == doctest::Approx(1.0));

    const double c = .8, r = .2;
    Interval h2 = invariant_interval_1d(OscCase::NEG_cI_NEG_r, c, r);
    CHECK(h2.lo == doctest::Approx(-0.8 * 1.2 / 0.84));
    CHECK(h2.hi == doctest::Approx(1.2 / 0.84));
    // H = f~(H) ∪ g~(H) with f~(t) = -ct, g~(t) = -rt + 1 + r
    const double f_lo = -c * h2.hi, f_hi = -c * h2.lo;
    const double g_lo = -r * h2.hi + 1 + r, g_hi = -r * h2.lo + 1 + r;
    CHECK(f_lo == doctest::Approx(h2.lo));
    CHECK(g_hi == doctest::Approx(h2.hi));
    CHECK(g_lo <= f_hi + 1e-12);

    for (OscCase k : {OscCase::NEG_cI_POS_r, OscCase::POS_cI_NEG_r}) CHECK_NOTHROW(invariant_interval_1d(k, .25, .75));
    try {
        invariant_interval_1d(OscCase::POS_cI_POS_r, .3, .3);
        FAIL("expected throw");
    } catch (const HypothesisError& e) {
        CHECK(e.clause() == "c_plus_r");
    }
    CHECK_THROWS_AS(invariant_interval_1d(OscCase::POS_cI_POS_r, 1.5, .3), Error);
}

}
