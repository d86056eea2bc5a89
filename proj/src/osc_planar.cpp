#include "ifsdim/osc_planar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ifsdim/error.hpp"

namespace ifsdim {

const char* to_string(OscCase c) {
    switch (c) {
        case OscCase::NEG_cI_POS_r: return "NEG_cI_POS_r";
        case OscCase::NEG_cI_NEG_r: return "NEG_cI_NEG_r";
        case OscCase::POS_cI_POS_r: return "POS_cI_POS_r";
        case OscCase::POS_cI_NEG_r: return "POS_cI_NEG_r";
    }
    return "?";
}

const char* to_string(Topology t) {
    switch (t) {
        case Topology::CONNECTED: return "CONNECTED";
        case Topology::TOTALLY_DISCONNECTED: return "TOTALLY_DISCONNECTED";
        case Topology::BOTTLENECK_BOTH: return "BOTTLENECK_BOTH";
        case Topology::INAPPLICABLE: return "INAPPLICABLE";
    }
    return "?";
}

namespace {

constexpr double kSumTol = 1e-9;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

PlanarClass classify_pair(const AffineMap& f, const AffineMap& g) {
    if (f.dim() != 2 || g.dim() != 2) throw Error(ErrorKind::NonPlanar, "needs two planar maps");
    try {
        return planar_classify(f, g);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotSimilarity) throw;
        throw HypothesisError("g_similarity", "hypotheses not met: g is not a similarity");
    }
}

Vector back_to_plane(const Vector& u, const Vector& w, double a, double b) {
    // P = [u; w], solve P x = (a, b)
    const double det = u[0] * w[1] - u[1] * w[0];
    return {(a * w[1] - b * u[1]) / det, (u[0] * b - w[0] * a) / det};
}

}  // namespace

OscCertificate certify_osc(const AffineMap& f, const AffineMap& g) {
    const PlanarClass pc = classify_pair(f, g);
    if (pc.s_form == SForm::AXIAL_REFLECTION)
        throw HypothesisError("S_axial_reflection",
                              "hypotheses not met: S is an axial reflection (scaled reflection across an "
                              "eigenvector); the parallelogram construction needs S = ±rI and the images overlap");
    if (pc.s_form == SForm::OTHER)
        throw HypothesisError("S_form", "hypotheses not met: similarity part of g is neither rI nor -rI");
    if (pc.a_square_form == ASquareForm::NEITHER)
        throw HypothesisError("A_square", "hypotheses not met: A^2 is neither cI nor -cI");
    if (pc.a_square_form == ASquareForm::MINUS_cI && pc.det_sign < 0)
        throw HypothesisError("det_sign", "hypotheses not met: A^2 = -cI requires det(A) > 0");
    if (pc.a_square_form == ASquareForm::PLUS_cI && pc.det_sign > 0)
        throw HypothesisError("det_sign", "hypotheses not met: A^2 = cI requires det(A) < 0");
    const double c = *pc.c, r = *pc.r;
    if (c + r > 1 + kSumTol)
        throw HypothesisError("c_plus_r", "hypotheses not met: c + r = " + fmt(c + r) + " exceeds 1");
    if (!pc.fixed_points_distinct)
        throw HypothesisError("fixed_points", "hypotheses not met: fixed points of f and g coincide");
    if (pc.collinear_degenerate)
        throw HypothesisError("collinear",
                              "hypotheses not met: z_f - z_g is an eigenvector of A, the attractor lies on a line");

    OscCertificate cert;
    cert.c = c;
    cert.r = r;
    const bool neg_c = pc.a_square_form == ASquareForm::MINUS_cI;
    const bool neg_r = pc.s_form == SForm::MINUS_rI;
    cert.case_tag = neg_c ? (neg_r ? OscCase::NEG_cI_NEG_r : OscCase::NEG_cI_POS_r)
                          : (neg_r ? OscCase::POS_cI_NEG_r : OscCase::POS_cI_POS_r);

    const Vector zf = fixed_point(f), zg = fixed_point(g);
    const Vector v = zf - zg;
    const Vector av = f.linear() * v;
    double mu = 0.0;
    if (cert.case_tag == OscCase::NEG_cI_NEG_r) {
        cert.lambda = c * (c - r) / (1 - c * r);
        mu = cert.lambda;
    } else if (!neg_c) {
        mu = c;
    }
    // u ⟂ (Av - μv), unit length, oriented along z_f - z_g
    const Vector d = {av[0] - mu * v[0], av[1] - mu * v[1]};
    const double dn = norm(d);
    if (dn <= 1e-12 * (norm(av) + norm(v)))
        throw HypothesisError("axis", "hypotheses not met: projection axis is undetermined");
    Vector u = {-d[1] / dn, d[0] / dn};
    if (dot(u, v) < 0) u = {-u[0], -u[1]};
    const Vector w = f.linear().transpose() * u;
    cert.axis_u = u;
    cert.axis_w = w;

    const double pf = dot(u, zf), pg = dot(u, zg), wf = dot(w, zf);
    double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
    switch (cert.case_tag) {
        case OscCase::NEG_cI_POS_r: {
            cert.k_offset = wf;
            a1 = pg;
            a2 = a1 + (1 + c) * (pf - pg);
            b1 = cert.k_offset - c * (a2 - pf);
            b2 = cert.k_offset - c * (a1 - pf);
            break;
        }
        case OscCase::NEG_cI_NEG_r: {
            const double lam = cert.lambda;
            cert.k_offset = wf - lam * pf;
            a2 = ((1 + c) * pf - c * (1 + r) * pg) / (1 - c * r);
            a1 = (1 + r) * pg - r * a2;
            b1 = -c * a2 + cert.k_offset + (lam + c) * pf;
            b2 = -c * a1 + cert.k_offset + (lam + c) * pf;
            break;
        }
        case OscCase::POS_cI_POS_r:
        case OscCase::POS_cI_NEG_r: {
            cert.k_offset = wf - c * pf;
            const double len = dot(u, v);
            a1 = neg_r ? pg - r * len : pg;
            a2 = pf;
            b1 = c * a1 + cert.k_offset;
            b2 = c * a2 + cert.k_offset;
            break;
        }
    }
    cert.alpha = {a1, a2};
    cert.beta = {b1, b2};
    cert.vertices = {back_to_plane(u, w, a1, b1), back_to_plane(u, w, a2, b1), back_to_plane(u, w, a2, b2),
                     back_to_plane(u, w, a1, b2)};

    const CertificateCheck check = verify_certificate(cert, f, g);
    cert.margins = check.margins;
    cert.verified = check.passed;
    if (!check.passed)
        throw HypothesisError("verification", "certificate failed verification: " + check.violated);
    return cert;
}

CertificateCheck verify_certificate(const OscCertificate& cert, const AffineMap& f, const AffineMap& g) {
    CertificateCheck out;
    const double len_a = cert.alpha[1] - cert.alpha[0], len_b = cert.beta[1] - cert.beta[0];
    const double tu = 1e-9 * std::abs(len_a), tw = 1e-9 * std::abs(len_b);
    auto add = [&](const std::string& name, double value, double tol) { out.margins.push_back({name, value, tol}); };

    const double pdet = cert.axis_u[0] * cert.axis_w[1] - cert.axis_u[1] * cert.axis_w[0];
    add("axes_independent", std::abs(pdet) - 1e-12, 0.0);
    add("alpha_ordered", len_a, 0.0);
    add("beta_ordered", len_b, 0.0);

    auto project = [&](const AffineMap& h, const Vector& axis) {
        Interval iv{INFINITY, -INFINITY};
        for (const Vector& vx : cert.vertices) {
            const double p = dot(axis, h(vx));
            iv.lo = std::min(iv.lo, p);
            iv.hi = std::max(iv.hi, p);
        }
        return iv;
    };
    out.f_u = project(f, cert.axis_u);
    out.g_u = project(g, cert.axis_u);
    out.f_w = project(f, cert.axis_w);
    out.g_w = project(g, cert.axis_w);

    add("f_u_lower", out.f_u.lo - cert.alpha[0], tu);
    add("f_u_upper", cert.alpha[1] - out.f_u.hi, tu);
    add("g_u_lower", out.g_u.lo - cert.alpha[0], tu);
    add("g_u_upper", cert.alpha[1] - out.g_u.hi, tu);
    add("f_w_lower", out.f_w.lo - cert.beta[0], tw);
    add("f_w_upper", cert.beta[1] - out.f_w.hi, tw);
    add("g_w_lower", out.g_w.lo - cert.beta[0], tw);
    add("g_w_upper", cert.beta[1] - out.g_w.hi, tw);
    add("u_disjoint", std::max(out.g_u.lo - out.f_u.hi, out.f_u.lo - out.g_u.hi), tu);

    out.passed = true;
    for (const Margin& m : out.margins)
        if (!m.ok()) {
            out.passed = false;
            out.violated = m.name + " (margin " + fmt(m.value) + ")";
            break;
        }
    return out;
}

TopologyVerdict classify_topology(const AffineMap& f, const AffineMap& g) {
    const PlanarClass pc = classify_pair(f, g);
    TopologyVerdict tv;
    tv.r = *pc.r;
    tv.c = std::abs(determinant(f.linear()));
    tv.sum_cr = tv.c + tv.r;
    if (pc.s_form == SForm::AXIAL_REFLECTION) {
        tv.verdict = Topology::INAPPLICABLE;
        tv.reason = "S is an axial reflection: the c + r trichotomy covers S = ±rI only, and c + r >= 1 does "
                    "not guarantee connectedness for reflections";
        return tv;
    }
    if (pc.s_form == SForm::OTHER)
        throw HypothesisError("S_form", "hypotheses not met: similarity part of g is neither rI nor -rI");
    if (pc.a_square_form == ASquareForm::NEITHER)
        throw HypothesisError("A_square", "hypotheses not met: A^2 is neither cI nor -cI");
    if (!pc.fixed_points_distinct)
        throw HypothesisError("fixed_points", "hypotheses not met: fixed points of f and g coincide");

    if (std::abs(tv.sum_cr - 1) <= kSumTol) {
        tv.verdict = Topology::BOTTLENECK_BOTH;
        tv.reason = "c + r = 1: open set condition and connectedness hold together";
    } else if (tv.sum_cr > 1) {
        tv.verdict = Topology::CONNECTED;
        tv.reason = "c + r > 1: attractor connected";
    } else {
        tv.verdict = Topology::TOTALLY_DISCONNECTED;
        tv.reason = "c + r < 1: attractor totally disconnected";
    }
    return tv;
}

Interval invariant_interval_1d(OscCase case_tag, double c, double r) {
    if (!(c > 0 && c < 1 && r > 0 && r < 1))
        throw Error(ErrorKind::InvalidArgument, "c and r must lie in (0,1)");
    if (c + r < 1 - 1e-12)
        throw HypothesisError("c_plus_r", "coverage fails: c + r = " + fmt(c + r) + " < 1 leaves a gap");
    const bool neg_c = case_tag == OscCase::NEG_cI_POS_r || case_tag == OscCase::NEG_cI_NEG_r;
    const bool neg_r = case_tag == OscCase::POS_cI_NEG_r || case_tag == OscCase::NEG_cI_NEG_r;
    Interval h;
    if (!neg_c && !neg_r)
        h = {0.0, 1.0};
    else if (!neg_c)
        h = {0.0, 1.0 + r};
    else if (!neg_r)
        h = {-c, 1.0};
    else
        h = {-c * (1 + r) / (1 - r * c), (1 + r) / (1 - r * c)};

    auto image = [](double a, double b, Interval iv) {
        const double e0 = a * iv.lo + b, e1 = a * iv.hi + b;
        return Interval{std::min(e0, e1), std::max(e0, e1)};
    };
    const double sc = neg_c ? -c : c, sr = neg_r ? -r : r;
    Interval fi = image(sc, 0.0, h), gi = image(sr, 1.0 - sr, h);
    if (fi.lo > gi.lo) std::swap(fi, gi);
    const double tol = 1e-12 * (h.hi - h.lo);
    const double reach = std::max(fi.hi, gi.hi);
    const bool covers = fi.lo <= h.lo + tol && gi.lo <= fi.hi + tol && reach >= h.hi - tol;
    const bool inside = fi.lo >= h.lo - tol && reach <= h.hi + tol;
    if (!covers || !inside)
        throw HypothesisError("coverage", "coverage check failed for H = [" + fmt(h.lo) + ", " + fmt(h.hi) + "]");
    return h;
}

}  // namespace ifsdim
