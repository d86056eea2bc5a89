#include "ifsdim/report.hpp"

namespace ifsdim {

namespace {

Json vec(const Vector& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

Json margins(const std::vector<Margin>& ms) {
    Json a = Json::array();
    for (const Margin& m : ms) a.push_back({{"name", m.name}, {"margin", m.value}, {"ok", m.ok()}});
    return a;
}

Json interval(const Interval& i) { return Json::array({i.lo, i.hi}); }

constexpr std::size_t kMaxListedWords = 64;

}  // namespace

Json to_json(const ClassificationReport& rep, const IfsSystem& system) {
    Json j;
    j["family"] = to_string(rep.family);
    j["ambient_dim"] = rep.ambient_dim;

    Json gn = Json::array();
    for (const GnOrder& g : rep.gn_orders) {
        Json e;
        e["map"] = g.map_index;
        e["label"] = system.maps[g.map_index].label();
        e["order_n"] = g.order_n ? Json(*g.order_n) : Json("none up to n_max");
        e["ratio_c"] = g.ratio_c ? Json(*g.ratio_c) : Json(nullptr);
        e["strict"] = g.strict;
        gn.push_back(e);
    }
    j["gn_orders"] = gn;

    Json al = Json::array();
    for (const AlignmentPair& p : rep.alignment.pairs)
        al.push_back({{"similarity", p.similarity_index},
                      {"affine", p.affine_index},
                      {"commutator_norm", p.commutator_norm},
                      {"aligned", p.aligned}});
    j["alignment"] = al;

    if (rep.k_uniform) {
        Json ku;
        ku["k"] = rep.k_uniform->k;
        ku["word_count"] = rep.k_uniform->ratios.size();
        Json words = Json::array();
        for (std::size_t i = 0; i < rep.k_uniform->ratios.size() && i < kMaxListedWords; ++i) {
            const WordRatio& w = rep.k_uniform->ratios[i];
            words.push_back({{"word", word_to_string(system.maps, w.word)}, {"ratio", w.ratio}});
        }
        ku["ratios"] = words;
        j["k_uniform"] = ku;
    } else {
        j["k_uniform"] = nullptr;
    }

    if (rep.planar) {
        const PlanarClass& p = *rep.planar;
        Json pj;
        pj["f"] = p.f_index;
        pj["g"] = p.g_index;
        pj["a_square_form"] = to_string(p.a_square_form);
        pj["c"] = p.c ? Json(*p.c) : Json(nullptr);
        pj["det_sign"] = p.det_sign < 0 ? "-" : "+";
        pj["s_form"] = to_string(p.s_form);
        pj["r"] = p.r ? Json(*p.r) : Json(nullptr);
        pj["fixed_points_distinct"] = p.fixed_points_distinct;
        pj["collinear_degenerate"] = p.collinear_degenerate;
        j["planar"] = pj;
    } else {
        j["planar"] = nullptr;
    }

    const FamilyParameters& fp = rep.parameters;
    Json pj;
    pj["order"] = fp.order;
    pj["iterate_maps"] = fp.iterate_maps;
    pj["iterate_ratios"] = fp.iterate_ratios.size() <= kMaxListedWords ? Json(fp.iterate_ratios)
                                                                        : Json(fp.iterate_ratios.size());
    pj["similarity_maps"] = fp.similarity_maps;
    pj["similarity_ratios"] = fp.similarity_ratios;
    j["parameters"] = pj;
    j["guard_notes"] = rep.guard_notes;
    return j;
}

Json to_json(const DimensionEquation& eq) {
    Json j;
    j["text"] = equation_text(eq);
    Json terms = Json::array();
    for (const Term& t : eq.terms) terms.push_back({{"weight", t.weight}, {"base", t.base}});
    j["terms"] = terms;
    j["target"] = eq.target;
    j["provenance"] = eq.provenance;
    return j;
}

Json to_json(const DimensionResult& r) {
    return {{"s", r.s},
            {"residual", r.residual},
            {"bracket", Json::array({r.lo, r.hi})},
            {"iterations", r.iterations},
            {"uniqueness_note", r.uniqueness_note}};
}

Json to_json(const ClosedForm& cf) {
    Json poly = Json::array();
    for (auto [e, c] : cf.poly) poly.push_back({{"exponent", e}, {"coefficient", c}});
    Json j;
    j["substitution"] = "u = " + std::to_string(cf.ref_base) + "^(s/" + std::to_string(cf.denominator) + ")";
    j["ref_base"] = cf.ref_base;
    j["denominator"] = cf.denominator;
    j["polynomial"] = cf.polynomial;
    j["coefficients"] = poly;
    j["radical"] = cf.radical ? Json(*cf.radical) : Json(nullptr);
    j["u"] = cf.u;
    j["s"] = cf.s;
    return j;
}

Json to_json(const OscCertificate& cert) {
    Json v = Json::array();
    for (const Vector& x : cert.vertices) v.push_back(vec(x));
    Json j;
    j["case_tag"] = to_string(cert.case_tag);
    j["c"] = cert.c;
    j["r"] = cert.r;
    j["axis_u"] = vec(cert.axis_u);
    j["axis_w"] = vec(cert.axis_w);
    j["lambda"] = cert.lambda;
    j["k_offset"] = cert.k_offset;
    j["alpha"] = Json::array({cert.alpha[0], cert.alpha[1]});
    j["beta"] = Json::array({cert.beta[0], cert.beta[1]});
    j["vertices"] = v;
    j["verified"] = cert.verified;
    j["margins"] = margins(cert.margins);
    return j;
}

Json to_json(const CertificateCheck& check) {
    Json j;
    j["passed"] = check.passed;
    j["violated"] = check.violated;
    j["f_u"] = interval(check.f_u);
    j["g_u"] = interval(check.g_u);
    j["f_w"] = interval(check.f_w);
    j["g_w"] = interval(check.g_w);
    j["margins"] = margins(check.margins);
    return j;
}

Json to_json(const TopologyVerdict& tv) {
    return {{"c", tv.c}, {"r", tv.r}, {"sum_cr", tv.sum_cr}, {"verdict", to_string(tv.verdict)}, {"reason", tv.reason}};
}

Json to_json(const ConnectivityReport& cr) {
    return {{"grid_resolution", cr.grid_resolution},
            {"component_count", cr.component_count},
            {"largest_component_fraction", cr.largest_component_fraction},
            {"occupied_pixels", cr.occupied_pixels}};
}

Json to_json(const BoxCountCurve& curve) {
    return {{"slope", curve.slope},
            {"r_squared", curve.r_squared},
            {"fit_range", Json::array({curve.fit_range.first, curve.fit_range.second})},
            {"scales", curve.scales},
            {"counts", curve.counts}};
}

}  // namespace ifsdim
