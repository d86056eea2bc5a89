#include "ifsdim/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ifsdim/error.hpp"

namespace ifsdim {

const char* to_string(Family f) {
    switch (f) {
        case Family::ALIGNED_GN: return "ALIGNED_GN";
        case Family::K_ITERATE: return "K_ITERATE";
        case Family::HYBRID: return "HYBRID";
        case Family::OVERLAP_DECLARED: return "OVERLAP_DECLARED";
        case Family::PLANAR_TWO_MAP: return "PLANAR_TWO_MAP";
        case Family::UNCLASSIFIED: return "UNCLASSIFIED";
    }
    return "?";
}

std::optional<Family> family_from_string(const std::string& s) {
    for (Family f : {Family::ALIGNED_GN, Family::K_ITERATE, Family::HYBRID, Family::OVERLAP_DECLARED,
                     Family::PLANAR_TWO_MAP, Family::UNCLASSIFIED})
        if (s == to_string(f)) return f;
    return std::nullopt;
}

const char* to_string(ASquareForm f) {
    switch (f) {
        case ASquareForm::PLUS_cI: return "PLUS_cI";
        case ASquareForm::MINUS_cI: return "MINUS_cI";
        case ASquareForm::NEITHER: return "NEITHER";
    }
    return "?";
}

const char* to_string(SForm f) {
    switch (f) {
        case SForm::PLUS_rI: return "PLUS_rI";
        case SForm::MINUS_rI: return "MINUS_rI";
        case SForm::AXIAL_REFLECTION: return "AXIAL_REFLECTION";
        case SForm::OTHER: return "OTHER";
    }
    return "?";
}

bool AlignmentReport::all_aligned() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const AlignmentPair& p) { return p.aligned; });
}

GnOrder gn_order(const AffineMap& f, int n_max, double tol) {
    if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
    GnOrder g;
    bool smaller_similarity = false;
    Matrix p = f.linear();
    for (int n = 1; n <= n_max; ++n) {
        if (n > 1) p = f.linear() * p;
        const SimilarityTestResult st = similarity_test(p, tol);
        if (st.is_similarity && *st.ratio < 1.0) {
            g.order_n = n;
            g.ratio_c = st.ratio;
            g.strict = !smaller_similarity;
            return g;
        }
        smaller_similarity = smaller_similarity || st.is_similarity;
    }
    return g;
}

std::pair<bool, double> is_f_aligned(const AffineMap& g, const AffineMap& f, double tol) {
    if (g.dim() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "alignment of maps of different dimension");
    if (!similarity_test(g).is_similarity)
        throw Error(ErrorKind::NotSimilarity, "g not a similarity: alignment is defined for similarities only");
    const Matrix& s = g.linear();
    const Matrix ata = f.linear().transpose() * f.linear();
    const double comm = (s * ata - ata * s).frobenius();
    return {comm <= tol * ata.frobenius(), comm};
}

namespace {
struct StopEnumeration {};
}  // namespace

UniformKResult uniform_k_similarity(std::span<const AffineMap> maps, int k, double tol) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    UniformKResult out;
    std::vector<WordRatio> ratios;
    try {
        for_each_word(maps, k, [&](const Word& w, const AffineMap& h) {
            const SimilarityTestResult st = similarity_test(h.linear(), tol);
            if (!st.is_similarity || *st.ratio >= 1.0) {
                out.first_failure = w;
                throw StopEnumeration{};
            }
            ratios.push_back({w, *st.ratio});
        });
    } catch (const StopEnumeration&) {
        return out;
    }
    out.ratios = std::move(ratios);
    return out;
}

PlanarClass planar_classify(const AffineMap& f, const AffineMap& g, double tol) {
    if (f.dim() != 2 || g.dim() != 2) throw Error(ErrorKind::NonPlanar, "planar classification needs 2D maps");
    const SimilarityTestResult gs = similarity_test(g);
    if (!gs.is_similarity) throw Error(ErrorKind::NotSimilarity, "g not a similarity");

    PlanarClass pc;
    const Matrix& a = f.linear();
    const double det = determinant(a);
    const double c = std::abs(det);
    const Matrix a2 = a * a;
    const double scale = std::max(1.0, c);
    pc.det_sign = det < 0 ? -1 : 1;
    if ((a2 - Matrix::scalar(2, c)).frobenius() <= tol * scale)
        pc.a_square_form = ASquareForm::PLUS_cI;
    else if ((a2 + Matrix::scalar(2, c)).frobenius() <= tol * scale)
        pc.a_square_form = ASquareForm::MINUS_cI;
    if (pc.a_square_form != ASquareForm::NEITHER) pc.c = c;

    const Matrix& s = g.linear();
    const double r = *gs.ratio;
    pc.r = r;
    const double rs = std::max(1.0, r);
    if ((s - Matrix::scalar(2, r)).frobenius() <= tol * rs)
        pc.s_form = SForm::PLUS_rI;
    else if ((s + Matrix::scalar(2, r)).frobenius() <= tol * rs)
        pc.s_form = SForm::MINUS_rI;
    else if ((s - s.transpose()).frobenius() <= tol * rs &&
             (s * s - Matrix::scalar(2, r * r)).frobenius() <= tol * rs * rs && std::abs(s.trace()) <= tol * rs)
        pc.s_form = SForm::AXIAL_REFLECTION;

    try {
        const Vector zf = fixed_point(f), zg = fixed_point(g);
        const Vector v = zf - zg;
        pc.fixed_points_distinct = norm(v) > 1e-12 * (1 + norm(zf) + norm(zg));
        if (pc.fixed_points_distinct && pc.a_square_form == ASquareForm::PLUS_cI) {
            const Vector av = a * v;
            pc.collinear_degenerate = std::abs(v[0] * av[1] - v[1] * av[0]) <= 1e-10 * norm(v) * norm(av);
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoFixedPoint) throw;
        pc.fixed_points_distinct = false;
    }
    return pc;
}

namespace {

// Hull of the attractor of a 1D IFS t -> a t + b, by iterating the hull map.
Interval hull_fixed_point(const std::vector<std::pair<double, double>>& maps, Interval j) {
    for (int it = 0; it < 100000; ++it) {
        Interval next{INFINITY, -INFINITY};
        for (auto [a, b] : maps) {
            const double e0 = a * j.lo + b, e1 = a * j.hi + b;
            next.lo = std::min({next.lo, e0, e1});
            next.hi = std::max({next.hi, e0, e1});
        }
        const double change = std::max(std::abs(next.lo - j.lo), std::abs(next.hi - j.hi));
        j = next;
        if (change <= 1e-15 * (1 + std::abs(j.lo) + std::abs(j.hi))) break;
    }
    return j;
}

bool images_cover(const std::vector<std::pair<double, double>>& maps, Interval j, double tol) {
    std::vector<Interval> imgs;
    for (auto [a, b] : maps) {
        const double e0 = a * j.lo + b, e1 = a * j.hi + b;
        imgs.push_back({std::min(e0, e1), std::max(e0, e1)});
    }
    std::sort(imgs.begin(), imgs.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    if (imgs.front().lo > j.lo + tol) return false;
    double reach = imgs.front().hi;
    for (std::size_t i = 1; i < imgs.size(); ++i) {
        if (imgs[i].lo > reach + tol) return false;
        reach = std::max(reach, imgs[i].hi);
    }
    return reach >= j.hi - tol;
}

}  // namespace

std::optional<DecoupledBound> decoupled_projection_bound(const IfsSystem& system, int max_word_len) {
    if (system.dim() != 2) throw Error(ErrorKind::NonPlanar, "decoupled projection search needs a planar system");
    if (max_word_len < 1 || max_word_len > 3)
        throw Error(ErrorKind::InvalidArgument, "max_word_len must be in 1..3");

    // shortest word length wins; within it the widest verified interval
    std::optional<DecoupledBound> best;
    for (int len = 1; len <= max_word_len && !best; ++len) {
        std::vector<Word> words[2];
        std::vector<std::pair<double, double>> maps1d[2];
        for_each_word(system.maps, len, [&](const Word& w, const AffineMap& h) {
            const Matrix& a = h.linear();
            const double scale = std::max(1.0, a.frobenius());
            for (std::size_t axis = 0; axis < 2; ++axis) {
                const std::size_t other = 1 - axis;
                if (std::abs(a(axis, other)) <= 1e-12 * scale && std::abs(a(axis, axis)) < 1.0) {
                    words[axis].push_back(w);
                    maps1d[axis].push_back({a(axis, axis), h.translation()[axis]});
                }
            }
        });
        for (std::size_t axis = 0; axis < 2; ++axis) {
            const std::size_t n = words[axis].size();
            // subsets of size 2..4 in lexicographic order
            for (std::size_t size = 2; size <= std::min<std::size_t>(4, n); ++size) {
                std::vector<std::size_t> pick(size);
                for (std::size_t i = 0; i < size; ++i) pick[i] = i;
                while (true) {
                    std::vector<std::pair<double, double>> sub;
                    double sum_a = 0;
                    for (std::size_t i : pick) {
                        sub.push_back(maps1d[axis][i]);
                        sum_a += std::abs(maps1d[axis][i].first);
                    }
                    if (sum_a >= 1.0 - 1e-12) {
                        const Interval j = hull_fixed_point(sub, {-100, 100});
                        const double len_j = j.hi - j.lo;
                        const bool longer = !best || len_j > best->interval.hi - best->interval.lo + 1e-12;
                        if (len_j > 1e-9 && longer && images_cover(sub, j, 1e-9 * len_j)) {
                            best.emplace();
                            best->axis = axis;
                            best->interval = j;
                            best->word_length = len;
                            for (std::size_t i : pick) best->words.push_back(words[axis][i]);
                            best->maps_1d = sub;
                        }
                    }
                    std::size_t t = size;
                    while (t > 0 && pick[t - 1] == n - size + t - 1) --t;
                    if (t == 0) break;
                    ++pick[t - 1];
                    for (std::size_t i = t; i < size; ++i) pick[i] = pick[i - 1] + 1;
                }
            }
        }
    }
    return best;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string name_of(const IfsSystem& s, std::size_t i) {
    const std::string& l = s.maps[i].label();
    return "map " + std::to_string(i) + (l.empty() ? "" : " '" + l + "'");
}

struct Candidate {
    Family family;
    FamilyParameters params;
    std::optional<KUniform> k_uniform;
    std::string summary;
};

struct Context {
    const IfsSystem& sys;
    const ClassifierOptions& opt;
    const ClassificationReport& rep;
    std::vector<std::size_t> sims, nonsims;
    std::vector<double> sim_ratio;  // by map index, 0 when not a similarity contraction
};

// Search k = 1..k_max for a uniform length-k similarity over `maps`.
std::optional<KUniform> find_uniform(std::span<const AffineMap> maps, int k_max, double tol,
                                     std::string& failure) {
    for (int k = 1; k <= k_max; ++k) {
        if (word_count(maps.size(), k) > kMaxWords) {
            failure += "; k=" + std::to_string(k) + " exceeds the 10^6 word cap";
            break;
        }
        UniformKResult u = uniform_k_similarity(maps, k, tol);
        if (u.ratios) return KUniform{k, std::move(*u.ratios)};
        if (k == 1) failure = "first failing word at k=1: " + word_to_string(maps, *u.first_failure);
    }
    return std::nullopt;
}

// c_i = ratio of the constant word (i,...,i), i.e. of f_i^k
void per_map_ratios(const KUniform& ku, FamilyParameters& p) {
    p.order = ku.k;
    for (const WordRatio& wr : ku.ratios)
        if (std::all_of(wr.word.begin(), wr.word.end(), [&](std::size_t j) { return j == wr.word[0]; })) {
            p.iterate_maps.push_back(wr.word[0]);
            p.iterate_ratios.push_back(wr.ratio);
        }
}

std::optional<Candidate> try_overlap(const Context& cx, std::vector<std::string>& notes) {
    if (cx.sys.overlaps.empty()) {
        notes.push_back("OVERLAP_DECLARED: no overlaps declared");
        return std::nullopt;
    }
    std::string failure;
    auto ku = find_uniform(cx.sys.maps, cx.opt.k_max, cx.opt.similarity_tol, failure);
    if (!ku) {
        notes.push_back("OVERLAP_DECLARED: declared overlaps need every length-k composition to be a similarity "
                        "contraction for some k <= " +
                        std::to_string(cx.opt.k_max) + " (" + failure + ")");
        return std::nullopt;
    }
    Candidate c{Family::OVERLAP_DECLARED, {}, ku, ""};
    per_map_ratios(*ku, c.params);
    c.summary = "k=" + std::to_string(ku->k) + ", " + std::to_string(cx.sys.overlaps.size()) + " overlap(s)";
    return c;
}

std::optional<Candidate> try_aligned(const Context& cx, std::vector<std::string>& notes) {
    if (cx.nonsims.size() > 1) {
        notes.push_back("ALIGNED_GN: " + std::to_string(cx.nonsims.size()) +
                        " maps are not similarity contractions (at most one allowed)");
        return std::nullopt;
    }
    Candidate c{Family::ALIGNED_GN, {}, std::nullopt, ""};
    std::size_t f;
    if (cx.nonsims.empty()) {
        f = 0;
        c.params.order = 1;
        c.params.iterate_ratios = {cx.sim_ratio[0]};
    } else {
        f = cx.nonsims[0];
        const GnOrder& g = cx.rep.gn_orders[f];
        if (!g.order_n) {
            notes.push_back("ALIGNED_GN: " + name_of(cx.sys, f) + " has no similarity-contraction iterate up to n=" +
                            std::to_string(cx.opt.n_max));
            return std::nullopt;
        }
        c.params.order = *g.order_n;
        c.params.iterate_ratios = {*g.ratio_c};
        bool ok = true;
        for (const AlignmentPair& p : cx.rep.alignment.pairs)
            if (!p.aligned) {
                notes.push_back("ALIGNED_GN: similarity not f-aligned — " + name_of(cx.sys, p.similarity_index) +
                                " vs " + name_of(cx.sys, p.affine_index) + " (commutator norm " +
                                fmt(p.commutator_norm) + ")");
                ok = false;
            }
        if (!ok) return std::nullopt;
    }
    c.params.iterate_maps = {f};
    for (std::size_t j : cx.sims)
        if (j != f) {
            c.params.similarity_maps.push_back(j);
            c.params.similarity_ratios.push_back(cx.sim_ratio[j]);
        }
    c.summary = "n=" + std::to_string(c.params.order) + ", c=" + fmt(c.params.iterate_ratios[0]);
    return c;
}

std::optional<Candidate> try_hybrid(const Context& cx, std::vector<std::string>& notes) {
    if (cx.nonsims.size() < 2 || cx.sims.empty()) {
        notes.push_back("HYBRID: needs at least two non-similarity maps and at least one similarity");
        return std::nullopt;
    }
    std::vector<AffineMap> sub;
    for (std::size_t i : cx.nonsims) sub.push_back(cx.sys.maps[i]);
    std::string failure;
    auto ku = find_uniform(sub, cx.opt.n_max, cx.opt.similarity_tol, failure);
    if (!ku) {
        notes.push_back("HYBRID: no n <= " + std::to_string(cx.opt.n_max) +
                        " with every length-n composition of the affine maps a similarity (" + failure + ")");
        return std::nullopt;
    }
    bool ok = true;
    for (const AlignmentPair& p : cx.rep.alignment.pairs)
        if (!p.aligned) {
            notes.push_back("HYBRID: universal alignment fails — similarity not f-aligned: " +
                            name_of(cx.sys, p.similarity_index) + " vs " + name_of(cx.sys, p.affine_index) +
                            " (commutator norm " + fmt(p.commutator_norm) + ")");
            ok = false;
        }
    if (!ok) return std::nullopt;

    Candidate c{Family::HYBRID, {}, std::nullopt, ""};
    const int n = ku->k;
    c.params.order = n;
    // translate subsystem words back to global indices
    KUniform global{n, {}};
    for (WordRatio wr : ku->ratios) {
        for (std::size_t& j : wr.word) j = cx.nonsims[j];
        global.ratios.push_back(std::move(wr));
    }
    for (std::size_t i : cx.nonsims) {
        c.params.iterate_maps.push_back(i);
        c.params.iterate_ratios.push_back(*similarity_test(iterate(cx.sys.maps[i], n).linear()).ratio);
    }
    for (std::size_t j : cx.sims) {
        c.params.similarity_maps.push_back(j);
        c.params.similarity_ratios.push_back(cx.sim_ratio[j]);
    }
    c.k_uniform = std::move(global);
    c.summary = "n=" + std::to_string(n);
    return c;
}

std::optional<Candidate> try_k_iterate(const Context& cx, std::vector<std::string>& notes) {
    std::string failure;
    auto ku = find_uniform(cx.sys.maps, cx.opt.k_max, cx.opt.similarity_tol, failure);
    if (!ku) {
        notes.push_back("K_ITERATE: no k <= " + std::to_string(cx.opt.k_max) +
                        " with every length-k composition a similarity contraction (" + failure + ")");
        return std::nullopt;
    }
    Candidate c{Family::K_ITERATE, {}, ku, ""};
    per_map_ratios(*ku, c.params);
    c.summary = "k=" + std::to_string(ku->k);
    return c;
}

std::optional<Candidate> try_planar(const Context& cx, std::vector<std::string>& notes) {
    const auto& pc = cx.rep.planar;
    if (!pc || pc->a_square_form == ASquareForm::NEITHER) {
        notes.push_back("PLANAR_TWO_MAP: needs two planar maps, one a similarity, with A^2 = ±cI");
        return std::nullopt;
    }
    return Candidate{Family::PLANAR_TWO_MAP, {}, std::nullopt,
                     std::string(to_string(pc->a_square_form)) + "/" + to_string(pc->s_form)};
}

// (weight, base) terms a family induces, for comparing equations between families.
std::vector<double> induced_bases(const Candidate& c) {
    std::vector<double> b;
    const double inv = 1.0 / c.params.order;
    for (double v : c.params.iterate_ratios) b.push_back(std::pow(v, inv));
    for (double v : c.params.similarity_ratios) b.push_back(v);
    std::sort(b.begin(), b.end());
    return b;
}

bool same_equation(const Candidate& a, const Candidate& b) {
    const auto x = induced_bases(a), y = induced_bases(b);
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - y[i]) > 1e-12 * std::max(1.0, x[i])) return false;
    return true;
}

}  // namespace

ClassificationReport classify_system(const IfsSystem& system, const ClassifierOptions& opt) {
    validate(system);
    ClassificationReport rep;
    rep.ambient_dim = system.dim();

    Context cx{system, opt, rep, {}, {}, std::vector<double>(system.size(), 0.0)};
    for (std::size_t i = 0; i < system.size(); ++i) {
        GnOrder g = gn_order(system.maps[i], opt.n_max, opt.similarity_tol);
        g.map_index = i;
        rep.gn_orders.push_back(g);
        const SimilarityTestResult st = similarity_test(system.maps[i], opt.similarity_tol);
        if (st.is_similarity && *st.ratio < 1.0) {
            cx.sims.push_back(i);
            cx.sim_ratio[i] = *st.ratio;
        } else {
            cx.nonsims.push_back(i);
        }
    }
    for (std::size_t s : cx.sims)
        for (std::size_t a : cx.nonsims) {
            auto [ok, comm] = is_f_aligned(system.maps[s], system.maps[a], opt.alignment_tol);
            rep.alignment.pairs.push_back({s, a, comm, ok});
        }
    if (system.dim() == 2 && system.size() == 2) {
        // g is the similarity; prefer map 1 so that (f, g) follows the file order
        const bool s1 = similarity_test(system.maps[1], opt.similarity_tol).is_similarity;
        const bool s0 = similarity_test(system.maps[0], opt.similarity_tol).is_similarity;
        if (s1 || s0) {
            const std::size_t gi = s1 ? 1 : 0, fi = 1 - gi;
            PlanarClass pc = planar_classify(system.maps[fi], system.maps[gi], opt.planar_tol);
            pc.f_index = fi;
            pc.g_index = gi;
            rep.planar = pc;
        }
    }

    using Try = std::optional<Candidate> (*)(const Context&, std::vector<std::string>&);
    struct Entry {
        Family family;
        Try fn;
    };
    const Entry order[] = {{Family::ALIGNED_GN, try_aligned},
                           {Family::HYBRID, try_hybrid},
                           {Family::K_ITERATE, try_k_iterate},
                           {Family::PLANAR_TWO_MAP, try_planar}};

    std::vector<std::string> notes;
    std::optional<Candidate> chosen;
    if (opt.forced) {
        if (*opt.forced == Family::OVERLAP_DECLARED) chosen = try_overlap(cx, notes);
        for (const Entry& e : order)
            if (e.family == *opt.forced) chosen = e.fn(cx, notes);
        if (*opt.forced == Family::UNCLASSIFIED) notes.push_back("family forced to UNCLASSIFIED");
        if (chosen) notes.push_back(std::string("family forced to ") + to_string(*opt.forced));
    } else if (!system.overlaps.empty()) {
        // declared overlaps pre-empt the OSC families; no silent fallback
        chosen = try_overlap(cx, notes);
        if (!chosen) notes.push_back("declared overlaps present: OSC families not attempted");
    } else {
        for (const Entry& e : order) {
            chosen = e.fn(cx, notes);
            if (chosen) break;
        }
    }

    if (!chosen) {
        rep.family = Family::UNCLASSIFIED;
        rep.guard_notes = std::move(notes);
        if (system.dim() == 2) {
            if (auto db = decoupled_projection_bound(system, 3)) {
                std::string ws;
                for (std::size_t i = 0; i < db->words.size(); ++i)
                    ws += (i ? ", " : "") + word_to_string(system.maps, db->words[i]);
                rep.guard_notes.push_back("decoupled subsystem {" + ws + "} on axis " + (db->axis ? "y" : "x") +
                                          " has invariant interval [" + fmt(db->interval.lo) + ", " +
                                          fmt(db->interval.hi) + "]: dim_H >= 1");
            }
        }
        return rep;
    }

    rep.family = chosen->family;
    rep.parameters = chosen->params;
    rep.k_uniform = chosen->k_uniform;
    rep.guard_notes = std::move(notes);
    if (chosen->family != Family::PLANAR_TWO_MAP && chosen->family != Family::OVERLAP_DECLARED) {
        std::vector<std::string> scratch;
        for (const Entry& e : order) {
            if (e.family == chosen->family || e.family == Family::PLANAR_TWO_MAP) continue;
            if (auto other = e.fn(cx, scratch))
                rep.guard_notes.push_back(std::string("also satisfies ") + to_string(e.family) + " (" +
                                          other->summary + "; " +
                                          (same_equation(*chosen, *other) ? "same equation"
                                                                          : "different equation, not solved") +
                                          ")");
        }
    }
    return rep;
}

}  // namespace ifsdim
