#include "ifsdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "ifsdim/error.hpp"

namespace ifsdim {

namespace {

std::string num(double v) {
    char buf[40];
    if (std::abs(v - std::round(v)) < 1e-12 && std::abs(v) < 1e15)
        std::snprintf(buf, sizeof buf, "%.0f", v);
    else
        std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s + "]";
}

}  // namespace

DimensionEquation build_equation(const ClassificationReport& report, std::span<const OverlapSpec> overlaps) {
    DimensionEquation eq;
    eq.family = report.family;
    const FamilyParameters& p = report.parameters;
    switch (report.family) {
        case Family::UNCLASSIFIED:
            throw Error(ErrorKind::GuardRefusal,
                        "guard: system is UNCLASSIFIED, no dimension formula applies");
        case Family::PLANAR_TWO_MAP:
            throw Error(ErrorKind::GuardRefusal,
                        "guard: PLANAR_TWO_MAP is a structural class without a dimension formula");
        case Family::ALIGNED_GN:
        case Family::HYBRID: {
            const double inv = 1.0 / p.order;
            for (double c : p.iterate_ratios) eq.terms.push_back({1.0, std::pow(c, inv)});
            for (double r : p.similarity_ratios) eq.terms.push_back({1.0, r});
            eq.provenance = std::string(to_string(report.family)) + " n=" + std::to_string(p.order) +
                            " c=" + join(p.iterate_ratios) + " r=" + join(p.similarity_ratios);
            break;
        }
        case Family::K_ITERATE:
        case Family::OVERLAP_DECLARED: {
            const double inv = 1.0 / p.order;
            for (double c : p.iterate_ratios) eq.terms.push_back({1.0, std::pow(c, inv)});
            eq.provenance = std::string(to_string(report.family)) + " k=" + std::to_string(p.order) + " words=" +
                            std::to_string(p.iterate_ratios.size());
            if (report.family == Family::OVERLAP_DECLARED) {
                std::string ov;
                for (const OverlapSpec& o : overlaps) {
                    if (o.multiplicity_q < 1 || !(o.scale_p > 0 && o.scale_p < 1))
                        throw Error(ErrorKind::InvalidArgument, "overlap needs q >= 1 and p in (0,1)");
                    if (o.multiplicity_q > 1) eq.terms.push_back({-(o.multiplicity_q - 1.0), o.scale_p});
                    ov += (ov.empty() ? "" : ",") + std::string("(q=") + std::to_string(o.multiplicity_q) +
                          ",p=" + num(o.scale_p) + ")";
                }
                eq.provenance += " overlaps=[" + ov + "]";
            }
            break;
        }
    }
    validate(eq);
    return eq;
}

void validate(const DimensionEquation& eq) {
    if (eq.terms.empty()) throw Error(ErrorKind::InvalidArgument, "equation has no terms");
    bool positive = false;
    for (const Term& t : eq.terms) {
        if (!(t.base > 0 && t.base < 1))
            throw Error(ErrorKind::InvalidArgument, "equation base " + num(t.base) + " outside (0,1)");
        positive = positive || t.weight > 0;
    }
    if (!positive) throw Error(ErrorKind::InvalidArgument, "equation needs a positive-weight term");
}

double eval_lhs(const DimensionEquation& eq, double s) {
    // Neumaier summation
    double sum = 0.0, comp = 0.0;
    for (const Term& t : eq.terms) {
        const double x = t.weight * std::pow(t.base, s);
        const double y = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - y) + x : (x - y) + sum;
        sum = y;
    }
    return sum + comp;
}

DimensionResult solve_dimension(const DimensionEquation& eq, int ambient_m) {
    validate(eq);
    if (ambient_m < 1) throw Error(ErrorKind::InvalidArgument, "ambient dimension must be >= 1");
    constexpr double step = 1e-3;
    const long steps = static_cast<long>(ambient_m) * 1000;
    auto g = [&](double s) { return eval_lhs(eq, s) - eq.target; };

    std::vector<std::pair<double, double>> brackets;
    std::vector<double> values(static_cast<std::size_t>(steps) + 1);
    for (long i = 0; i <= steps; ++i) values[static_cast<std::size_t>(i)] = g(i * step);
    bool decreasing = true;
    for (long i = 0; i < steps; ++i) {
        const double a = values[static_cast<std::size_t>(i)], b = values[static_cast<std::size_t>(i + 1)];
        decreasing = decreasing && b < a;
        if (a == 0.0)
            brackets.push_back({i * step, i * step});
        else if ((a < 0) != (b < 0) && b != 0.0)
            brackets.push_back({i * step, (i + 1) * step});
    }
    if (values.back() == 0.0) brackets.push_back({steps * step, steps * step});

    if (brackets.empty())
        throw Error(ErrorKind::NoRoot, "no root in [0, " + std::to_string(ambient_m) + "] (LHS(0) = " +
                                           num(values.front() + eq.target) + ")");
    if (brackets.size() > 1) {
        std::string where;
        for (auto [lo, hi] : brackets) where += (where.empty() ? "" : ", ") + num(lo) + ".." + num(hi);
        throw Error(ErrorKind::MultipleRoots,
                    "multiple roots: " + std::to_string(brackets.size()) + " sign changes near " + where);
    }

    DimensionResult r;
    double lo = brackets[0].first, hi = brackets[0].second;
    double glo = g(lo);
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        ++r.iterations;
        if (gm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    r.lo = lo;
    r.hi = hi;
    // best of the endpoints and midpoint
    double best = 0.5 * (lo + hi);
    for (double c : {lo, hi})
        if (std::abs(g(c)) < std::abs(g(best))) best = c;
    r.s = best;
    r.residual = std::abs(g(best));
    if (r.residual > 1e-12)
        throw Error(ErrorKind::NoRoot, "root residual " + num(r.residual) + " exceeds 1e-12");

    const bool all_positive =
        std::all_of(eq.terms.begin(), eq.terms.end(), [](const Term& t) { return t.weight > 0; });
    if (all_positive)
        r.uniqueness_note = decreasing ? "all weights positive: LHS strictly decreasing, root unique"
                                       : "all weights positive but LHS not strictly decreasing on grid";
    else
        r.uniqueness_note = "negative-weight terms: single sign change on 1e-3 grid over [0," +
                            std::to_string(ambient_m) + "]";
    return r;
}

namespace {

// p/q with q <= 12 matching x, or nullopt.
std::optional<std::pair<long, int>> small_rational(double x) {
    for (int q = 1; q <= 12; ++q) {
        const double pq = x * q;
        if (std::abs(pq - std::round(pq)) <= 1e-9 * q) return std::pair{std::lround(pq), q};
    }
    return std::nullopt;
}

double poly_eval(const std::vector<std::pair<int, double>>& poly, double u) {
    double v = 0.0;
    for (auto [e, c] : poly) v += c * std::pow(u, e);
    return v;
}

std::string poly_text(const std::vector<std::pair<int, double>>& poly) {
    std::string s;
    for (auto [e, c] : poly) {
        const double a = std::abs(c);
        std::string coeff = (std::abs(a - 1) < 1e-12 && e != 0) ? "" : num(a);
        std::string mono = e == 0 ? "" : e == 1 ? "u" : "u^" + std::to_string(e);
        if (s.empty())
            s = (c < 0 ? "-" : "") + coeff + mono;
        else
            s += (c < 0 ? " - " : " + ") + coeff + mono;
    }
    return s + " = 0";
}

}  // namespace

std::optional<ClosedForm> closed_form_check(const DimensionEquation& eq) {
    validate(eq);
    const double ref = std::max_element(eq.terms.begin(), eq.terms.end(), [](const Term& a, const Term& b) {
                           return a.base < b.base;
                       })->base;
    const double lref = std::log(ref);
    std::vector<std::pair<long, int>> ex;
    int denom = 1;
    for (const Term& t : eq.terms) {
        auto r = small_rational(std::log(t.base) / lref);
        if (!r) return std::nullopt;
        ex.push_back(*r);
        denom = std::lcm(denom, r->second);
    }
    std::map<long, double, std::greater<>> coeff;
    long g = 0;
    double scale = denom;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        const long e = ex[i].first * (denom / ex[i].second);
        coeff[e] += eq.terms[i].weight;
        g = std::gcd(g, e);
    }
    if (g > 1) {
        // u = b^s with a common factor in every exponent: fold it into the base
        std::map<long, double, std::greater<>> folded;
        for (auto [e, c] : coeff) folded[e / g] += c;
        coeff = std::move(folded);
        scale = static_cast<double>(denom) / static_cast<double>(g);
    }
    if (coeff.begin()->first > 64) return std::nullopt;

    ClosedForm cf;
    cf.denominator = scale;
    cf.ref_base = ref;
    for (auto [e, c] : coeff)
        if (c != 0.0) cf.poly.push_back({static_cast<int>(e), c});
    cf.poly.push_back({0, -eq.target});
    if (cf.poly.front().second < 0)
        for (auto& [e, c] : cf.poly) c = -c;
    cf.polynomial = poly_text(cf.poly);

    // admissible roots in (0,1)
    std::vector<double> roots;
    constexpr int N = 20000;
    double prev = poly_eval(cf.poly, 0.0);
    for (int i = 1; i <= N; ++i) {
        double lo = (i - 1.0) / N, hi = static_cast<double>(i) / N;
        const double cur = poly_eval(cf.poly, hi);
        if ((prev < 0) != (cur < 0) && i < N) {
            double flo = prev;
            for (int it = 0; it < 200 && hi - lo > 0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double fm = poly_eval(cf.poly, mid);
                if ((fm < 0) == (flo < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev = cur;
    }
    if (roots.size() != 1) return std::nullopt;
    cf.u = roots[0];

    const int degree = cf.poly.front().first;
    if (degree == 1) {
        const double a = cf.poly.front().second, b = cf.poly.back().second;
        cf.u = -b / a;
        cf.radical = "u = " + num(-b) + "/" + num(a);
    } else if (degree == 2) {
        double a = 0, b = 0, c = 0;
        for (auto [e, k] : cf.poly) (e == 2 ? a : e == 1 ? b : c) = k;
        const double disc = b * b - 4 * a * c;
        if (disc >= 0) {
            const double sq = std::sqrt(disc);
            // cancellation-free pair of roots; keep the admissible one
            const double q = -0.5 * (b + std::copysign(sq, b));
            const double r1 = q / a, r2 = q != 0 ? c / q : r1;
            const double pick = std::abs(r1 - cf.u) < std::abs(r2 - cf.u) ? r1 : r2;
            if (std::abs(pick - cf.u) < 1e-9) {
                cf.u = pick;
                const bool plus = std::abs((-b + sq) / (2 * a) - pick) < std::abs((-b - sq) / (2 * a) - pick);
                cf.radical = "u = (" + num(-b) + (plus ? " + " : " - ") + "sqrt(" + num(disc) + ")) / " + num(2 * a);
            }
        }
    }
    cf.s = cf.denominator * std::log(cf.u) / lref;
    return cf;
}

std::string equation_text(const DimensionEquation& eq) {
    // group identical terms for readability
    std::vector<Term> grouped;
    for (const Term& t : eq.terms) {
        auto it = std::find_if(grouped.begin(), grouped.end(), [&](const Term& g) {
            return std::abs(g.base - t.base) <= 1e-15 && (g.weight > 0) == (t.weight > 0);
        });
        if (it == grouped.end())
            grouped.push_back(t);
        else
            it->weight += t.weight;
    }
    std::string s;
    for (const Term& t : grouped) {
        const double a = std::abs(t.weight);
        const std::string mono = (std::abs(a - 1) < 1e-15 ? "" : num(a) + "*") + num(t.base) + "^s";
        if (s.empty())
            s = (t.weight < 0 ? "-" : "") + mono;
        else
            s += (t.weight < 0 ? " - " : " + ") + mono;
    }
    return s + " = " + num(eq.target);
}

}  // namespace ifsdim
