#include "ifsdim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ifsdim/error.hpp"

namespace ifsdim {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& msg) {
    throw Error(ErrorKind::Config, source + ": " + msg);
}

void only_keys(const ordered_json& obj, std::initializer_list<const char*> keys, const std::string& source,
               const std::string& where) {
    std::set<std::string> known(keys.begin(), keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key())) fail(source, where + ": unknown field '" + it.key() + "'");
}

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& source,
                            const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(source, where + ": missing field '" + key + "'");
    return *it;
}

std::size_t as_count(const ordered_json& v, const std::string& source, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(source, where + ": expected a non-negative integer");
    return v.get<std::size_t>();
}

}  // namespace

double parse_real(const ordered_json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        double num = 0, den = 1;
        char slash = 0, extra = 0;
        const int got = std::sscanf(s.c_str(), " %lf %c %lf %c", &num, &slash, &den, &extra);
        if (got == 1 || (got == 3 && slash == '/')) {
            if (den == 0) throw Error(ErrorKind::Config, where + ": zero denominator in '" + s + "'");
            const double x = num / den;
            if (std::isfinite(x)) return x;
        }
        throw Error(ErrorKind::Config, where + ": cannot parse '" + s + "' as a number or p/q");
    }
    throw Error(ErrorKind::Config, where + ": expected a number or a \"p/q\" string");
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SystemConfig parse_config(const std::string& text, const std::string& source) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        // byte offset -> line:column
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        fail(source, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
    }
    if (!doc.is_object()) fail(source, "top level must be an object");
    only_keys(doc, {"name", "example", "description", "ambient_dim", "maps", "overlaps", "render"}, source, "config");

    SystemConfig cfg;
    cfg.raw = doc;
    cfg.hash = fnv1a_hex(doc.dump());
    cfg.name = doc.value("name", std::string("system"));
    cfg.example = doc.value("example", std::string());
    cfg.description = doc.value("description", std::string());
    cfg.system.name = cfg.name;

    const ordered_json& dim_j = require(doc, "ambient_dim", source, "config");
    if (!dim_j.is_number_integer() || dim_j.get<long long>() < 1 || dim_j.get<long long>() > 8)
        fail(source, "ambient_dim: expected an integer in [1, 8]");
    const std::size_t m = dim_j.get<std::size_t>();

    const ordered_json& maps = require(doc, "maps", source, "config");
    if (!maps.is_array()) fail(source, "maps: expected an array");
    if (maps.empty()) fail(source, "maps: at least one map is required");
    for (std::size_t i = 0; i < maps.size(); ++i) {
        const std::string where = "maps[" + std::to_string(i) + "]";
        const ordered_json& mj = maps[i];
        if (!mj.is_object()) fail(source, where + ": expected an object");
        only_keys(mj, {"label", "matrix", "translation"}, source, where);
        const ordered_json& mat = require(mj, "matrix", source, where);
        if (!mat.is_array() || mat.size() != m * m)
            fail(source, where + ".matrix: expected " + std::to_string(m * m) + " entries (row-major)");
        std::vector<double> a;
        for (std::size_t k = 0; k < mat.size(); ++k)
            a.push_back(parse_real(mat[k], source + ": " + where + ".matrix[" + std::to_string(k) + "]"));
        Vector b(m, 0.0);
        if (auto t = mj.find("translation"); t != mj.end()) {
            if (!t->is_array() || t->size() != m)
                fail(source, where + ".translation: expected " + std::to_string(m) + " entries");
            for (std::size_t k = 0; k < m; ++k)
                b[k] = parse_real((*t)[k], source + ": " + where + ".translation[" + std::to_string(k) + "]");
        }
        const std::string label = mj.value("label", std::string());
        try {
            cfg.system.maps.emplace_back(Matrix(m, std::move(a)), std::move(b), label);
        } catch (const Error& e) {
            fail(source, where + ": " + e.what());
        }
    }

    if (auto ov = doc.find("overlaps"); ov != doc.end()) {
        if (!ov->is_array()) fail(source, "overlaps: expected an array");
        for (std::size_t j = 0; j < ov->size(); ++j) {
            const std::string where = "overlaps[" + std::to_string(j) + "]";
            const ordered_json& oj = (*ov)[j];
            if (!oj.is_object()) fail(source, where + ": expected an object");
            only_keys(oj, {"indices", "q", "p", "homothety"}, source, where);
            OverlapSpec o;
            const ordered_json& idx = require(oj, "indices", source, where);
            if (!idx.is_array() || idx.empty()) fail(source, where + ".indices: expected a non-empty array");
            for (const auto& x : idx) {
                const std::size_t k = as_count(x, source, where + ".indices");
                if (k >= cfg.system.maps.size())
                    fail(source, where + ".indices: map index " + std::to_string(k) + " does not exist");
                o.indices.push_back(k);
            }
            const ordered_json& q = require(oj, "q", source, where);
            if (!q.is_number_integer()) fail(source, where + ".q: expected an integer");
            o.multiplicity_q = q.get<int>();
            o.scale_p = parse_real(require(oj, "p", source, where), source + ": " + where + ".p");
            if (auto h = oj.find("homothety"); h != oj.end()) {
                if (!h->is_object()) fail(source, where + ".homothety: expected an object");
                only_keys(*h, {"lambda", "translation"}, source, where + ".homothety");
                HomotheticCopy c;
                c.lambda = parse_real(require(*h, "lambda", source, where + ".homothety"),
                                      source + ": " + where + ".homothety.lambda");
                const ordered_json& t = require(*h, "translation", source, where + ".homothety");
                if (!t.is_array() || t.size() != m)
                    fail(source, where + ".homothety.translation: expected " + std::to_string(m) + " entries");
                for (std::size_t k = 0; k < m; ++k)
                    c.translation.push_back(parse_real(t[k], source + ": " + where + ".homothety.translation"));
                o.homothety = c;
            }
            cfg.system.overlaps.push_back(std::move(o));
        }
    }

    if (auto r = doc.find("render"); r != doc.end()) {
        if (!r->is_object()) fail(source, "render: expected an object");
        only_keys(*r, {"points", "seed", "burn_in", "resolution"}, source, "render");
        if (r->contains("points")) cfg.render.points = as_count((*r)["points"], source, "render.points");
        if (r->contains("seed")) cfg.render.seed = as_count((*r)["seed"], source, "render.seed");
        if (r->contains("burn_in")) cfg.render.burn_in = as_count((*r)["burn_in"], source, "render.burn_in");
        if (r->contains("resolution"))
            cfg.render.resolution = static_cast<int>(as_count((*r)["resolution"], source, "render.resolution"));
    }

    try {
        validate(cfg.system);
    } catch (const Error& e) {
        fail(source, e.what());
    }
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, path + ": cannot open config");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace ifsdim
