#include "ifsdim/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ifsdim/config.hpp"
#include "ifsdim/report.hpp"

namespace ifsdim {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return kExitConfig;
        case ErrorKind::GuardRefusal: return kExitGuard;
        case ErrorKind::NoRoot:
        case ErrorKind::MultipleRoots: return kExitSolver;
        case ErrorKind::Divergence:
        case ErrorKind::NotContractive: return kExitRender;
        case ErrorKind::HypothesisNotMet:
        case ErrorKind::NonPlanar:
        case ErrorKind::NotSimilarity: return kExitHypothesis;
        default: return kExitInternal;
    }
}

const std::vector<BundledExample>& bundled_examples() {
    static const std::vector<BundledExample> table = {
        {"Ex1.1", "ex1_1.json", "G^2-similarity plus aligned similarity, s ~ 1.464", "dimension", 0},
        {"Ex2.1", "ex2_1.json", "golden-ratio dimension 2 log2(phi)", "dimension", 0},
        {"Ex2.2", "ex2_2.json", "rotation-type f with two scalar copies, s = log3(4)", "dimension", 0},
        {"Ex2.3", "ex2_3.json", "expanding/contracting f, s = 2 log2(phi)", "dimension", 0},
        {"Ex2.4", "ex2_4.json", "two axial-reflection similarities, s ~ 1.713", "dimension", 0},
        {"Sec3", "sec3.json", "misaligned rotations: guard must refuse", "dimension", 3},
        {"Ex4.1", "ex4_1.json", "uniform 2-iterate similarity, s ~ 1.496", "dimension", 0},
        {"Ex4.2", "ex4_2.json", "two declared overlaps q=2 p=1/4", "dimension", 0},
        {"Ex4.3", "ex4_3.json", "one declared overlap q=2 p=1/5", "dimension", 0},
        {"Ex5.1", "ex5_1.json", "hybrid: two affine maps and one similarity", "dimension", 0},
        {"Ex5.2", "ex5_2.json", "hybrid: three affine maps and two similarities", "dimension", 0},
        {"Sec6.1a", "sec6_1_v1.json", "c + r = 1 family, translation variant 1", "topology", 0},
        {"Sec6.1b", "sec6_1_v2.json", "c + r = 1 family, translation variant 2", "topology", 0},
        {"Sec6.1c", "sec6_1_v3.json", "c + r = 1 family, translation variant 3", "topology", 0},
        {"Sec6.1d", "sec6_1_v4.json", "c + r = 1 family, translation variant 4", "topology", 0},
        {"Sec6.1e", "sec6_1_v5.json", "c + r = 1 family, translation variant 5", "topology", 0},
        {"Sec6.1f", "sec6_1_v6.json", "c + r = 1 family, translation variant 6", "topology", 0},
        {"Ex6.1", "ex6_1.json", "OSC certificate, A^2 = -cI, S = rI", "certify-osc", 0},
        {"Ex6.2", "ex6_2.json", "OSC certificate, A^2 = -cI, S = -rI", "certify-osc", 0},
        {"Ex6.3", "ex6_3.json", "OSC certificate, A^2 = cI, S = rI", "certify-osc", 0},
        {"Ex6.4", "ex6_4.json", "OSC certificate, A^2 = cI, S = -rI (square)", "certify-osc", 0},
        {"Ex6.5", "ex6_5.json", "axial reflection S: certificate rejected", "certify-osc", 6},
        {"Ex6.6", "ex6_6.json", "axial reflection S: certificate rejected", "certify-osc", 6},
        {"Ex6.7", "ex6_7.json", "axial reflection S: topology inapplicable", "topology", 0},
        {"ctl-dust", "dust.json", "control: c = r = 0.25 scalar system", "topology", 0},
        {"ctl-square", "unit_square.json", "control: four half-scale copies, unit square", "boxcount", 0},
        {"ctl-segment", "segment.json", "control: two half-scale copies, unit segment", "boxcount", 0},
    };
    return table;
}

namespace {

struct Options {
    std::string config;
    bool text = false;
    bool timings = false;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> points;
    std::optional<int> resolution;
    std::optional<std::size_t> burn_in;
    int octaves = 10;
    std::string family;
    bool analytic_only = false;
};

class Stopwatch {
public:
    void stage(Json& timings, const char* name) {
        const auto now = std::chrono::steady_clock::now();
        timings[name] = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void print_report(const Json& report, const Options& opt, std::ostream& out) {
    if (!opt.text) {
        out << report.dump(2) << '\n';
        return;
    }
    for (auto it = report.begin(); it != report.end(); ++it) {
        out << it.key() << ": ";
        if (it->is_string())
            out << it->get<std::string>();
        else
            out << it->dump();
        out << '\n';
    }
}

std::string prefix_for(const Options& opt, const SystemConfig& cfg) { return opt.out.empty() ? cfg.name : opt.out; }

ChaosOptions chaos_options(const Options& opt, const SystemConfig& cfg) {
    ChaosOptions co;
    co.n_points = opt.points.value_or(cfg.render.points);
    co.seed = opt.seed.value_or(cfg.render.seed);
    co.burn_in = opt.burn_in.value_or(cfg.render.burn_in);
    return co;
}

std::pair<std::size_t, std::size_t> planar_pair(const IfsSystem& sys) {
    if (sys.dim() != 2 || sys.size() != 2)
        throw HypothesisError("two_planar_maps", "hypotheses not met: needs exactly two planar maps");
    const bool s1 = similarity_test(sys.maps[1]).is_similarity;
    const bool s0 = similarity_test(sys.maps[0]).is_similarity;
    if (!s1 && !s0) throw HypothesisError("g_similarity", "hypotheses not met: neither map is a similarity");
    return s1 ? std::pair<std::size_t, std::size_t>{0, 1} : std::pair<std::size_t, std::size_t>{1, 0};
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
}

int run_command(const std::string& cmd, const Options& opt, std::ostream& out, std::ostream& err) {
    SystemConfig cfg;
    try {
        cfg = load_config(opt.config);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    Json report;
    report["command"] = cmd;
    report["config"] = {{"name", cfg.name}, {"example", cfg.example}, {"hash", cfg.hash}};
    Json timings;
    Stopwatch sw;
    int code = kExitOk;
    const IfsSystem& sys = cfg.system;

    try {
        if (cmd == "classify" || cmd == "dimension") {
            ClassifierOptions co;
            if (!opt.family.empty()) {
                co.forced = family_from_string(opt.family);
                if (!co.forced) {
                    err << "error: unknown family '" << opt.family << "'\n";
                    return kExitConfig;
                }
            }
            const ClassificationReport rep = classify_system(sys, co);
            sw.stage(timings, "classify");
            report["classification"] = to_json(rep, sys);
            if (cmd == "dimension") {
                const DimensionEquation eq = build_equation(rep, sys.overlaps);
                report["equation"] = to_json(eq);
                const DimensionResult res = solve_dimension(eq, static_cast<int>(sys.dim()));
                report["dimension"] = to_json(res);
                const auto cf = closed_form_check(eq);
                report["closed_form"] = cf ? to_json(*cf) : Json(nullptr);
                sw.stage(timings, "solve");
            }
        } else if (cmd == "render") {
            const ChaosOptions co = chaos_options(opt, cfg);
            const ContractivityCertificate cc = contractivity_certificate(sys, 6);
            const PointCloud cloud = chaos_game(sys, co);
            sw.stage(timings, "chaos_game");
            const std::string prefix = prefix_for(opt, cfg);
            Json files = Json::array();
            write_csv(prefix + ".csv", cloud);
            files.push_back(prefix + ".csv");
            if (sys.dim() == 2) {
                write_ppm(prefix + ".ppm", cloud, opt.resolution.value_or(cfg.render.resolution));
                files.push_back(prefix + ".ppm");
            }
            sw.stage(timings, "export");
            const auto [lo, hi] = bounding_box(cloud);
            report["render"] = {{"seed", co.seed},
                                {"points", cloud.size()},
                                {"burn_in", co.burn_in},
                                {"contractivity", {{"L", cc.L}, {"max_lipschitz", cc.max_lipschitz}}},
                                {"bounding_box", {{"min", lo}, {"max", hi}}},
                                {"files", files}};
        } else if (cmd == "boxcount") {
            const ChaosOptions co = chaos_options(opt, cfg);
            const PointCloud cloud = chaos_game(sys, co);
            sw.stage(timings, "chaos_game");
            const BoxCountCurve curve = box_count(cloud, opt.octaves);
            sw.stage(timings, "box_count");
            const std::string path = prefix_for(opt, cfg) + ".boxcount.csv";
            std::ofstream f(path, std::ios::binary);
            if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
            write_csv(f, curve);
            Json analytic = nullptr;
            try {
                const ClassificationReport rep = classify_system(sys);
                analytic = solve_dimension(build_equation(rep, sys.overlaps), static_cast<int>(sys.dim())).s;
            } catch (const Error&) {
                // no analytic value for this system; box slope still reported
            }
            report["metrology"] = {{"seed", co.seed},
                                   {"points", cloud.size()},
                                   {"octaves", opt.octaves},
                                   {"box_slope", curve.slope},
                                   {"r_squared", curve.r_squared},
                                   {"analytic_dimension", analytic},
                                   {"curve", to_json(curve)},
                                   {"file", path}};
        } else if (cmd == "certify-osc") {
            const auto [fi, gi] = planar_pair(sys);
            report["maps"] = {{"f", fi}, {"g", gi}};
            const OscCertificate cert = certify_osc(sys.maps[fi], sys.maps[gi]);
            sw.stage(timings, "certify");
            report["certificate"] = to_json(cert);
            const std::string path = prefix_for(opt, cfg) + ".certificate.json";
            write_json_file(path, {{"config_hash", cfg.hash}, {"certificate", report["certificate"]}});
            report["file"] = path;
        } else if (cmd == "topology") {
            const auto [fi, gi] = planar_pair(sys);
            report["maps"] = {{"f", fi}, {"g", gi}};
            const TopologyVerdict tv = classify_topology(sys.maps[fi], sys.maps[gi]);
            report["topology"] = to_json(tv);
            Json metro = nullptr;
            if (!opt.analytic_only) {
                const ChaosOptions co = chaos_options(opt, cfg);
                const PointCloud cloud = chaos_game(sys, co);
                sw.stage(timings, "chaos_game");
                const ConnectivityReport cr = pixel_connectivity(cloud, opt.resolution.value_or(2048));
                sw.stage(timings, "connectivity");
                const char* empirical = cr.component_count == 1 ? "connected"
                                        : (cr.component_count > 10 && cr.largest_component_fraction < 0.5)
                                            ? "disconnected"
                                            : "inconclusive";
                metro = {{"seed", co.seed}, {"points", cloud.size()}, {"components", to_json(cr)},
                         {"empirical", empirical}};
            }
            report["metrology"] = metro;
            const std::string path = prefix_for(opt, cfg) + ".topology.json";
            write_json_file(path, {{"config_hash", cfg.hash}, {"topology", report["topology"]}, {"metrology", metro}});
            report["file"] = path;
        }
    } catch (const HypothesisError& e) {
        code = exit_code_for(e.kind());
        report["error"] = {{"kind", to_string(e.kind())}, {"clause", e.clause()}, {"message", e.what()},
                           {"exit_code", code}};
        err << "error: " << e.what() << '\n';
    } catch (const Error& e) {
        code = exit_code_for(e.kind());
        report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}, {"exit_code", code}};
        err << "error: " << e.what() << '\n';
    }
    if (opt.timings) report["timings_ms"] = timings;
    print_report(report, opt, out);
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ifsdim: classify affine IFS, solve their dimension equations, certify and measure attractors"};
    app.require_subcommand(0, 1);
    bool list_examples = false;
    app.add_flag("--examples", list_examples, "list the bundled example configs");

    Options opt;
    const char* commands[] = {"classify", "dimension", "render", "boxcount", "certify-osc", "topology"};
    const char* help[] = {"print the classification report",
                          "solve the dimension equation (exit 3 when the guard refuses)",
                          "chaos-game render to PPM and CSV",
                          "box-counting estimate of the attractor",
                          "construct and verify the planar open-set certificate",
                          "c + r trichotomy verdict with pixel connectivity cross-check"};
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(commands[i], help[i]);
        sub->add_option("config", opt.config, "system config (JSON)")->required();
        sub->add_flag("--text", opt.text, "plain-text report instead of JSON");
        sub->add_flag("--json", [&opt](std::int64_t) { opt.text = false; }, "JSON report (default)");
        sub->add_flag("--timings", opt.timings, "append per-stage timings");
        const std::string name = commands[i];
        if (name == "dimension" || name == "classify")
            sub->add_option("--family", opt.family, "force a theorem family");
        if (name == "render" || name == "boxcount" || name == "topology") {
            sub->add_option("--seed", opt.seed, "RNG seed");
            sub->add_option("--points", opt.points, "number of retained points");
            sub->add_option("--burn-in", opt.burn_in, "discarded initial iterates");
        }
        if (name == "render" || name == "topology") sub->add_option("--resolution", opt.resolution, "raster size");
        if (name == "boxcount") sub->add_option("--octaves", opt.octaves, "dyadic levels")->check(CLI::Range(4, 12));
        if (name == "topology") sub->add_flag("--analytic-only", opt.analytic_only, "skip the pixel cross-check");
        if (name != "classify" && name != "dimension") sub->add_option("--out", opt.out, "output file prefix");
        subs.push_back(sub);
    }

    std::vector<std::string> argv_store = {"ifsdim"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& s : argv_store) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (list_examples) {
        for (const BundledExample& ex : bundled_examples())
            out << ex.section << '\t' << ex.file << '\t' << ex.command << '\t' << "exit " << ex.expected_exit << '\t'
                << ex.summary << '\n';
        return kExitOk;
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) return run_command(commands[i], opt, out, err);
    out << app.help();
    return kExitConfig;
}

}  // namespace ifsdim
