#include "ifsdim/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "ifsdim/error.hpp"
#include "ifsdim/rng.hpp"

namespace ifsdim {

void PointCloud::push(std::span<const double> p, std::uint32_t label) {
    coords.insert(coords.end(), p.begin(), p.end());
    labels.push_back(label);
}

ContractivityCertificate contractivity_certificate(const IfsSystem& system, int L_max) {
    validate(system);
    if (L_max < 1) throw Error(ErrorKind::InvalidArgument, "L_max must be >= 1");
    if (word_count(system.size(), L_max) > kMaxWords)
        throw Error(ErrorKind::TooLarge, "contractivity search: " + std::to_string(system.size()) + "^" +
                                             std::to_string(L_max) + " words exceed 10^6");
    double worst = 0.0;
    for (int L = 1; L <= L_max; ++L) {
        worst = 0.0;
        for_each_word(system.maps, L, [&](const Word&, const AffineMap& h) {
            worst = std::max(worst, singular_values(h.linear())[0]);
        });
        if (worst < 1.0) return {L, worst};
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", worst);
    throw Error(ErrorKind::NotContractive, "not eventually contractive up to L_max=" + std::to_string(L_max) +
                                               " (max Lipschitz constant at L_max: " + buf + ")");
}

namespace {

int effective_L(std::size_t n_maps, int L_max) {
    int L = std::max(1, L_max);
    while (L > 1 && word_count(n_maps, L) > kMaxWords) --L;
    return L;
}

Vector start_point(const IfsSystem& system, const ChaosOptions& opt) {
    if (opt.start) {
        if (opt.start->size() != system.dim())
            throw Error(ErrorKind::DimensionMismatch, "start point has wrong dimension");
        return *opt.start;
    }
    try {
        return fixed_point(system.maps[0]);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoFixedPoint) throw;
        return Vector(system.dim(), 0.0);
    }
}

void run_chain(const IfsSystem& system, std::size_t n_points, std::uint64_t seed, std::size_t burn_in,
               Vector x, PointCloud& out) {
    const std::size_t m = system.dim(), n = system.size();
    std::vector<double> a(n * m * m), b(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(system.maps[i].linear().data().begin(), system.maps[i].linear().data().end(),
                  a.begin() + static_cast<std::ptrdiff_t>(i * m * m));
        std::copy(system.maps[i].translation().begin(), system.maps[i].translation().end(),
                  b.begin() + static_cast<std::ptrdiff_t>(i * m));
    }
    out.coords.reserve(out.coords.size() + n_points * m);
    out.labels.reserve(out.labels.size() + n_points);
    SplitMix64 rng(seed);
    constexpr double bound2 = kDivergenceBound * kDivergenceBound;
    Vector y(m);
    const std::size_t total = burn_in + n_points;
    for (std::size_t it = 0; it < total; ++it) {
        const std::size_t j = rng.below(n);
        const double* aj = a.data() + j * m * m;
        const double* bj = b.data() + j * m;
        double r2 = 0.0;
        if (m == 2) {
            const double x0 = x[0], x1 = x[1];
            x[0] = aj[0] * x0 + aj[1] * x1 + bj[0];
            x[1] = aj[2] * x0 + aj[3] * x1 + bj[1];
            r2 = x[0] * x[0] + x[1] * x[1];
        } else {
            for (std::size_t r = 0; r < m; ++r) {
                double s = bj[r];
                for (std::size_t c = 0; c < m; ++c) s += aj[r * m + c] * x[c];
                y[r] = s;
                r2 += s * s;
            }
            std::swap(x, y);
        }
        if (!(r2 <= bound2))
            throw Error(ErrorKind::Divergence,
                        "divergence guard tripped: |x| > 1e9 at iterate " + std::to_string(it));
        if (it >= burn_in) out.push(x, static_cast<std::uint32_t>(j));
    }
}

}  // namespace

PointCloud chaos_game(const IfsSystem& system, const ChaosOptions& opt) {
    validate(system);
    contractivity_certificate(system, effective_L(system.size(), opt.L_max));
    PointCloud cloud;
    cloud.dim = system.dim();
    cloud.seed = opt.seed;
    cloud.burn_in = opt.burn_in;
    run_chain(system, opt.n_points, opt.seed, opt.burn_in, start_point(system, opt), cloud);
    return cloud;
}

PointCloud chaos_game_chunked(const IfsSystem& system, const ChaosOptions& opt, std::size_t chunks) {
    validate(system);
    if (chunks == 0) throw Error(ErrorKind::InvalidArgument, "chunk count must be >= 1");
    contractivity_certificate(system, effective_L(system.size(), opt.L_max));
    const Vector x0 = start_point(system, opt);
    std::vector<PointCloud> parts(chunks);
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t share = opt.n_points / chunks + (c < opt.n_points % chunks ? 1 : 0);
        parts[c].dim = system.dim();
        workers.emplace_back([&, c, share] {
            try {
                run_chain(system, share, opt.seed ^ c, opt.burn_in, x0, parts[c]);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    PointCloud cloud;
    cloud.dim = system.dim();
    cloud.seed = opt.seed;
    cloud.burn_in = opt.burn_in;
    for (const PointCloud& p : parts) {
        cloud.coords.insert(cloud.coords.end(), p.coords.begin(), p.coords.end());
        cloud.labels.insert(cloud.labels.end(), p.labels.begin(), p.labels.end());
    }
    return cloud;
}

std::pair<Vector, Vector> bounding_box(const PointCloud& cloud) {
    if (cloud.size() == 0) throw Error(ErrorKind::InvalidArgument, "bounding box of an empty cloud");
    Vector lo(cloud.dim, std::numeric_limits<double>::infinity());
    Vector hi(cloud.dim, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < cloud.coords.size(); ++i) {
        const std::size_t k = i % cloud.dim;
        lo[k] = std::min(lo[k], cloud.coords[i]);
        hi[k] = std::max(hi[k], cloud.coords[i]);
    }
    return {lo, hi};
}

PointCloud pushforward(const IfsSystem& system, const PointCloud& cloud) {
    PointCloud out;
    out.dim = cloud.dim;
    out.seed = cloud.seed;
    out.coords.reserve(cloud.coords.size() * system.size());
    for (std::size_t j = 0; j < system.size(); ++j)
        for (std::size_t i = 0; i < cloud.size(); ++i) out.push(system.maps[j](cloud.point(i)), static_cast<std::uint32_t>(j));
    return out;
}

void write_csv(std::ostream& out, const PointCloud& cloud) {
    const std::size_t m = cloud.dim;
    static const char* axes[] = {"x", "y", "z"};
    for (std::size_t k = 0; k < m; ++k) out << (m <= 3 ? std::string(axes[k]) : "x" + std::to_string(k + 1)) << ',';
    out << "label\n";
    char buf[32];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g,", cloud.coords[i * m + k]);
            out.write(buf, len);
        }
        out << cloud.labels[i] << '\n';
    }
}

void write_csv(const std::string& path, const PointCloud& cloud) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
    write_csv(f, cloud);
}

RasterFrame RasterFrame::fit(const PointCloud& cloud, int resolution) {
    if (cloud.dim != 2) throw Error(ErrorKind::NonPlanar, "rasterization needs a planar cloud");
    if (resolution < 1) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
    auto [lo, hi] = bounding_box(cloud);
    RasterFrame f;
    f.x0 = lo[0];
    f.y0 = lo[1];
    f.extent = std::max(hi[0] - lo[0], hi[1] - lo[1]);
    f.resolution = resolution;
    if (!(f.extent > 0)) throw Error(ErrorKind::Degenerate, "degenerate cloud: zero diameter");
    return f;
}

Rgb label_color(std::uint32_t label) {
    static constexpr Rgb fixed[] = {{215, 25, 28}, {43, 87, 200}, {26, 150, 65}};
    static constexpr Rgb cycle[] = {{230, 171, 2}, {117, 112, 179}, {241, 105, 19}};
    return label < 3 ? fixed[label] : cycle[(label - 3) % 3];
}

void write_ppm(std::ostream& out, const PointCloud& cloud, int resolution) {
    const RasterFrame frame = RasterFrame::fit(cloud, resolution);
    const std::size_t res = static_cast<std::size_t>(resolution);
    std::vector<std::uint8_t> img(res * res * 3, 255);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const std::size_t col = static_cast<std::size_t>(frame.column(cloud.coords[2 * i]));
        const std::size_t row = res - 1 - static_cast<std::size_t>(frame.row(cloud.coords[2 * i + 1]));
        const Rgb c = label_color(cloud.labels[i]);
        std::uint8_t* px = &img[(row * res + col) * 3];
        px[0] = c.r;
        px[1] = c.g;
        px[2] = c.b;
    }
    out << "P6\n" << resolution << ' ' << resolution << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

void write_ppm(const std::string& path, const PointCloud& cloud, int resolution) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
    write_ppm(f, cloud, resolution);
}

}  // namespace ifsdim
