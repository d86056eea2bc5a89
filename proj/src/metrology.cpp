#include "ifsdim/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <cstdio>

#include "ifsdim/error.hpp"

namespace ifsdim {

namespace {

using u128 = unsigned __int128;

// Interleave per-axis box indices (most significant bit first) into a Morton code,
// so that coarser levels are plain right shifts of the finest code.
u128 morton(const std::uint32_t* idx, std::size_t m, int bits) {
    u128 code = 0;
    for (int b = bits - 1; b >= 0; --b)
        for (std::size_t k = 0; k < m; ++k) code = (code << 1) | ((idx[k] >> b) & 1u);
    return code;
}

}  // namespace

BoxCountCurve box_count(const PointCloud& cloud, int octaves) {
    if (octaves < 4 || octaves > 12) throw Error(ErrorKind::InvalidArgument, "octaves must lie in [4, 12]");
    if (cloud.size() < 10000) throw Error(ErrorKind::InvalidArgument, "box counting needs at least 10^4 points");
    const auto [lo, hi] = bounding_box(cloud);
    const std::size_t m = cloud.dim;
    double diam = 0.0;
    for (std::size_t k = 0; k < m; ++k) diam = std::max(diam, hi[k] - lo[k]);
    if (!(diam > 0)) throw Error(ErrorKind::Degenerate, "degenerate cloud: zero diameter");

    const std::uint32_t cells = 1u << octaves;
    std::vector<u128> codes(cloud.size());
    std::vector<std::uint32_t> idx(m);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            const double t = std::floor((cloud.coords[i * m + k] - lo[k]) / diam * cells);
            idx[k] = t <= 0 ? 0u : t >= cells ? cells - 1 : static_cast<std::uint32_t>(t);
        }
        codes[i] = morton(idx.data(), m, octaves);
    }
    std::sort(codes.begin(), codes.end());

    BoxCountCurve curve;
    for (int j = 1; j <= octaves; ++j) {
        const int shift = static_cast<int>(m) * (octaves - j);
        std::size_t n = 0;
        u128 prev = 0;
        for (std::size_t i = 0; i < codes.size(); ++i) {
            const u128 c = codes[i] >> shift;
            if (i == 0 || c != prev) ++n;
            prev = c;
        }
        curve.scales.push_back(diam / std::ldexp(1.0, j));
        curve.counts.push_back(n);
    }

    curve.fit_range = {1, static_cast<std::size_t>(octaves) - 2};
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double k = static_cast<double>(curve.fit_range.second - curve.fit_range.first + 1);
    for (std::size_t i = curve.fit_range.first; i <= curve.fit_range.second; ++i) {
        const double x = -std::log(curve.scales[i]), y = std::log(static_cast<double>(curve.counts[i]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double vx = sxx - sx * sx / k, vy = syy - sy * sy / k, cxy = sxy - sx * sy / k;
    curve.slope = std::max(0.0, cxy / vx);
    curve.r_squared = vy > 0 ? std::clamp(cxy * cxy / (vx * vy), 0.0, 1.0) : 1.0;
    return curve;
}

void write_csv(std::ostream& out, const BoxCountCurve& curve) {
    out << "epsilon,count\n";
    char buf[64];
    for (std::size_t i = 0; i < curve.scales.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%zu\n", curve.scales[i], curve.counts[i]);
        out << buf;
    }
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<std::size_t> size;

    std::uint32_t make() {
        parent.push_back(static_cast<std::uint32_t>(parent.size()));
        size.push_back(0);
        return parent.back();
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

std::vector<std::uint8_t> occupancy(const PointCloud& cloud, const RasterFrame& f) {
    const std::size_t res = static_cast<std::size_t>(f.resolution);
    std::vector<std::uint8_t> occ(res * res, 0);
    for (std::size_t i = 0; i < cloud.size(); ++i)
        occ[static_cast<std::size_t>(f.row(cloud.coords[2 * i + 1])) * res +
            static_cast<std::size_t>(f.column(cloud.coords[2 * i]))] = 1;
    return occ;
}

}  // namespace

ConnectivityReport pixel_connectivity(const PointCloud& cloud, int resolution) {
    if (cloud.dim != 2) throw Error(ErrorKind::NonPlanar, "pixel connectivity needs a planar cloud");
    if (resolution < 256 || resolution > 8192)
        throw Error(ErrorKind::InvalidArgument, "resolution must lie in [256, 8192]");
    const RasterFrame frame = RasterFrame::fit(cloud, resolution);
    const std::vector<std::uint8_t> occ = occupancy(cloud, frame);
    const std::size_t res = static_cast<std::size_t>(resolution);

    // streaming two-row labelling; provisional labels merged with union-find
    constexpr std::uint32_t none = UINT32_MAX;
    std::vector<std::uint32_t> prev(res, none), cur(res, none);
    UnionFind uf;
    std::size_t occupied = 0;
    for (std::size_t y = 0; y < res; ++y) {
        for (std::size_t x = 0; x < res; ++x) {
            cur[x] = none;
            if (!occ[y * res + x]) continue;
            ++occupied;
            std::uint32_t label = none;
            const std::uint32_t nb[4] = {x > 0 ? cur[x - 1] : none, x > 0 ? prev[x - 1] : none, prev[x],
                                        x + 1 < res ? prev[x + 1] : none};
            for (std::uint32_t l : nb) {
                if (l == none) continue;
                if (label == none)
                    label = l;
                else
                    uf.unite(label, l);
            }
            if (label == none) label = uf.make();
            ++uf.size[uf.find(label)];
            cur[x] = label;
        }
        std::swap(prev, cur);
    }

    ConnectivityReport rep;
    rep.grid_resolution = resolution;
    rep.occupied_pixels = occupied;
    std::size_t largest = 0;
    for (std::uint32_t i = 0; i < uf.parent.size(); ++i)
        if (uf.find(i) == i) {
            ++rep.component_count;
            largest = std::max(largest, uf.size[i]);
        }
    rep.largest_component_fraction = occupied ? static_cast<double>(largest) / static_cast<double>(occupied) : 0.0;
    return rep;
}

double label_overlap_fraction(const PointCloud& cloud, int resolution) {
    if (cloud.dim != 2) throw Error(ErrorKind::NonPlanar, "label overlap needs a planar cloud");
    if (resolution < 64 || resolution > 2048)
        throw Error(ErrorKind::InvalidArgument, "resolution must lie in [64, 2048]");
    const RasterFrame frame = RasterFrame::fit(cloud, resolution);
    const std::size_t res = static_cast<std::size_t>(resolution);
    std::vector<std::uint64_t> mask(res * res, 0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (cloud.labels[i] >= 64) throw Error(ErrorKind::InvalidArgument, "label overlap supports < 64 maps");
        mask[static_cast<std::size_t>(frame.row(cloud.coords[2 * i + 1])) * res +
             static_cast<std::size_t>(frame.column(cloud.coords[2 * i]))] |= std::uint64_t{1} << cloud.labels[i];
    }
    std::size_t occupied = 0, shared = 0;
    for (std::uint64_t m : mask) {
        if (!m) continue;
        ++occupied;
        if (m & (m - 1)) ++shared;
    }
    return occupied ? static_cast<double>(shared) / static_cast<double>(occupied) : 0.0;
}

NearestIndex::NearestIndex(std::span<const double> xy) : xy_(xy), n_(xy.size() / 2) {
    if (n_ == 0) throw Error(ErrorKind::InvalidArgument, "nearest-neighbour index over no points");
    double x1 = xy[0], y1 = xy[1];
    x0_ = x1;
    y0_ = y1;
    for (std::size_t i = 0; i < n_; ++i) {
        x0_ = std::min(x0_, xy[2 * i]);
        y0_ = std::min(y0_, xy[2 * i + 1]);
        x1 = std::max(x1, xy[2 * i]);
        y1 = std::max(y1, xy[2 * i + 1]);
    }
    const double extent = std::max({x1 - x0_, y1 - y0_, 1e-300});
    cell_ = extent / std::max(1.0, std::floor(std::sqrt(static_cast<double>(n_))));
    nx_ = static_cast<long>((x1 - x0_) / cell_) + 1;
    ny_ = static_cast<long>((y1 - y0_) / cell_) + 1;
    const std::size_t cells = static_cast<std::size_t>(nx_ * ny_);
    std::vector<std::size_t> cell_of(n_);
    start_.assign(cells + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) {
        const long cx = std::min(nx_ - 1, static_cast<long>((xy[2 * i] - x0_) / cell_));
        const long cy = std::min(ny_ - 1, static_cast<long>((xy[2 * i + 1] - y0_) / cell_));
        cell_of[i] = static_cast<std::size_t>(cy * nx_ + cx);
        ++start_[cell_of[i] + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    order_.resize(n_);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < n_; ++i) order_[fill[cell_of[i]]++] = i;
}

double NearestIndex::nearest(double x, double y, std::size_t skip) const {
    const long cx = std::clamp(static_cast<long>(std::floor((x - x0_) / cell_)), 0L, nx_ - 1);
    const long cy = std::clamp(static_cast<long>(std::floor((y - y0_) / cell_)), 0L, ny_ - 1);
    // distance from the query to the grid, so ring bounds stay valid for outside queries
    const double ox = std::max({x0_ - x, x - (x0_ + nx_ * cell_), 0.0});
    const double oy = std::max({y0_ - y, y - (y0_ + ny_ * cell_), 0.0});
    double best2 = INFINITY;
    auto scan_row = [&](long gy, long gx0, long gx1) {
        if (gy < 0 || gy >= ny_) return;
        gx0 = std::max(gx0, 0L);
        gx1 = std::min(gx1, nx_ - 1);
        for (long gx = gx0; gx <= gx1; ++gx) {
            const std::size_t c = static_cast<std::size_t>(gy * nx_ + gx);
            for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
                const std::size_t i = order_[k];
                if (i == skip) continue;
                const double dx = xy_[2 * i] - x, dy = xy_[2 * i + 1] - y;
                best2 = std::min(best2, dx * dx + dy * dy);
            }
        }
    };
    auto scan_col = [&](long gx, long gy0, long gy1) {
        if (gx < 0 || gx >= nx_) return;
        for (long gy = std::max(gy0, 0L); gy <= std::min(gy1, ny_ - 1); ++gy) scan_row(gy, gx, gx);
    };
    const long rmax = std::max(nx_, ny_);
    for (long r = 0; r <= rmax; ++r) {
        // an unscanned cell is >= r-1 cells away along one axis, plus the query's offset from the grid
        if (r > 0) {
            const double d = (r - 1.0) * cell_;
            const double bound2 = std::min((ox + d) * (ox + d) + oy * oy, ox * ox + (oy + d) * (oy + d));
            if (best2 <= bound2) break;
        }
        if (r == 0) {
            scan_row(cy, cx, cx);
            continue;
        }
        scan_row(cy - r, cx - r, cx + r);
        scan_row(cy + r, cx - r, cx + r);
        scan_col(cx - r, cy - r + 1, cy + r - 1);
        scan_col(cx + r, cy - r + 1, cy + r - 1);
        if (cx - r < 0 && cy - r < 0 && cx + r >= nx_ && cy + r >= ny_) break;
    }
    return std::sqrt(best2);
}

bool NearestIndex::any_within(double x, double y, double radius) const {
    const double r2 = radius * radius;
    const long gx0 = std::max(0L, static_cast<long>(std::floor((x - radius - x0_) / cell_)));
    const long gx1 = std::min(nx_ - 1, static_cast<long>(std::floor((x + radius - x0_) / cell_)));
    const long gy0 = std::max(0L, static_cast<long>(std::floor((y - radius - y0_) / cell_)));
    const long gy1 = std::min(ny_ - 1, static_cast<long>(std::floor((y + radius - y0_) / cell_)));
    for (long gy = gy0; gy <= gy1; ++gy)
        for (long gx = gx0; gx <= gx1; ++gx) {
            const std::size_t c = static_cast<std::size_t>(gy * nx_ + gx);
            for (std::size_t k = start_[c]; k < start_[c + 1]; ++k) {
                const std::size_t i = order_[k];
                const double dx = xy_[2 * i] - x, dy = xy_[2 * i + 1] - y;
                if (dx * dx + dy * dy <= r2) return true;
            }
        }
    return false;
}

double mean_nn_spacing(const PointCloud& cloud, std::size_t max_samples) {
    if (cloud.dim != 2) throw Error(ErrorKind::NonPlanar, "nearest-neighbour spacing needs a planar cloud");
    if (cloud.size() < 2) throw Error(ErrorKind::InvalidArgument, "spacing needs at least two points");
    const NearestIndex index(cloud.coords);
    const std::size_t stride = std::max<std::size_t>(1, cloud.size() / std::max<std::size_t>(1, max_samples));
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < cloud.size(); i += stride, ++n)
        sum += index.nearest(cloud.coords[2 * i], cloud.coords[2 * i + 1], i);
    return sum / static_cast<double>(n);
}

double directed_mean_distance(std::span<const double> from, const NearestIndex& to) {
    double sum = 0.0;
    const std::size_t n = from.size() / 2;
    for (std::size_t i = 0; i < n; ++i) sum += to.nearest(from[2 * i], from[2 * i + 1]);
    return n ? sum / static_cast<double>(n) : 0.0;
}

double directed_max_distance(std::span<const double> from, const NearestIndex& to) {
    double worst = 0.0;
    for (std::size_t i = 0; i < from.size() / 2; ++i) worst = std::max(worst, to.nearest(from[2 * i], from[2 * i + 1]));
    return worst;
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
    if (a.dim != 2 || b.dim != 2) throw Error(ErrorKind::NonPlanar, "Hausdorff distance implemented for planar clouds");
    const NearestIndex ia(a.coords), ib(b.coords);
    return std::max(directed_max_distance(a.coords, ib), directed_max_distance(b.coords, ia));
}

double expected_point_spacing(const IfsSystem& system, const PointCloud& cloud) {
    const auto [lo, hi] = bounding_box(cloud);
    const double diag = norm(hi - lo);
    const std::size_t n = system.size();
    int L = n > 1 ? static_cast<int>(std::floor(std::log(static_cast<double>(cloud.size())) /
                                                std::log(static_cast<double>(n))))
                  : 1;
    L = std::max(L, 1);
    while (L > 1 && word_count(n, L) > kMaxWords) --L;
    double worst = 0.0;
    for_each_word(system.maps, L, [&](const Word&, const AffineMap& h) {
        worst = std::max(worst, singular_values(h.linear())[0]);
    });
    return diag * worst;
}

HomothetyScore homothety_check(const PointCloud& cloud, const IfsSystem& system,
                               std::span<const OverlapSpec> overlaps, std::span<const HomotheticCopy> copies) {
    if (cloud.dim != 2 || system.dim() != 2) throw Error(ErrorKind::NonPlanar, "homothety check needs a planar cloud");
    if (overlaps.empty() || copies.empty())
        throw Error(ErrorKind::InvalidArgument, "homothety check needs a declared overlap and a candidate copy");
    std::vector<std::size_t> ids = overlaps[0].indices;
    std::sort(ids.begin(), ids.end());
    for (const OverlapSpec& o : overlaps) {
        std::vector<std::size_t> other = o.indices;
        std::sort(other.begin(), other.end());
        if (other != ids) throw Error(ErrorKind::InvalidArgument, "grouped overlaps must share one index set");
        for (std::size_t i : o.indices)
            if (i >= system.size()) throw Error(ErrorKind::InvalidArgument, "overlap index out of range");
    }
    const std::size_t q = static_cast<std::size_t>(overlaps[0].multiplicity_q);

    HomothetyScore out;
    const NearestIndex index(cloud.coords);
    out.spacing = mean_nn_spacing(cloud);
    out.tolerance = 1.5 * out.spacing;

    std::vector<AffineMap> inverses;
    std::vector<double> stretch;
    for (std::size_t i : ids) {
        inverses.push_back(inverse(system.maps[i]));
        stretch.push_back(singular_values(system.maps[i].linear())[0]);
    }
    // p lies in f_i(A) when f_i^{-1}(p) is near the sample (distance pushed forward by σ_max)
    std::vector<double> region;
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        const auto p = cloud.point(k);
        std::size_t hits = 0;
        for (std::size_t j = 0; j < ids.size(); ++j) {
            const Vector pre = inverses[j](p);
            if (index.any_within(pre[0], pre[1], out.tolerance / stretch[j])) ++hits;
        }
        if (hits >= q) region.insert(region.end(), p.begin(), p.end());
    }
    out.region_points = region.size() / 2;
    if (region.empty())
        throw Error(ErrorKind::EmptyOverlap, "empty empirical overlap region: no sample point lies in " +
                                                 std::to_string(q) + " of the declared images");

    std::vector<double> copy;
    copy.reserve(cloud.coords.size() * copies.size());
    for (const HomotheticCopy& h : copies) {
        if (h.translation.size() != 2) throw Error(ErrorKind::DimensionMismatch, "copy translation must be 2D");
        for (std::size_t k = 0; k < cloud.size(); ++k) {
            copy.push_back(h.lambda * cloud.coords[2 * k] + h.translation[0]);
            copy.push_back(h.lambda * cloud.coords[2 * k + 1] + h.translation[1]);
        }
    }
    const NearestIndex region_index(region), copy_index(copy);
    out.copy_to_region = directed_mean_distance(copy, region_index);
    out.region_to_copy = directed_mean_distance(region, copy_index);
    out.score = std::max(out.copy_to_region, out.region_to_copy);
    out.accepted = out.score <= out.tolerance;
    return out;
}

HomothetyScore homothety_check(const PointCloud& cloud, const IfsSystem& system, const OverlapSpec& overlap,
                               const Vector& candidate_translation, double sign) {
    const HomotheticCopy copy{sign < 0 ? -overlap.scale_p : overlap.scale_p, candidate_translation};
    return homothety_check(cloud, system, std::span<const OverlapSpec>(&overlap, 1),
                           std::span<const HomotheticCopy>(&copy, 1));
}

}  // namespace ifsdim
