#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ifsdim/system.hpp"

namespace ifsdim {

struct PointCloud {
    std::size_t dim = 2;
    std::vector<double> coords;           // flat, dim per point
    std::vector<std::uint32_t> labels;    // index of the last applied map
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;

    std::size_t size() const { return dim ? coords.size() / dim : 0; }
    std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
    void push(std::span<const double> p, std::uint32_t label);
};

struct ContractivityCertificate {
    int L = 0;
    double max_lipschitz = 0.0;
};

// Throws NotContractive when no L <= L_max works, TooLarge when n^L_max > 10^6.
ContractivityCertificate contractivity_certificate(const IfsSystem& system, int L_max = 6);

struct ChaosOptions {
    std::size_t n_points = 100000;
    std::uint64_t seed = 1;
    std::size_t burn_in = 200;
    int L_max = 6;
    std::optional<Vector> start;  // default: fixed point of maps[0]
};

inline constexpr double kDivergenceBound = 1e9;

PointCloud chaos_game(const IfsSystem& system, const ChaosOptions& options);
// Independent chains with seeds seed ^ chunk, concatenated in chunk order.
PointCloud chaos_game_chunked(const IfsSystem& system, const ChaosOptions& options, std::size_t chunks);

std::pair<Vector, Vector> bounding_box(const PointCloud& cloud);

// Pushforward ⋃ f_i(P) (labels = i).
PointCloud pushforward(const IfsSystem& system, const PointCloud& cloud);

void write_csv(std::ostream& out, const PointCloud& cloud);
void write_csv(const std::string& path, const PointCloud& cloud);

// Square raster frame over a planar cloud: pixel = floor((x - min) / extent * res),
// extent = larger side of the bounding box, so nested resolutions agree.
struct RasterFrame {
    double x0 = 0, y0 = 0, extent = 1;
    int resolution = 1;

    static RasterFrame fit(const PointCloud& cloud, int resolution);
    int column(double x) const { return clamp_index((x - x0) / extent); }
    int row(double y) const { return clamp_index((y - y0) / extent); }

private:
    int clamp_index(double t) const {
        const double v = std::floor(t * resolution);
        return v < 0 ? 0 : v >= resolution ? resolution - 1 : static_cast<int>(v);
    }
};

struct Rgb {
    std::uint8_t r, g, b;
};
Rgb label_color(std::uint32_t label);

// Square P6 image of a planar cloud, white background, one colour per label.
void write_ppm(std::ostream& out, const PointCloud& cloud, int resolution);
void write_ppm(const std::string& path, const PointCloud& cloud, int resolution);

}  // namespace ifsdim
