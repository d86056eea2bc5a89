#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "ifsdim/attractor.hpp"
#include "ifsdim/system.hpp"

namespace ifsdim {

struct BoxCountCurve {
    std::vector<double> scales;       // descending ε
    std::vector<std::size_t> counts;  // N(ε)
    double slope = 0.0;
    double r_squared = 0.0;
    std::pair<std::size_t, std::size_t> fit_range;  // inclusive indices into scales
};

BoxCountCurve box_count(const PointCloud& cloud, int octaves = 10);
void write_csv(std::ostream& out, const BoxCountCurve& curve);

struct ConnectivityReport {
    int grid_resolution = 0;
    std::size_t component_count = 0;
    double largest_component_fraction = 0.0;
    std::size_t occupied_pixels = 0;
};

ConnectivityReport pixel_connectivity(const PointCloud& cloud, int resolution = 2048);

// Fraction of occupied pixels that receive points from two or more labels.
double label_overlap_fraction(const PointCloud& cloud, int resolution = 512);
inline constexpr double kLabelOverlapThreshold = 0.0025;

// Uniform-grid nearest-neighbour index over a planar point set.
class NearestIndex {
public:
    explicit NearestIndex(std::span<const double> xy);
    std::size_t size() const { return n_; }
    // Distance to the nearest indexed point, skipping index `skip`.
    double nearest(double x, double y, std::size_t skip = static_cast<std::size_t>(-1)) const;
    bool any_within(double x, double y, double radius) const;

private:
    std::span<const double> xy_;
    std::size_t n_ = 0;
    double x0_ = 0, y0_ = 0, cell_ = 1;
    long nx_ = 1, ny_ = 1;
    std::vector<std::size_t> start_, order_;
};

double mean_nn_spacing(const PointCloud& cloud, std::size_t max_samples = 100000);
double directed_mean_distance(std::span<const double> from, const NearestIndex& to);
double directed_max_distance(std::span<const double> from, const NearestIndex& to);
double hausdorff_distance(const PointCloud& a, const PointCloud& b);

// Resolution scale of an N-point sample: bounding-box diagonal times the largest
// Lipschitz constant over words of length floor(log_n N).
double expected_point_spacing(const IfsSystem& system, const PointCloud& cloud);

struct HomothetyScore {
    double score = 0.0;
    double tolerance = 0.0;
    double spacing = 0.0;
    double copy_to_region = 0.0;
    double region_to_copy = 0.0;
    std::size_t region_points = 0;
    bool accepted = false;
};

// Overlaps sharing one index set are checked together: the empirical region
// (points lying in at least q of the declared images) is compared with the
// union of all declared copies.
HomothetyScore homothety_check(const PointCloud& cloud, const IfsSystem& system,
                               std::span<const OverlapSpec> overlaps, std::span<const HomotheticCopy> copies);
HomothetyScore homothety_check(const PointCloud& cloud, const IfsSystem& system, const OverlapSpec& overlap,
                               const Vector& candidate_translation, double sign = 1.0);

}  // namespace ifsdim
