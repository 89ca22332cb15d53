#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rande/distributions.hpp"
#include "rande/grid.hpp"

namespace rande {

// Sum of squared differences over the cells of the masked time rows. The
// mask must be nonempty (an empty comparison is a caller bug, not zero).
double sse(const SpaceTimeField& a, const SpaceTimeField& b,
           std::span<const std::size_t> time_mask);

// Position of the rightmost crossing of level u_star, scanning from x_max
// toward x_min, linear between bracketing nodes. Empty when the level is
// never crossed.
std::optional<double> front_position(std::span<const double> u_row,
                                     const SpatialGrid& grid, double u_star);

// Traveling-wave speed per density level: the least-squares slope of front
// position against time over a window. Levels crossed at fewer than 3
// window times are flagged missing (speed = NaN).
struct WaveSpeedProfile {
    std::vector<double> levels;
    std::vector<double> speeds;
    std::vector<bool> missing;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

// The standard levels 0.25, 0.30, ..., 0.65.
std::vector<double> default_wave_levels();

WaveSpeedProfile wave_speed_profile(const SpaceTimeField& field,
                                    std::span<const double> u_stars, double t_lo,
                                    double t_hi);

// Affine map of each axis from its parameter range onto [-1, 1] (and back).
// Clustering runs in the normalized square so the rho axis does not dominate.
SampleSet normalize_samples(const SampleSet& samples, double D_min, double D_max,
                            double rho_min, double rho_max);
std::vector<Sample> denormalize_centers(const std::vector<Sample>& centers,
                                        double D_min, double D_max, double rho_min,
                                        double rho_max);

// Lloyd's algorithm with k-means++ seeding; best inertia over `restarts`
// independent runs, deterministic per seed.
struct KMeansResult {
    std::vector<Sample> centers;  // size k, in the samples' coordinate space
    double inertia = 0.0;
    std::vector<std::size_t> assignment;
};

KMeansResult kmeans(const SampleSet& samples, std::size_t k, std::size_t restarts,
                    std::uint64_t seed);

// Knee of a nonincreasing inertia curve: largest distance below the chord of
// the min-max normalized curve (Kneedle, decreasing-convex setting,
// sensitivity 1). Falls back to k_min with knee_found = false when the curve
// is too close to a straight line.
struct ElbowResult {
    std::size_t k = 1;
    bool knee_found = false;
};

ElbowResult elbow_select(std::span<const double> inertias, std::size_t k_min = 1);

// Full subpopulation-count sweep: k-means for k = 1..k_max (each k also seeded
// from the previous solution with its worst cluster split, which keeps the
// inertia curve nonincreasing), elbow selection, centers mapped back to
// physical units.
struct ClusterResult {
    std::vector<double> inertia_per_k;  // index 0 is k = 1
    std::size_t chosen_k = 1;
    bool knee_found = false;
    std::vector<Sample> centers;  // physical (D, rho) units, size chosen_k
};

ClusterResult cluster_parameter_samples(const SampleSet& samples, double D_min,
                                        double D_max, double rho_min, double rho_max,
                                        std::size_t k_max, std::size_t restarts,
                                        std::uint64_t seed);

}  // namespace rande
