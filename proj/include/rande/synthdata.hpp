#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "rande/distributions.hpp"
#include "rande/grid.hpp"
#include "rande/models.hpp"

namespace rande {

// Multiplicative measurement noise: u_obs = u (1 + eps), eps ~ N(0, sigma^2).
struct NoiseModel {
    double sigma = 0.01;
};

// Everything needed to generate one synthetic aggregate dataset.
struct DataSetSpec {
    SpatialGrid space{0.0, 2.0, 101};
    TimeGrid time{0.0, 1.4, 51};
    GaussianMixtureSpec mixture = GaussianMixtureSpec::two_population();
    std::size_t gen_M_D = 30;   // generation mesh resolution
    std::size_t gen_M_rho = 60;
    double D_min = 0.0, D_max = 0.12;    // Omega_D
    double rho_min = 0.0, rho_max = 12.0;  // Omega_rho
    double sigma = 0.01;
    double t_split = 1.0;
    std::uint64_t seed = 1;
    InitialCondition ic = InitialCondition::gaussian_bump();
    OdeTols tols{};

    void validate() const;
};

// Noisy aggregate density plus provenance. The clean field rides along for
// validation work; real-data ingestion would simply leave it empty. The time
// axis is partitioned at split_index: fit times are those with index <=
// split_index, predict times come after.
struct ObservedDataSet {
    SpaceTimeField u_obs;
    std::optional<SpaceTimeField> u_clean;
    std::size_t split_index = 0;
    double snapped_t_split = 0.0;  // t_split snapped to the nearest grid time
    DataSetSpec spec;

    std::vector<std::size_t> fit_mask() const;
    std::vector<std::size_t> predict_mask() const;
    SpaceTimeField fit_window() const;
    SpaceTimeField predict_window() const;
};

// Nearest time-grid index for t (must lie inside the grid's range).
std::size_t snap_to_grid(const TimeGrid& grid, double t);

// Builds the generation mesh, discretizes the mixture, solves the coupled
// competition system over the full horizon and perturbs the aggregate with
// proportional noise. Deterministic per spec.seed.
ObservedDataSet generate_dataset(const DataSetSpec& spec);

SpaceTimeField apply_proportional_noise(const SpaceTimeField& u, const NoiseModel& model,
                                        std::uint64_t seed);

// Fit/predict restriction of the observed field at t_split, which must be a
// grid time; the split time itself belongs to the fit view. Throws when the
// predict view would be empty.
std::pair<SpaceTimeField, SpaceTimeField> split_fit_predict(const ObservedDataSet& data,
                                                            double t_split);

// Dataset directory: meta.json + u_obs.csv (+ u_clean.csv when present).
void write_dataset(const ObservedDataSet& data, const std::filesystem::path& dir);
ObservedDataSet read_dataset(const std::filesystem::path& dir);

}  // namespace rande
