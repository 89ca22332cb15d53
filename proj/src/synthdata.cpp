#include "rande/synthdata.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rande/io_util.hpp"
#include "rande/json_io.hpp"
#include "rande/rng.hpp"

namespace rande {

void DataSetSpec::validate() const {
    mixture.validate();
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("DataSetSpec: sigma must be nonnegative");
    }
    if (!(t_split > time.t_min) || !(t_split < time.t_max)) {
        throw std::invalid_argument("DataSetSpec: t_split must lie strictly inside the time range");
    }
    if (gen_M_D < 2 || gen_M_rho < 2) {
        throw std::invalid_argument("DataSetSpec: generation mesh needs at least 2 nodes per axis");
    }
}

std::vector<std::size_t> ObservedDataSet::fit_mask() const {
    std::vector<std::size_t> m(split_index + 1);
    for (std::size_t j = 0; j <= split_index; ++j) m[j] = j;
    return m;
}

std::vector<std::size_t> ObservedDataSet::predict_mask() const {
    std::vector<std::size_t> m;
    for (std::size_t j = split_index + 1; j < u_obs.n_t(); ++j) m.push_back(j);
    return m;
}

namespace {

SpaceTimeField window(const SpaceTimeField& f, std::size_t first, std::size_t last) {
    TimeGrid tg(f.time.t(first), f.time.t(last), last - first + 1);
    SpaceTimeField out(tg, f.space);
    for (std::size_t j = first; j <= last; ++j) {
        auto src = f.row(j);
        std::copy(src.begin(), src.end(), out.row(j - first).begin());
    }
    return out;
}

}  // namespace

SpaceTimeField ObservedDataSet::fit_window() const {
    return window(u_obs, 0, split_index);
}

SpaceTimeField ObservedDataSet::predict_window() const {
    if (split_index + 1 >= u_obs.n_t()) {
        throw std::invalid_argument("ObservedDataSet: empty predict window");
    }
    return window(u_obs, split_index + 1, u_obs.n_t() - 1);
}

std::size_t snap_to_grid(const TimeGrid& grid, double t) {
    if (t < grid.t_min || t > grid.t_max) {
        throw std::invalid_argument("snap_to_grid: t outside the grid range");
    }
    double s = (t - grid.t_min) / grid.dt();
    auto idx = static_cast<std::size_t>(std::llround(s));
    return std::min(idx, grid.n_points - 1);
}

ObservedDataSet generate_dataset(const DataSetSpec& spec) {
    spec.validate();
    ParameterMesh mesh = build_mesh(spec.D_min, spec.D_max, spec.gen_M_D,
                                    spec.rho_min, spec.rho_max, spec.gen_M_rho);
    WeightVector weights = discretize_mixture(spec.mixture, mesh);

    std::vector<PhenotypeNode> nodes(mesh.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto [D, rho] = mesh.node(i);
        nodes[i] = {D, rho, 1.0};
    }

    CoupledSolution sol;
    try {
        sol = solve_coupled_competition(nodes, weights, spec.ic, spec.space,
                                        spec.time, spec.tols);
    } catch (const SolverFailure& e) {
        throw SolverFailure("generate_dataset: forward solve failed (" +
                                std::string(e.what()) + ")",
                            e.t_last());
    }

    ObservedDataSet data;
    data.spec = spec;
    data.u_clean = std::move(sol.aggregate);
    data.u_obs = apply_proportional_noise(*data.u_clean, NoiseModel{spec.sigma},
                                          derive_seed(spec.seed, "noise"));
    data.split_index = snap_to_grid(spec.time, spec.t_split);
    if (data.split_index == 0 || data.split_index + 1 >= spec.time.n_points) {
        throw std::invalid_argument("generate_dataset: t_split snaps to a boundary");
    }
    data.snapped_t_split = spec.time.t(data.split_index);
    return data;
}

SpaceTimeField apply_proportional_noise(const SpaceTimeField& u, const NoiseModel& model,
                                        std::uint64_t seed) {
    if (!(model.sigma >= 0.0)) {
        throw std::invalid_argument("apply_proportional_noise: sigma must be nonnegative");
    }
    SpaceTimeField out = u;
    if (model.sigma == 0.0) return out;
    Rng rng(seed);
    for (double& v : out.values) {
        v *= 1.0 + model.sigma * rng.normal();
    }
    return out;
}

std::pair<SpaceTimeField, SpaceTimeField> split_fit_predict(const ObservedDataSet& data,
                                                            double t_split) {
    const TimeGrid& tg = data.u_obs.time;
    double s = (t_split - tg.t_min) / tg.dt();
    double nearest = std::round(s);
    if (std::abs(s - nearest) > 1e-9 || nearest < 0.0 ||
        nearest > static_cast<double>(tg.n_points - 1)) {
        throw std::invalid_argument("split_fit_predict: t_split is not a grid time");
    }
    auto idx = static_cast<std::size_t>(nearest);
    if (idx + 1 >= tg.n_points) {
        throw std::invalid_argument("split_fit_predict: predict view would be empty");
    }
    return {window(data.u_obs, 0, idx), window(data.u_obs, idx + 1, tg.n_points - 1)};
}

namespace {

nlohmann::json spec_to_json(const DataSetSpec& spec) {
    return {{"space", spec.space},
            {"time", spec.time},
            {"mixture", spec.mixture},
            {"gen_M_D", spec.gen_M_D},
            {"gen_M_rho", spec.gen_M_rho},
            {"D_min", spec.D_min},
            {"D_max", spec.D_max},
            {"rho_min", spec.rho_min},
            {"rho_max", spec.rho_max},
            {"sigma", spec.sigma},
            {"t_split", spec.t_split},
            {"seed", spec.seed},
            {"ic", spec.ic},
            {"tols", spec.tols}};
}

DataSetSpec spec_from_json(const nlohmann::json& j) {
    DataSetSpec spec;
    if (j.contains("space")) j.at("space").get_to(spec.space);
    if (j.contains("time")) j.at("time").get_to(spec.time);
    if (j.contains("mixture")) j.at("mixture").get_to(spec.mixture);
    spec.gen_M_D = j.value("gen_M_D", spec.gen_M_D);
    spec.gen_M_rho = j.value("gen_M_rho", spec.gen_M_rho);
    spec.D_min = j.value("D_min", spec.D_min);
    spec.D_max = j.value("D_max", spec.D_max);
    spec.rho_min = j.value("rho_min", spec.rho_min);
    spec.rho_max = j.value("rho_max", spec.rho_max);
    spec.sigma = j.value("sigma", spec.sigma);
    spec.t_split = j.value("t_split", spec.t_split);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("ic")) j.at("ic").get_to(spec.ic);
    if (j.contains("tols")) j.at("tols").get_to(spec.tols);
    return spec;
}

}  // namespace

void write_dataset(const ObservedDataSet& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json meta = {
        {"spec", spec_to_json(data.spec)},
        {"split_index", data.split_index},
        {"snapped_t_split", data.snapped_t_split},
        {"has_clean", data.u_clean.has_value()},
        {"space", data.u_obs.space},
        {"time", data.u_obs.time},
    };
    atomic_write_text(dir / "meta.json", meta.dump(2) + "\n");
    write_matrix_csv(dir / "u_obs.csv", data.u_obs.values, data.u_obs.n_t(),
                     data.u_obs.n_x());
    if (data.u_clean) {
        write_matrix_csv(dir / "u_clean.csv", data.u_clean->values,
                         data.u_clean->n_t(), data.u_clean->n_x());
    }
}

ObservedDataSet read_dataset(const std::filesystem::path& dir) {
    nlohmann::json meta = nlohmann::json::parse(read_text(dir / "meta.json"));
    ObservedDataSet data;
    data.spec = spec_from_json(meta.at("spec"));
    SpatialGrid space = meta.at("space").get<SpatialGrid>();
    TimeGrid time = meta.at("time").get<TimeGrid>();
    data.split_index = meta.at("split_index").get<std::size_t>();
    data.snapped_t_split = meta.at("snapped_t_split").get<double>();
    data.u_obs = SpaceTimeField(
        time, space, read_matrix_csv(dir / "u_obs.csv", time.n_points, space.n_points));
    if (meta.at("has_clean").get<bool>()) {
        data.u_clean = SpaceTimeField(
            time, space,
            read_matrix_csv(dir / "u_clean.csv", time.n_points, space.n_points));
    }
    return data;
}

}  // namespace rande
