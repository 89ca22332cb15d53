#include "rande/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "rande/analysis.hpp"
#include "rande/io_util.hpp"
#include "rande/json_io.hpp"
#include "rande/parallel.hpp"
#include "rande/rng.hpp"
#include "rande/version.hpp"

namespace rande {

namespace fs = std::filesystem;

PrmfSweepConfig::PrmfSweepConfig() {
    for (std::size_t mD : {5, 10, 20}) {
        for (std::size_t mR : {5, 10, 20}) {
            candidate_dims.emplace_back(mD, mR);
        }
    }
}

AnalyzeConfig::AnalyzeConfig() : u_stars(default_wave_levels()) {}

namespace {

double json_get(const nlohmann::json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::size_t json_get(const nlohmann::json& j, const char* key, std::size_t fallback) {
    return j.contains(key) ? j.at(key).get<std::size_t>() : fallback;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
        if (j.contains("output")) c.output = j.at("output").get<std::string>();

        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            if (d.contains("space")) d.at("space").get_to(c.dataset.space);
            if (d.contains("time")) d.at("time").get_to(c.dataset.time);
            if (d.contains("mixture")) d.at("mixture").get_to(c.dataset.mixture);
            c.dataset.gen_M_D = json_get(d, "gen_M_D", c.dataset.gen_M_D);
            c.dataset.gen_M_rho = json_get(d, "gen_M_rho", c.dataset.gen_M_rho);
            c.dataset.D_min = json_get(d, "D_min", c.dataset.D_min);
            c.dataset.D_max = json_get(d, "D_max", c.dataset.D_max);
            c.dataset.rho_min = json_get(d, "rho_min", c.dataset.rho_min);
            c.dataset.rho_max = json_get(d, "rho_max", c.dataset.rho_max);
            c.dataset.sigma = json_get(d, "sigma", c.dataset.sigma);
            c.dataset.t_split = json_get(d, "t_split", c.dataset.t_split);
            if (d.contains("ic")) d.at("ic").get_to(c.dataset.ic);
            if (d.contains("tols")) d.at("tols").get_to(c.dataset.tols);
        }
        if (j.contains("basis")) {
            const auto& b = j.at("basis");
            c.basis.M_D = json_get(b, "M_D", c.basis.M_D);
            c.basis.M_rho = json_get(b, "M_rho", c.basis.M_rho);
            if (b.contains("tols")) b.at("tols").get_to(c.basis.tols);
        }
        if (j.contains("prmf")) {
            const auto& p = j.at("prmf");
            if (p.contains("candidate_dims")) {
                c.prmf.candidate_dims.clear();
                for (const auto& pair : p.at("candidate_dims")) {
                    c.prmf.candidate_dims.emplace_back(pair.at(0).get<std::size_t>(),
                                                       pair.at(1).get<std::size_t>());
                }
            }
            c.prmf.n_starts = json_get(p, "n_starts", c.prmf.n_starts);
            c.prmf.tol = json_get(p, "tol", c.prmf.tol);
            c.prmf.max_iter = json_get(p, "max_iter", c.prmf.max_iter);
        }
        if (j.contains("pde")) {
            const auto& p = j.at("pde");
            if (p.contains("subpopulations")) {
                p.at("subpopulations").get_to(c.pde.subpopulations);
            }
            c.pde.bounds.D_min = json_get(p, "D_min", c.pde.bounds.D_min);
            c.pde.bounds.D_max = json_get(p, "D_max", c.pde.bounds.D_max);
            c.pde.bounds.rho_min = json_get(p, "rho_min", c.pde.bounds.rho_min);
            c.pde.bounds.rho_max = json_get(p, "rho_max", c.pde.bounds.rho_max);
            c.pde.n_starts = json_get(p, "n_starts", c.pde.n_starts);
            c.pde.max_evals = json_get(p, "max_evals", c.pde.max_evals);
            c.pde.tol = json_get(p, "tol", c.pde.tol);
            if (p.contains("tols")) p.at("tols").get_to(c.pde.tols);
        }
        if (j.contains("analyze")) {
            const auto& a = j.at("analyze");
            if (a.contains("u_stars")) a.at("u_stars").get_to(c.analyze.u_stars);
            c.analyze.fit_window_lo = json_get(a, "fit_window_lo", c.analyze.fit_window_lo);
            c.analyze.fit_window_hi = json_get(a, "fit_window_hi", c.analyze.fit_window_hi);
            c.analyze.H = json_get(a, "H", c.analyze.H);
            c.analyze.k_max = json_get(a, "k_max", c.analyze.k_max);
            c.analyze.kmeans_restarts =
                json_get(a, "kmeans_restarts", c.analyze.kmeans_restarts);
            if (a.contains("tols")) a.at("tols").get_to(c.analyze.tols);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    // The dataset seed is always derived from the run seed.
    c.dataset.seed = derive_seed(c.seed, "generate");
    return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json dims = nlohmann::json::array();
    for (auto [a, b] : c.prmf.candidate_dims) {
        dims.push_back({a, b});
    }
    return {
        {"seed", c.seed},
        {"threads", c.threads},
        {"output", c.output.generic_string()},
        {"dataset",
         {{"space", c.dataset.space},
          {"time", c.dataset.time},
          {"mixture", c.dataset.mixture},
          {"gen_M_D", c.dataset.gen_M_D},
          {"gen_M_rho", c.dataset.gen_M_rho},
          {"D_min", c.dataset.D_min},
          {"D_max", c.dataset.D_max},
          {"rho_min", c.dataset.rho_min},
          {"rho_max", c.dataset.rho_max},
          {"sigma", c.dataset.sigma},
          {"t_split", c.dataset.t_split},
          {"seed", c.dataset.seed},
          {"ic", c.dataset.ic},
          {"tols", c.dataset.tols}}},
        {"basis",
         {{"M_D", c.basis.M_D}, {"M_rho", c.basis.M_rho}, {"tols", c.basis.tols}}},
        {"prmf",
         {{"candidate_dims", dims},
          {"n_starts", c.prmf.n_starts},
          {"tol", c.prmf.tol},
          {"max_iter", c.prmf.max_iter}}},
        {"pde",
         {{"subpopulations", c.pde.subpopulations},
          {"D_min", c.pde.bounds.D_min},
          {"D_max", c.pde.bounds.D_max},
          {"rho_min", c.pde.bounds.rho_min},
          {"rho_max", c.pde.bounds.rho_max},
          {"n_starts", c.pde.n_starts},
          {"max_evals", c.pde.max_evals},
          {"tol", c.pde.tol},
          {"tols", c.pde.tols}}},
        {"analyze",
         {{"u_stars", c.analyze.u_stars},
          {"fit_window_lo", c.analyze.fit_window_lo},
          {"fit_window_hi", c.analyze.fit_window_hi},
          {"H", c.analyze.H},
          {"k_max", c.analyze.k_max},
          {"kmeans_restarts", c.analyze.kmeans_restarts},
          {"tols", c.analyze.tols}}},
    };
}

std::string config_hash(const RunConfig& config) {
    nlohmann::json j = config_to_json(config);
    j.erase("output");   // where a run lives does not change what it computes
    j.erase("threads");  // parallelism does not change results
    return hash_bytes(j.dump());
}

namespace {

struct StageTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void update_manifest(const RunConfig& config, const std::string& stage,
                     nlohmann::json entry) {
    fs::path path = config.output / "manifest.json";
    nlohmann::json manifest;
    if (fs::exists(path)) {
        manifest = nlohmann::json::parse(read_text(path));
    }
    manifest["tool_version"] = std::string(kToolVersion);
    manifest["config_hash"] = config_hash(config);
    manifest["config_file"] = "config.json";
    manifest["stages"][stage] = std::move(entry);
    atomic_write_text(path, manifest.dump(2) + "\n");
}

void write_resolved_config(const RunConfig& config) {
    fs::create_directories(config.output);
    atomic_write_text(config.output / "config.json",
                      config_to_json(config).dump(2) + "\n");
}

nlohmann::json hash_inputs(const fs::path& root, const std::vector<std::string>& rel) {
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& r : rel) {
        inputs[r] = hash_file(root / r);
    }
    return inputs;
}

void require_exists(const fs::path& p, const std::string& hint) {
    if (!fs::exists(p)) {
        throw ConfigError("missing input " + p.string() + " (" + hint + ")");
    }
}

nlohmann::json prmf_result_to_json(const PrmfFitResult& r) {
    return {{"M_D", r.M_D()},        {"M_rho", r.M_rho()},
            {"mesh", r.mesh},        {"weights", r.weights},
            {"sse_fit", r.sse_fit},  {"aic", r.aic},
            {"converged", r.converged}, {"per_start_sse", r.per_start_sse}};
}

PrmfFitResult prmf_result_from_json(const nlohmann::json& j) {
    PrmfFitResult r;
    j.at("mesh").get_to(r.mesh);
    j.at("weights").get_to(r.weights);
    r.sse_fit = j.at("sse_fit").get<double>();
    r.aic = j.value("aic", 0.0);
    r.converged = j.value("converged", true);
    if (j.contains("per_start_sse")) j.at("per_start_sse").get_to(r.per_start_sse);
    return r;
}

nlohmann::json pde_result_to_json(const PointwiseFitResult& r) {
    return {{"M", r.nodes.size()},   {"nodes", r.nodes},
            {"weights", r.weights},  {"sse_fit", r.sse_fit},
            {"aic", r.aic},          {"per_start_sse", r.per_start_sse},
            {"n_evals", r.n_evals}};
}

PointwiseFitResult pde_result_from_json(const nlohmann::json& j) {
    PointwiseFitResult r;
    j.at("nodes").get_to(r.nodes);
    j.at("weights").get_to(r.weights);
    r.sse_fit = j.at("sse_fit").get<double>();
    r.aic = j.value("aic", 0.0);
    if (j.contains("per_start_sse")) j.at("per_start_sse").get_to(r.per_start_sse);
    r.n_evals = j.value("n_evals", std::size_t{0});
    return r;
}

std::string wave_profile_csv(const WaveSpeedProfile& p) {
    std::string text = "level,speed,missing\n";
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
        text += format_double(p.levels[i]);
        text += ',';
        text += p.missing[i] ? "" : format_double(p.speeds[i]);
        text += ',';
        text += p.missing[i] ? "1" : "0";
        text += '\n';
    }
    return text;
}

InitialCondition observed_initial_profile(const ObservedDataSet& data) {
    ScalarField c0(data.u_obs.row(0).begin(), data.u_obs.row(0).end());
    for (double& v : c0) v = std::clamp(v, 0.0, 1.0);
    return InitialCondition::custom(std::move(c0));
}

}  // namespace

void cmd_generate(const RunConfig& config, bool force) {
    fs::path dir = config.output / "dataset";
    if (fs::exists(dir / "meta.json") && !force) {
        throw ConfigError("dataset already exists at " + dir.string() +
                          "; pass --force to overwrite");
    }
    StageTimer timer;
    write_resolved_config(config);
    ObservedDataSet data = generate_dataset(config.dataset);
    write_dataset(data, dir);

    std::vector<std::string> outputs = {"dataset/meta.json", "dataset/u_obs.csv"};
    if (data.u_clean) outputs.push_back("dataset/u_clean.csv");
    update_manifest(config, "generate",
                    {{"inputs", nlohmann::json::object()},
                     {"outputs", outputs},
                     {"wall_seconds", timer.seconds()},
                     {"snapped_t_split", data.snapped_t_split},
                     {"dataset_id", hash_file(dir / "meta.json")}});
}

void cmd_basis(const RunConfig& config) {
    fs::path dataset_dir = config.output / "dataset";
    require_exists(dataset_dir / "meta.json", "run `generate` first");
    StageTimer timer;
    write_resolved_config(config);

    ObservedDataSet data = read_dataset(dataset_dir);
    SpaceTimeField fit = data.fit_window();
    ParameterMesh mesh =
        build_mesh(data.spec.D_min, data.spec.D_max, config.basis.M_D,
                   data.spec.rho_min, data.spec.rho_max, config.basis.M_rho);

    std::vector<double> node_seconds;
    BasisLibrary lib =
        build_basis_library(fit, mesh, config.basis.tols,
                            resolve_threads(config.threads), &node_seconds);
    lib.provenance.dataset_id = hash_file(dataset_dir / "meta.json");

    fs::path dir = config.output / "library";
    write_library(lib, dir);

    std::vector<std::string> outputs = {"library/library.json"};
    for (std::size_t a = 0; a < lib.mesh.D_nodes.size(); ++a) {
        for (std::size_t b = 0; b < lib.mesh.rho_nodes.size(); ++b) {
            outputs.push_back("library/c_" + std::to_string(a) + "_" +
                              std::to_string(b) + ".csv");
        }
    }
    update_manifest(config, "basis",
                    {{"inputs", hash_inputs(config.output,
                                            {"dataset/meta.json", "dataset/u_obs.csv"})},
                     {"outputs", outputs},
                     {"wall_seconds", timer.seconds()},
                     {"node_seconds", node_seconds}});
}

void cmd_fit(const RunConfig& config, const std::string& method) {
    if (method != "prmf" && method != "pde") {
        throw ConfigError("unknown fit method '" + method + "' (expected prmf or pde)");
    }
    fs::path dataset_dir = config.output / "dataset";
    require_exists(dataset_dir / "meta.json", "run `generate` first");
    StageTimer timer;
    write_resolved_config(config);

    ObservedDataSet data = read_dataset(dataset_dir);
    SpaceTimeField fit = data.fit_window();
    fs::path fits_dir = config.output / "fits";
    fs::create_directories(fits_dir);
    std::vector<std::string> outputs;

    if (method == "prmf") {
        require_exists(config.output / "library" / "library.json",
                       "run `basis` first");
        BasisLibrary lib = read_library(config.output / "library");

        PrmfFitConfig fit_config;
        fit_config.n_starts = config.prmf.n_starts;
        fit_config.tol = config.prmf.tol;
        fit_config.max_iter = config.prmf.max_iter;
        fit_config.threads = resolve_threads(config.threads);

        std::vector<PrmfFitResult> results;
        for (auto [mD, mR] : config.prmf.candidate_dims) {
            BasisLibrary sub = subsample_library(lib, mD, mR);
            fit_config.seed = derive_seed(
                config.seed, "fit_prmf:" + std::to_string(mD) + "x" + std::to_string(mR));
            PrmfFitResult r = fit_prmf(sub, fit, fit_config);
            std::string name =
                "prmf_" + std::to_string(mD) + "x" + std::to_string(mR) + ".json";
            atomic_write_text(fits_dir / name, prmf_result_to_json(r).dump(2) + "\n");
            outputs.push_back("fits/" + name);
            results.push_back(std::move(r));
            if (!std::isfinite(results.back().aic)) {
                std::cerr << "warning: prmf " << mD << "x" << mR
                          << " reaches sse = 0; AIC degenerates to -inf\n";
            }
        }
        const PrmfFitResult& best = select_model(results);

        std::string table = "M_D,M_rho,n_params,sse_fit,aic,selected\n";
        for (const auto& r : results) {
            bool selected = &r == &best;
            table += std::to_string(r.M_D()) + "," + std::to_string(r.M_rho()) + "," +
                     std::to_string(r.n_params()) + "," + format_double(r.sse_fit) +
                     "," + format_double(r.aic) + "," + (selected ? "1" : "0") + "\n";
        }
        atomic_write_text(fits_dir / "prmf_aic_table.csv", table);
        outputs.push_back("fits/prmf_aic_table.csv");
        atomic_write_text(fits_dir / "prmf_selected.json",
                          prmf_result_to_json(best).dump(2) + "\n");
        outputs.push_back("fits/prmf_selected.json");
    } else {
        PointwiseFitResult previous;
        bool have_previous = false;
        std::vector<std::size_t> Ms = config.pde.subpopulations;
        std::sort(Ms.begin(), Ms.end());
        for (std::size_t M : Ms) {
            PointwiseFitConfig fc;
            fc.M = M;
            fc.bounds = config.pde.bounds;
            fc.n_starts = config.pde.n_starts;
            fc.max_evals = config.pde.max_evals;
            fc.tol = config.pde.tol;
            fc.seed = derive_seed(config.seed, "fit_pde:M" + std::to_string(M));
            fc.threads = resolve_threads(config.threads);
            if (have_previous && previous.nodes.size() < M) {
                // Seed one start with the smaller model's optimum padded by
                // negligible-weight fillers; keeps SSE nested across M.
                fc.extra_starts.push_back(
                    pad_pointwise_start(previous, M, config.pde.bounds));
            }
            PointwiseFitResult r = fit_pointwise(fit, fc, config.pde.tols);
            std::string name = "pde_M" + std::to_string(M) + ".json";
            atomic_write_text(fits_dir / name, pde_result_to_json(r).dump(2) + "\n");
            outputs.push_back("fits/" + name);
            previous = std::move(r);
            have_previous = true;
        }
    }

    std::vector<std::string> inputs = {"dataset/meta.json", "dataset/u_obs.csv"};
    if (method == "prmf") inputs.push_back("library/library.json");
    update_manifest(config, "fit_" + method,
                    {{"inputs", hash_inputs(config.output, inputs)},
                     {"outputs", outputs},
                     {"wall_seconds", timer.seconds()}});
}

void cmd_analyze(const RunConfig& config) {
    fs::path dataset_dir = config.output / "dataset";
    fs::path fits_dir = config.output / "fits";
    require_exists(dataset_dir / "meta.json", "run `generate` first");
    require_exists(fits_dir / "prmf_selected.json", "run `fit --method prmf` first");
    StageTimer timer;
    write_resolved_config(config);

    ObservedDataSet data = read_dataset(dataset_dir);
    auto fit_mask = data.fit_mask();
    auto predict_mask = data.predict_mask();
    InitialCondition sim_ic = observed_initial_profile(data);

    PrmfFitResult prmf = prmf_result_from_json(
        nlohmann::json::parse(read_text(fits_dir / "prmf_selected.json")));

    struct ModelSim {
        std::string name;
        double sse_fit = 0.0;
        SpaceTimeField sim;
    };
    std::vector<ModelSim> models;

    models.push_back({"prmf", prmf.sse_fit,
                      predict_rande(WeightVector(prmf.weights), prmf.mesh, sim_ic,
                                    data.u_obs.space, data.u_obs.time,
                                    config.analyze.tols)});
    for (std::size_t M : config.pde.subpopulations) {
        fs::path f = fits_dir / ("pde_M" + std::to_string(M) + ".json");
        require_exists(f, "run `fit --method pde` first");
        PointwiseFitResult r = pde_result_from_json(nlohmann::json::parse(read_text(f)));
        CoupledSolution sol = solve_coupled_competition(
            r.nodes, WeightVector(r.weights), sim_ic, data.u_obs.space,
            data.u_obs.time, config.analyze.tols);
        models.push_back({"pde_" + std::to_string(M), r.sse_fit,
                          std::move(sol.aggregate)});
    }

    fs::path dir = config.output / "analysis";
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    auto emit = [&](const std::string& name, const std::string& text) {
        atomic_write_text(dir / name, text);
        outputs.push_back("analysis/" + name);
    };

    // Fit/predict error comparison.
    nlohmann::json sse_summary = nlohmann::json::object();
    {
        std::string table = "model,sse_fit,sse_predict\n";
        for (const auto& m : models) {
            double sp = sse(m.sim, data.u_obs, predict_mask);
            table += m.name + "," + format_double(m.sse_fit) + "," +
                     format_double(sp) + "\n";
            sse_summary[m.name] = {{"sse_fit", m.sse_fit}, {"sse_predict", sp}};
        }
        emit("sse_comparison.csv", table);
    }

    // Wave-speed profiles for the data and every model, both windows.
    {
        double predict_lo = data.u_obs.time.t(data.split_index + 1);
        double predict_hi = data.u_obs.time.t_max;
        auto window_of = [&](const SpaceTimeField& f, bool fit_window) {
            return fit_window
                       ? wave_speed_profile(f, config.analyze.u_stars,
                                            config.analyze.fit_window_lo,
                                            config.analyze.fit_window_hi)
                       : wave_speed_profile(f, config.analyze.u_stars, predict_lo,
                                            predict_hi);
        };
        emit("wave_speed_data_fit.csv", wave_profile_csv(window_of(data.u_obs, true)));
        emit("wave_speed_data_predict.csv",
             wave_profile_csv(window_of(data.u_obs, false)));
        for (const auto& m : models) {
            emit("wave_speed_" + m.name + "_fit.csv",
                 wave_profile_csv(window_of(m.sim, true)));
            emit("wave_speed_" + m.name + "_predict.csv",
                 wave_profile_csv(window_of(m.sim, false)));
        }
    }

    // Recovered distribution on the selected mesh.
    {
        std::string table = "D,rho,weight\n";
        for (std::size_t i = 0; i < prmf.weights.size(); ++i) {
            auto [D, rho] = prmf.mesh.node(i);
            table += format_double(D) + "," + format_double(rho) + "," +
                     format_double(prmf.weights[i]) + "\n";
        }
        emit("recovered_weights.csv", table);
    }

    // Sampling, clustering and elbow selection.
    SampleSet samples =
        sample_weights(WeightVector(prmf.weights), prmf.mesh, config.analyze.H,
                       derive_seed(config.seed, "samples"));
    {
        std::string table = "D,rho\n";
        for (const Sample& s : samples) {
            table += format_double(s.D) + "," + format_double(s.rho) + "\n";
        }
        emit("samples.csv", table);
    }
    ClusterResult clusters = cluster_parameter_samples(
        samples, data.spec.D_min, data.spec.D_max, data.spec.rho_min,
        data.spec.rho_max, config.analyze.k_max, config.analyze.kmeans_restarts,
        derive_seed(config.seed, "kmeans"));
    {
        std::string table = "k,inertia\n";
        for (std::size_t k = 1; k <= clusters.inertia_per_k.size(); ++k) {
            table += std::to_string(k) + "," +
                     format_double(clusters.inertia_per_k[k - 1]) + "\n";
        }
        emit("kmeans_inertia.csv", table);
        std::string centers = "D,rho\n";
        for (const Sample& c : clusters.centers) {
            centers += format_double(c.D) + "," + format_double(c.rho) + "\n";
        }
        emit("cluster_centers.csv", centers);
    }

    nlohmann::json summary = {
        {"dataset_id", hash_file(dataset_dir / "meta.json")},
        {"selected_mesh", {prmf.M_D(), prmf.M_rho()}},
        {"selected_aic", prmf.aic},
        {"models", sse_summary},
        {"chosen_k", clusters.chosen_k},
        {"knee_found", clusters.knee_found},
        {"cluster_centers", nlohmann::json::array()},
        {"n_samples", samples.size()},
    };
    for (const Sample& c : clusters.centers) {
        summary["cluster_centers"].push_back({{"D", c.D}, {"rho", c.rho}});
    }
    emit("summary.json", summary.dump(2) + "\n");

    update_manifest(
        config, "analyze",
        {{"inputs", hash_inputs(config.output, {"dataset/meta.json", "dataset/u_obs.csv",
                                                "fits/prmf_selected.json"})},
         {"outputs", outputs},
         {"wall_seconds", timer.seconds()}});
}

void cmd_report(const RunConfig& config, std::ostream& out) {
    fs::path manifest_path = config.output / "manifest.json";
    require_exists(manifest_path, "no completed stages in this run directory");
    nlohmann::json manifest = nlohmann::json::parse(read_text(manifest_path));

    out << "run directory : " << config.output.string() << "\n";
    out << "tool version  : " << manifest.value("tool_version", "?") << "\n";
    out << "config hash   : " << manifest.value("config_hash", "?") << "\n\n";

    if (manifest.contains("stages")) {
        out << "stage timings (seconds)\n";
        for (const auto& [name, entry] : manifest.at("stages").items()) {
            out << "  " << name << ": " << entry.value("wall_seconds", 0.0) << "\n";
        }
        out << "\n";
    }

    fs::path summary_path = config.output / "analysis" / "summary.json";
    if (fs::exists(summary_path)) {
        nlohmann::json summary = nlohmann::json::parse(read_text(summary_path));
        out << "model errors\n";
        for (const auto& [name, entry] : summary.at("models").items()) {
            out << "  " << name << ": fit sse = " << entry.value("sse_fit", 0.0)
                << ", predict sse = " << entry.value("sse_predict", 0.0) << "\n";
        }
        out << "\nselected mesh : " << summary.at("selected_mesh").dump() << "\n";
        out << "chosen k      : " << summary.value("chosen_k", std::size_t{0}) << "\n";
        out << "cluster centers:\n";
        for (const auto& c : summary.at("cluster_centers")) {
            out << "  D = " << c.value("D", 0.0) << ", rho = " << c.value("rho", 0.0)
                << "\n";
        }
    } else {
        out << "(no analysis summary yet)\n";
    }
}

}  // namespace rande
