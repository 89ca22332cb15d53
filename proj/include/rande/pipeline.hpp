#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rande/estimation.hpp"
#include "rande/synthdata.hpp"

namespace rande {

// Bad configuration, bad flags, or missing inputs. Mapped to exit code 2 by
// the CLI front end (numerical failures map to 3).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BasisConfig {
    std::size_t M_D = 20;
    std::size_t M_rho = 20;
    OdeTols tols{};
};

struct PrmfSweepConfig {
    std::vector<std::pair<std::size_t, std::size_t>> candidate_dims;  // default 3x3 grid
    std::size_t n_starts = 20;
    double tol = 1e-10;
    std::size_t max_iter = 5000;

    PrmfSweepConfig();
};

struct PdeSweepConfig {
    std::vector<std::size_t> subpopulations{2, 4, 6};
    ParameterBox bounds{};
    std::size_t n_starts = 20;
    std::size_t max_evals = 0;  // 0 -> heuristic per dimension
    double tol = 1e-8;
    OdeTols tols{};
};

struct AnalyzeConfig {
    std::vector<double> u_stars;  // default 0.25..0.65 step 0.05
    double fit_window_lo = 0.6;
    double fit_window_hi = 1.0;
    std::size_t H = 10000;
    std::size_t k_max = 10;
    std::size_t kmeans_restarts = 10;
    OdeTols tols{};

    AnalyzeConfig();
};

// One JSON document drives a whole run; CLI flags override individual fields.
// Every stochastic stage derives its own seed from `seed` plus the stage name.
struct RunConfig {
    std::uint64_t seed = 20230815;
    unsigned threads = 0;  // 0 -> all available cores
    std::filesystem::path output = "run";
    DataSetSpec dataset{};
    BasisConfig basis{};
    PrmfSweepConfig prmf{};
    PdeSweepConfig pde{};
    AnalyzeConfig analyze{};
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

// Pipeline stages. Each writes its artifacts under config.output and records
// them (with input hashes and wall-clock timings) in the run manifest.
void cmd_generate(const RunConfig& config, bool force);
void cmd_basis(const RunConfig& config);
void cmd_fit(const RunConfig& config, const std::string& method);  // "prmf" | "pde"
void cmd_analyze(const RunConfig& config);
void cmd_report(const RunConfig& config, std::ostream& out);

}  // namespace rande
