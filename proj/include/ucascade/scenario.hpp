#pragma once

// Scenario files: a JSON document describing one simulation run, plus the
// machinery behind the `run`, `validate` and `oracle` subcommands.
//
//   {
//     "tree":    {"kind": "padic", "p": 2, "depth": 3, "measure": 1, "q": 2}
//              | {"kind": "explicit", "q": 2, "root": {"children": [{"measure": 0.5}, ...]}},
//     "F":       {"type": "power", "a": [re, im], "b": exponent, "overrides": [["0.1", re, im], ...]}
//              | {"type": "table", "entries": [["root", re, im], ...]},
//     "G":       same as F,
//     "basis":   "gram-schmidt" | "roots-of-unity",
//     "initial": {"wavelets": [["0", 0, re, im], ...]} | {"leaves": [["0.1", re, im], ...]},
//     "t_end": 1, "dt": 0.001,
//     "solver":  "recurrent" | "rk" | "leaf" | "all",
//     "outputs": {"trajectory": "traj.csv", "energy": "energy.csv", "summary": "summary.json"},
//     "oracles": {"check-phi": false, "check-eigen": false, "check-cross": false},
//     "leaf_cap": 100
//   }

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucascade/cascade.hpp"
#include "ucascade/spectral.hpp"
#include "ucascade/tree.hpp"
#include "ucascade/wavelets.hpp"

namespace ucascade {

/// Anything wrong with the scenario itself, as opposed to the numerics.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolverChoice { Recurrent, Rk, Leaf, All };

struct WaveletEntry {
    std::string path;
    std::size_t index = 0;
    Complex value;
    bool operator==(const WaveletEntry&) const = default;
};

struct LeafEntry {
    std::string path;
    Complex value;
    bool operator==(const LeafEntry&) const = default;
};

struct InitialCondition {
    enum class Kind { Wavelets, Leaves };
    Kind kind = Kind::Wavelets;
    std::vector<WaveletEntry> wavelets;
    std::vector<LeafEntry> leaves;  // unlisted leaves are zero
    bool operator==(const InitialCondition&) const = default;
};

struct OutputPaths {
    std::string trajectory;  // empty: not written
    std::string energy;
    std::string summary;
    bool operator==(const OutputPaths&) const = default;
};

struct OracleFlags {
    bool check_phi = false;
    bool check_eigen = false;
    bool check_cross = false;
    bool operator==(const OracleFlags&) const = default;
};

struct ScenarioConfig {
    TreeSpec tree = PadicTreeSpec{};
    KernelSpec nonlinear;
    KernelSpec dissipation;
    BasisScheme basis = BasisScheme::GramSchmidt;
    InitialCondition initial;
    double t_end = 1.0;
    double dt = 1e-3;
    SolverChoice solver = SolverChoice::Recurrent;
    OutputPaths outputs;
    OracleFlags oracles;
    std::size_t leaf_cap = kDefaultLeafCap;
    bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError on malformed or unknown fields.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& file);
nlohmann::json to_json(const ScenarioConfig& config);
/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

std::string to_string(SolverChoice solver);

/// Everything a run needs, built and validated from a config.
struct Model {
    std::unique_ptr<const BallTree> tree;
    std::unique_ptr<const WaveletBasis> basis;
    Kernel nonlinear;
    Kernel dissipation;
    WaveletField initial;
    LeafField initial_leaves;
};

/// Throws ConfigError for invalid trees, kernels, paths or initial data.
Model build_model(const ScenarioConfig& config);

struct ValidationReport {
    bool ok = false;
    std::vector<std::string> diagnostics;
    std::size_t vertices = 0;
    std::size_t leaves = 0;
    std::size_t slots = 0;
    std::size_t couplings = 0;
};

/// Dry run: builds the model and assembles the system without solving.
ValidationReport validate(const ScenarioConfig& config);

struct OracleCheck {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    [[nodiscard]] bool passed() const { return max_deviation <= tolerance; }
};

/// Which suites to run. With a seed, the spectral suites also sweep a few
/// random complex kernels on the scenario's tree.
struct OracleRequest {
    bool phi = true;
    bool eigen = true;
    bool cross = true;
    std::optional<std::uint64_t> seed;
};

std::vector<OracleCheck> run_oracles(const ScenarioConfig& config, const Model& model, const OracleRequest& request);
nlohmann::json to_json(const std::vector<OracleCheck>& checks);

/// Solves, writes the requested outputs below out_dir and returns the
/// summary document. Throws ConfigError before writing anything if the
/// config is invalid; NumericalAbort if a solver aborts.
nlohmann::json run(const ScenarioConfig& config, const std::filesystem::path& out_dir);

}  // namespace ucascade
