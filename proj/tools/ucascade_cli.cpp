// Scenario runner for the quadratic cascade equation.
//
//   ucascade run <config.json | dir> [--out-dir DIR] [--jobs N]
//   ucascade validate <config.json>
//   ucascade oracle <config.json> [--seed S]
//
// Exit codes: 0 success, 1 oracle failure, 2 config error, 3 numerical
// abort, 4 I/O or other failure.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ucascade/scenario.hpp"

namespace fs = std::filesystem;
using namespace ucascade;

namespace {

enum ExitCode : int { kOk = 0, kOracleFailed = 1, kConfigError = 2, kNumericalAbort = 3, kFailure = 4 };

int run_one(const fs::path& config_file, const fs::path& out_dir, std::ostream& log) {
    try {
        const ScenarioConfig config = load_config(config_file);
        const auto summary = run(config, out_dir);
        log << config_file.string() << ": ok";
        if (summary.contains("max_cross_disagreement"))
            log << " (max cross-disagreement " << summary["max_cross_disagreement"].get<double>() << ")";
        log << '\n';
        if (summary.contains("oracles_passed") && !summary["oracles_passed"].get<bool>()) {
            log << config_file.string() << ": oracle checks failed\n";
            return kOracleFailed;
        }
        return kOk;
    } catch (const ConfigError& e) {
        log << config_file.string() << ": config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalAbort& e) {
        log << config_file.string() << ": numerical abort: " << e.what() << '\n';
        return kNumericalAbort;
    } catch (const std::exception& e) {
        log << config_file.string() << ": error: " << e.what() << '\n';
        return kFailure;
    }
}

int run_directory(const fs::path& dir, const fs::path& out_dir, unsigned jobs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    std::vector<int> codes(files.size(), kOk);
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            std::ostringstream log;
            codes[i] = run_one(files[i], out_dir / files[i].stem(), log);
            const std::lock_guard lock(log_mutex);
            std::cout << log.str();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < std::max(1u, jobs); ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return codes.empty() ? kOk : *std::max_element(codes.begin(), codes.end());
}

int validate_cmd(const fs::path& config_file) {
    ScenarioConfig config;
    try {
        config = load_config(config_file);
    } catch (const ConfigError& e) {
        std::cout << "error: " << e.what() << '\n';
        return kConfigError;
    }
    const ValidationReport report = validate(config);
    if (!report.ok) {
        for (const auto& d : report.diagnostics) std::cout << "error: " << d << '\n';
        return kConfigError;
    }
    std::cout << "ok: " << report.slots << " slots, " << report.couplings << " couplings, " << report.vertices
              << " vertices, " << report.leaves << " leaves\n";
    return kOk;
}

int oracle_cmd(const fs::path& config_file, std::optional<std::uint64_t> seed) {
    try {
        const ScenarioConfig config = load_config(config_file);
        const Model model = build_model(config);
        OracleRequest request;
        request.seed = seed;
        const auto checks = run_oracles(config, model, request);
        bool all = true;
        for (const auto& c : checks) {
            std::cout << (c.passed() ? "PASS " : "FAIL ") << c.name << "  max deviation " << c.max_deviation
                      << "  tolerance " << c.tolerance << '\n';
            all = all && c.passed();
        }
        return all ? kOk : kOracleFailed;
    } catch (const ConfigError& e) {
        std::cout << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalAbort& e) {
        std::cout << "numerical abort: " << e.what() << '\n';
        return kNumericalAbort;
    } catch (const std::exception& e) {
        std::cout << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ultrametric quadratic cascade equation simulator"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;

    std::string run_target;
    auto* run_cmd = app.add_subcommand("run", "Solve a scenario (or every *.json in a directory)");
    run_cmd->add_option("config", run_target, "Scenario file or directory")->required();
    run_cmd->add_option("--out-dir", out_dir, "Directory for output files");
    run_cmd->add_option("--jobs", jobs, "Parallel scenarios when given a directory")->check(CLI::PositiveNumber);

    std::string validate_target;
    auto* validate_sub = app.add_subcommand("validate", "Check a scenario without solving");
    validate_sub->add_option("config", validate_target, "Scenario file")->required();

    std::string oracle_target;
    auto* oracle_sub = app.add_subcommand("oracle", "Run the spectral and solver oracle suites");
    oracle_sub->add_option("config", oracle_target, "Scenario file")->required();
    oracle_sub->add_option("--seed", seed, "Also sweep random kernels drawn from this seed");

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) {
        const fs::path target(run_target);
        if (fs::is_directory(target)) return run_directory(target, out_dir, jobs);
        return run_one(target, out_dir, std::cout);
    }
    if (*validate_sub) return validate_cmd(validate_target);
    return oracle_cmd(oracle_target, seed);
}
