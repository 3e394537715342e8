#include "ucascade/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace ucascade {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) fail(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* name : allowed) known = known || key == name;
        if (!known) fail(where + ": unknown field '" + key + "'");
    }
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where + ": expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where + ": expected an integer");
    return v.get<int>();
}

std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where + ": expected a string");
    return v.get<std::string>();
}

Complex complex_value(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) fail(where + ": expected [re, im]");
    return {number(v[0], where), number(v[1], where)};
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

NestedBall parse_ball(const json& v, const std::string& where) {
    reject_unknown_keys(v, {"children", "measure", "diameter"}, where);
    NestedBall ball;
    if (v.contains("measure")) ball.measure = number(v["measure"], where + ".measure");
    if (v.contains("diameter")) ball.diameter = number(v["diameter"], where + ".diameter");
    if (v.contains("children")) {
        const auto& children = v["children"];
        if (!children.is_array()) fail(where + ".children: expected an array");
        for (std::size_t i = 0; i < children.size(); ++i)
            ball.children.push_back(parse_ball(children[i], where + "." + std::to_string(i)));
    }
    return ball;
}

json ball_json(const NestedBall& ball) {
    json out = json::object();
    if (ball.measure) out["measure"] = *ball.measure;
    if (ball.diameter) out["diameter"] = *ball.diameter;
    if (!ball.children.empty()) {
        json children = json::array();
        for (const auto& c : ball.children) children.push_back(ball_json(c));
        out["children"] = std::move(children);
    }
    return out;
}

TreeSpec parse_tree(const json& v) {
    if (!v.is_object() || !v.contains("kind")) fail("tree: expected an object with 'kind'");
    const std::string kind = text(v["kind"], "tree.kind");
    if (kind == "padic") {
        reject_unknown_keys(v, {"kind", "p", "depth", "measure", "q"}, "tree");
        PadicTreeSpec spec;
        if (!v.contains("p") || !v.contains("depth")) fail("tree: p-adic shorthand needs 'p' and 'depth'");
        spec.p = integer(v["p"], "tree.p");
        spec.depth = integer(v["depth"], "tree.depth");
        if (v.contains("measure")) spec.measure = number(v["measure"], "tree.measure");
        if (v.contains("q")) spec.q = number(v["q"], "tree.q");
        return spec;
    }
    if (kind == "explicit") {
        reject_unknown_keys(v, {"kind", "root", "q"}, "tree");
        if (!v.contains("root")) fail("tree: explicit form needs 'root'");
        ExplicitTreeSpec spec;
        spec.root = parse_ball(v["root"], "tree.root");
        if (v.contains("q")) spec.q = number(v["q"], "tree.q");
        return spec;
    }
    fail("tree.kind: expected 'padic' or 'explicit'");
}

json tree_json(const TreeSpec& spec) {
    if (const auto* padic = std::get_if<PadicTreeSpec>(&spec))
        return {{"kind", "padic"}, {"p", padic->p}, {"depth", padic->depth}, {"measure", padic->measure}, {"q", padic->q}};
    const auto& expl = std::get<ExplicitTreeSpec>(spec);
    return {{"kind", "explicit"}, {"q", expl.q}, {"root", ball_json(expl.root)}};
}

std::vector<std::pair<std::string, Complex>> parse_vertex_values(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where + ": expected an array of [path, re, im]");
    std::vector<std::pair<std::string, Complex>> out;
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != 3) fail(where + ": expected [path, re, im]");
        out.emplace_back(text(e[0], where), Complex{number(e[1], where), number(e[2], where)});
    }
    return out;
}

json vertex_values_json(const std::vector<std::pair<std::string, Complex>>& entries) {
    json out = json::array();
    for (const auto& [path, z] : entries) out.push_back(json::array({path, z.real(), z.imag()}));
    return out;
}

KernelSpec parse_kernel(const json& v, const std::string& where) {
    if (!v.is_object() || !v.contains("type")) fail(where + ": expected an object with 'type'");
    const std::string type = text(v["type"], where + ".type");
    KernelSpec spec;
    if (type == "power") {
        reject_unknown_keys(v, {"type", "a", "b", "overrides"}, where);
        spec.kind = KernelSpec::Kind::Power;
        if (v.contains("a")) spec.amplitude = complex_value(v["a"], where + ".a");
        if (v.contains("b")) spec.exponent = number(v["b"], where + ".b");
        if (v.contains("overrides")) spec.entries = parse_vertex_values(v["overrides"], where + ".overrides");
        return spec;
    }
    if (type == "table") {
        reject_unknown_keys(v, {"type", "entries"}, where);
        spec.kind = KernelSpec::Kind::Table;
        if (!v.contains("entries")) fail(where + ": table kernel needs 'entries'");
        spec.entries = parse_vertex_values(v["entries"], where + ".entries");
        return spec;
    }
    fail(where + ".type: expected 'power' or 'table'");
}

json kernel_json(const KernelSpec& spec) {
    if (spec.kind == KernelSpec::Kind::Table) return {{"type", "table"}, {"entries", vertex_values_json(spec.entries)}};
    json out = {{"type", "power"}, {"a", complex_json(spec.amplitude)}, {"b", spec.exponent}};
    if (!spec.entries.empty()) out["overrides"] = vertex_values_json(spec.entries);
    return out;
}

InitialCondition parse_initial(const json& v) {
    reject_unknown_keys(v, {"wavelets", "leaves"}, "initial");
    if (v.contains("wavelets") == v.contains("leaves")) fail("initial: give exactly one of 'wavelets' or 'leaves'");
    InitialCondition init;
    if (v.contains("wavelets")) {
        init.kind = InitialCondition::Kind::Wavelets;
        const auto& list = v["wavelets"];
        if (!list.is_array()) fail("initial.wavelets: expected an array");
        for (const auto& e : list) {
            if (!e.is_array() || e.size() != 4) fail("initial.wavelets: expected [path, j, re, im]");
            const int j = integer(e[1], "initial.wavelets");
            if (j < 0) fail("initial.wavelets: negative wavelet index");
            init.wavelets.push_back(WaveletEntry{text(e[0], "initial.wavelets"), static_cast<std::size_t>(j),
                                                 {number(e[2], "initial.wavelets"), number(e[3], "initial.wavelets")}});
        }
    } else {
        init.kind = InitialCondition::Kind::Leaves;
        for (auto& [path, z] : parse_vertex_values(v["leaves"], "initial.leaves"))
            init.leaves.push_back(LeafEntry{std::move(path), z});
    }
    return init;
}

json initial_json(const InitialCondition& init) {
    json list = json::array();
    if (init.kind == InitialCondition::Kind::Wavelets) {
        for (const auto& e : init.wavelets) list.push_back(json::array({e.path, e.index, e.value.real(), e.value.imag()}));
        return {{"wavelets", std::move(list)}};
    }
    for (const auto& e : init.leaves) list.push_back(json::array({e.path, e.value.real(), e.value.imag()}));
    return {{"leaves", std::move(list)}};
}

SolverChoice parse_solver(const std::string& name) {
    if (name == "recurrent") return SolverChoice::Recurrent;
    if (name == "rk") return SolverChoice::Rk;
    if (name == "leaf") return SolverChoice::Leaf;
    if (name == "all") return SolverChoice::All;
    fail("solver: expected one of recurrent, rk, leaf, all");
}

bool flag(const json& v, const char* key) {
    if (!v.contains(key)) return false;
    if (!v[key].is_boolean()) fail(std::string("oracles.") + key + ": expected true or false");
    return v[key].get<bool>();
}

std::filesystem::path with_suffix(const std::filesystem::path& file, const std::string& tag) {
    auto out = file;
    out.replace_filename(file.stem().string() + "." + tag + file.extension().string());
    return out;
}

void write_text(const std::filesystem::path& file, const std::string& content) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + file.string());
}

std::string trajectory_text(const BallTree& tree, const Trajectory& traj) {
    std::ostringstream out;
    write_trajectory_csv(out, tree, traj);
    return out.str();
}

json solver_json(const SolverInfo& info) {
    return {{"solver", info.solver},
            {"dt", info.dt},
            {"steps", info.steps},
            {"error_estimate", info.error_estimate},
            {"config_hash", info.config_hash}};
}

// Largest |v| over slots that start at zero.
double localization_leak(const WaveletField& initial, const Trajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.slots.size(); ++i) {
        if (initial.get(traj.slots[i]) != Complex{}) continue;
        for (const auto& v : traj.values[i]) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

Kernel random_kernel(const BallTree& tree, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(-2.0, 2.0);
    std::vector<Complex> values(tree.size());
    for (auto& v : values) {
        const double re = uniform(rng);
        const double im = uniform(rng);
        v = {re, im};
    }
    return Kernel(std::move(values));
}

double phi_deviation(const WaveletBasis& basis, const Kernel& kernel, std::size_t leaf_cap) {
    const BallTree& tree = basis.tree();
    std::vector<LeafField> wave;
    for (Slot s : basis.slots()) wave.push_back(basis.leaf_values(s));
    double worst = 0.0;
    for (std::size_t a = 0; a < wave.size(); ++a) {
        const InteractionQuadrature quad(tree, kernel, wave[a], leaf_cap);
        for (std::size_t b = 0; b < wave.size(); ++b) {
            const LeafField direct = quad.apply(wave[b]);
            const Complex phi = interaction_coefficient(tree, kernel, basis.slots()[a].vertex, basis.slots()[b].vertex);
            for (std::size_t x = 0; x < direct.size(); ++x)
                worst = std::max(worst, std::abs(direct[x] - wave[b][x] * wave[a][x] * phi));
        }
    }
    return worst;
}

double eigen_deviation(const WaveletBasis& basis, const Kernel& kernel) {
    const BallTree& tree = basis.tree();
    double worst = 0.0;
    for (Slot s : basis.slots()) {
        const LeafField psi = basis.leaf_values(s);
        const LeafField applied = apply_pdo_direct(tree, kernel, psi);
        const Complex lambda = eigenvalue(tree, kernel, s.vertex);
        for (std::size_t x = 0; x < psi.size(); ++x) worst = std::max(worst, std::abs(applied[x] - lambda * psi[x]));
    }
    return worst;
}

}  // namespace

std::string to_string(SolverChoice solver) {
    switch (solver) {
        case SolverChoice::Recurrent: return "recurrent";
        case SolverChoice::Rk: return "rk";
        case SolverChoice::Leaf: return "leaf";
        case SolverChoice::All: return "all";
    }
    return "?";
}

ScenarioConfig parse_config(const json& doc) {
    try {
        reject_unknown_keys(doc, {"tree", "F", "G", "basis", "initial", "t_end", "dt", "solver", "outputs", "oracles",
                                  "leaf_cap"},
                            "config");
        for (const char* key : {"tree", "F", "G", "initial", "t_end", "dt"})
            if (!doc.contains(key)) fail(std::string("config: missing field '") + key + "'");
        ScenarioConfig config;
        config.tree = parse_tree(doc["tree"]);
        config.nonlinear = parse_kernel(doc["F"], "F");
        config.dissipation = parse_kernel(doc["G"], "G");
        if (doc.contains("basis")) {
            try {
                config.basis = parse_basis_scheme(text(doc["basis"], "basis"));
            } catch (const std::invalid_argument& e) {
                fail(std::string("basis: ") + e.what());
            }
        }
        config.initial = parse_initial(doc["initial"]);
        config.t_end = number(doc["t_end"], "t_end");
        config.dt = number(doc["dt"], "dt");
        if (doc.contains("solver")) config.solver = parse_solver(text(doc["solver"], "solver"));
        if (doc.contains("outputs")) {
            const auto& out = doc["outputs"];
            reject_unknown_keys(out, {"trajectory", "energy", "summary"}, "outputs");
            if (out.contains("trajectory")) config.outputs.trajectory = text(out["trajectory"], "outputs.trajectory");
            if (out.contains("energy")) config.outputs.energy = text(out["energy"], "outputs.energy");
            if (out.contains("summary")) config.outputs.summary = text(out["summary"], "outputs.summary");
        }
        if (doc.contains("oracles")) {
            const auto& o = doc["oracles"];
            reject_unknown_keys(o, {"check-phi", "check-eigen", "check-cross"}, "oracles");
            config.oracles = OracleFlags{flag(o, "check-phi"), flag(o, "check-eigen"), flag(o, "check-cross")};
        }
        if (doc.contains("leaf_cap")) {
            const int cap = integer(doc["leaf_cap"], "leaf_cap");
            if (cap < 1) fail("leaf_cap: must be positive");
            config.leaf_cap = static_cast<std::size_t>(cap);
        }
        return config;
    } catch (const json::exception& e) {
        fail(std::string("config: ") + e.what());
    }
}

ScenarioConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail("cannot read config " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        fail(file.string() + ": " + e.what());
    }
    return parse_config(doc);
}

json to_json(const ScenarioConfig& config) {
    json doc = {{"tree", tree_json(config.tree)},
                {"F", kernel_json(config.nonlinear)},
                {"G", kernel_json(config.dissipation)},
                {"basis", to_string(config.basis)},
                {"initial", initial_json(config.initial)},
                {"t_end", config.t_end},
                {"dt", config.dt},
                {"solver", to_string(config.solver)},
                {"leaf_cap", config.leaf_cap}};
    json outputs = json::object();
    if (!config.outputs.trajectory.empty()) outputs["trajectory"] = config.outputs.trajectory;
    if (!config.outputs.energy.empty()) outputs["energy"] = config.outputs.energy;
    if (!config.outputs.summary.empty()) outputs["summary"] = config.outputs.summary;
    doc["outputs"] = std::move(outputs);
    doc["oracles"] = {{"check-phi", config.oracles.check_phi},
                      {"check-eigen", config.oracles.check_eigen},
                      {"check-cross", config.oracles.check_cross}};
    return doc;
}

std::string config_hash(const ScenarioConfig& config) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : to_json(config).dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Model build_model(const ScenarioConfig& config) {
    Model model;
    try {
        model.tree = std::make_unique<const BallTree>(BallTree::build(config.tree));
    } catch (const std::invalid_argument& e) {
        fail(std::string("tree: ") + e.what());
    }
    const BallTree& tree = *model.tree;
    try {
        model.basis = std::make_unique<const WaveletBasis>(tree, config.basis);
    } catch (const std::invalid_argument& e) {
        fail(std::string("basis: ") + e.what());
    }
    try {
        model.nonlinear = Kernel::resolve(config.nonlinear, tree);
    } catch (const std::invalid_argument& e) {
        fail(std::string("F: ") + e.what());
    }
    try {
        model.dissipation = Kernel::resolve(config.dissipation, tree);
    } catch (const std::invalid_argument& e) {
        fail(std::string("G: ") + e.what());
    }

    if (config.initial.kind == InitialCondition::Kind::Wavelets) {
        std::set<Slot> seen;
        for (const auto& e : config.initial.wavelets) {
            const auto v = tree.find(e.path);
            if (!v) fail("initial: unknown vertex path '" + e.path + "'");
            const Slot slot{*v, e.index};
            if (!model.basis->contains(slot))
                fail("initial: ball '" + e.path + "' has no wavelet with index " + std::to_string(e.index));
            if (!seen.insert(slot).second) fail("initial: wavelet " + slot_label(tree, slot) + " listed twice");
            if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
                fail("initial: non-finite coefficient");
            if (e.value != Complex{}) model.initial.set(slot, e.value);
        }
        model.initial_leaves = synthesize(*model.basis, model.initial);
    } else {
        LeafField f(tree.leaf_count());
        std::set<std::size_t> seen;
        for (const auto& e : config.initial.leaves) {
            const auto v = tree.find(e.path);
            if (!v) fail("initial: unknown vertex path '" + e.path + "'");
            if (!tree.is_leaf(*v)) fail("initial: vertex '" + e.path + "' is not a leaf");
            const std::size_t pos = tree.leaf_position(*v);
            if (!seen.insert(pos).second) fail("initial: leaf '" + e.path + "' listed twice");
            f[pos] = e.value;
        }
        try {
            model.initial = analyze(*model.basis, f);
        } catch (const std::invalid_argument& e) {
            fail(std::string("initial: not a mean-zero test function (") + e.what() + ")");
        }
        model.initial_leaves = std::move(f);
    }

    try {
        (void)time_grid(config.t_end, config.dt);
    } catch (const std::invalid_argument& e) {
        fail(std::string("time grid: ") + e.what());
    }
    const bool needs_leaves = config.solver == SolverChoice::Leaf || config.solver == SolverChoice::All ||
                              config.oracles.check_phi || config.oracles.check_cross;
    if (needs_leaves && tree.leaf_count() > config.leaf_cap)
        fail("tree has " + std::to_string(tree.leaf_count()) + " leaves, above leaf_cap " +
             std::to_string(config.leaf_cap) + " required by the leaf-space solver and oracles");
    return model;
}

ValidationReport validate(const ScenarioConfig& config) {
    ValidationReport report;
    try {
        const Model model = build_model(config);
        const CascadeSystem system = CascadeSystem::assemble(*model.basis, model.nonlinear, model.dissipation);
        report.vertices = model.tree->size();
        report.leaves = model.tree->leaf_count();
        report.slots = system.slots().size();
        report.couplings = system.coupling_count();
        report.ok = true;
    } catch (const ConfigError& e) {
        report.diagnostics.emplace_back(e.what());
    }
    return report;
}

std::vector<OracleCheck> run_oracles(const ScenarioConfig& config, const Model& model, const OracleRequest& request) {
    std::vector<OracleCheck> checks;
    const BallTree& tree = *model.tree;
    const WaveletBasis& basis = *model.basis;

    if (request.phi) checks.push_back({"phi[F]", phi_deviation(basis, model.nonlinear, config.leaf_cap), 1e-11});
    if (request.eigen) {
        checks.push_back({"eigen[G]", eigen_deviation(basis, model.dissipation), 1e-12});
        checks.push_back({"eigen[F]", eigen_deviation(basis, model.nonlinear), 1e-12});
    }
    if (request.seed && (request.phi || request.eigen)) {
        std::mt19937_64 rng(*request.seed);
        for (int k = 0; k < 3; ++k) {
            const Kernel kernel = random_kernel(tree, rng);
            const std::string tag = "[random " + std::to_string(k) + "]";
            if (request.phi) checks.push_back({"phi" + tag, phi_deviation(basis, kernel, config.leaf_cap), 1e-11});
            if (request.eigen) checks.push_back({"eigen" + tag, eigen_deviation(basis, kernel), 1e-12});
        }
    }
    if (request.cross) {
        const CascadeSystem system = CascadeSystem::assemble(basis, model.nonlinear, model.dissipation);
        const Trajectory rec = solve_recurrent(system, model.initial, config.t_end, config.dt);
        const Trajectory rk = solve_rk(system, model.initial, config.t_end, config.dt);
        const LeafTrajectory leaf = solve_leaf(tree, model.nonlinear, model.dissipation, model.initial_leaves,
                                               config.t_end, config.dt, config.leaf_cap);
        const Trajectory projected = project(basis, leaf, basis.slots());
        checks.push_back({"cross[recurrent-rk]", max_deviation(rec, rk), 1e-5});
        checks.push_back({"cross[recurrent-leaf]", max_deviation(rec, projected), 1e-5});
        checks.push_back({"cross[rk-leaf]", max_deviation(rk, projected), 1e-5});
        const double leak = std::max({localization_leak(model.initial, rec), localization_leak(model.initial, rk),
                                      localization_leak(model.initial, projected)});
        checks.push_back({"localization", leak, 1e-10});
        double drift = 0.0;
        for (const auto& state : leaf.states) drift = std::max(drift, std::abs(state.integral(tree)));
        checks.push_back({"mean-zero", drift, 1e-10});
    }
    return checks;
}

json to_json(const std::vector<OracleCheck>& checks) {
    json out = json::array();
    for (const auto& c : checks)
        out.push_back({{"name", c.name},
                       {"max_deviation", c.max_deviation},
                       {"tolerance", c.tolerance},
                       {"passed", c.passed()}});
    return out;
}

json run(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
    const Model model = build_model(config);
    const BallTree& tree = *model.tree;
    const WaveletBasis& basis = *model.basis;
    const std::string hash = config_hash(config);
    const CascadeSystem system = CascadeSystem::assemble(basis, model.nonlinear, model.dissipation);

    std::vector<std::pair<std::string, Trajectory>> results;
    if (config.solver == SolverChoice::Recurrent || config.solver == SolverChoice::All)
        results.emplace_back("recurrent", solve_recurrent(system, model.initial, config.t_end, config.dt));
    if (config.solver == SolverChoice::Rk || config.solver == SolverChoice::All)
        results.emplace_back("rk", solve_rk(system, model.initial, config.t_end, config.dt));
    if (config.solver == SolverChoice::Leaf || config.solver == SolverChoice::All) {
        const LeafTrajectory leaf = solve_leaf(tree, model.nonlinear, model.dissipation, model.initial_leaves,
                                               config.t_end, config.dt, config.leaf_cap);
        results.emplace_back("leaf", project(basis, leaf, basis.slots()));
    }
    for (auto& [name, traj] : results) traj.info.config_hash = hash;

    json summary = {{"config_hash", hash},
                    {"solver", to_string(config.solver)},
                    {"basis", to_string(config.basis)},
                    {"tree", {{"vertices", tree.size()}, {"leaves", tree.leaf_count()}}},
                    {"slots", system.slots().size()},
                    {"couplings", system.coupling_count()}};
    json solvers = json::array();
    for (const auto& [name, traj] : results) solvers.push_back(solver_json(traj.info));
    summary["solvers"] = std::move(solvers);

    double leak = 0.0;
    for (const auto& [name, traj] : results) leak = std::max(leak, localization_leak(model.initial, traj));
    summary["localization_leak"] = leak;
    if (config.solver == SolverChoice::All) {
        double worst = 0.0;
        for (std::size_t a = 0; a < results.size(); ++a)
            for (std::size_t b = a + 1; b < results.size(); ++b)
                worst = std::max(worst, max_deviation(results[a].second, results[b].second));
        summary["max_cross_disagreement"] = worst;
    }

    const OracleRequest request{config.oracles.check_phi, config.oracles.check_eigen, config.oracles.check_cross, {}};
    if (request.phi || request.eigen || request.cross) {
        const auto checks = run_oracles(config, model, request);
        summary["oracles"] = to_json(checks);
        bool all = true;
        for (const auto& c : checks) all = all && c.passed();
        summary["oracles_passed"] = all;
    }

    json written = json::array();
    if (!config.outputs.trajectory.empty()) {
        const auto base = out_dir / config.outputs.trajectory;
        for (const auto& [name, traj] : results) {
            const auto file = results.size() > 1 ? with_suffix(base, name) : base;
            write_text(file, trajectory_text(tree, traj));
            written.push_back(file.lexically_relative(out_dir).generic_string());
        }
    }
    if (!config.outputs.energy.empty()) {
        const auto file = out_dir / config.outputs.energy;
        std::ostringstream out;
        write_energy_csv(out, energy_by_level(tree, results.front().second));
        write_text(file, out.str());
        written.push_back(file.lexically_relative(out_dir).generic_string());
    }
    if (!config.outputs.summary.empty())
        written.push_back((out_dir / config.outputs.summary).lexically_relative(out_dir).generic_string());
    summary["outputs"] = written;
    if (!config.outputs.summary.empty()) write_text(out_dir / config.outputs.summary, summary.dump(2) + "\n");
    return summary;
}

}  // namespace ucascade
