// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance <ucascade-cli> <scenario-dir> <scratch-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/random_trees.hpp"
#include "ucascade/cascade.hpp"
#include "ucascade/scenario.hpp"

using namespace ucascade;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// T f(x) = sum_y T(sup(x, y)) (f(x) - f(y)) nu(y), written out from scratch.
LeafField operator_by_definition(const BallTree& tree, const Kernel& T, const LeafField& f) {
    const auto leaves = tree.leaves();
    LeafField out(leaves.size());
    for (std::size_t x = 0; x < leaves.size(); ++x)
        for (std::size_t y = 0; y < leaves.size(); ++y)
            out[x] += T(tree.sup(leaves[x], leaves[y])) * (f[x] - f[y]) * tree.measure(leaves[y]);
    return out;
}

// Full triple sum with sup of three points, no factoring.
LeafField interaction_by_definition(const BallTree& tree, const Kernel& F, const LeafField& phi, const LeafField& psi) {
    const auto leaves = tree.leaves();
    LeafField out(leaves.size());
    for (std::size_t x = 0; x < leaves.size(); ++x)
        for (std::size_t eta = 0; eta < leaves.size(); ++eta) {
            Complex inner{};
            for (std::size_t xi = 0; xi < leaves.size(); ++xi)
                inner += F(tree.sup(leaves[x], leaves[xi], leaves[eta])) * phi[xi] * tree.measure(leaves[xi]);
            out[x] += inner * (psi[eta] - psi[x]) * tree.measure(leaves[eta]);
        }
    return out;
}

// Eigenvalue from the ball chain: T(I) nu(I) + sum over strict ancestors J of
// T(J) (nu(J) - nu of J's child toward I).
Complex eigenvalue_by_chain(const BallTree& tree, const Kernel& T, Vertex ball) {
    Complex acc = T(ball) * tree.measure(ball);
    Vertex child = ball;
    while (const auto up = tree.parent(child)) {
        acc += T(*up) * (tree.measure(*up) - tree.measure(child));
        child = *up;
    }
    return acc;
}

// Phi for inner strictly below outer, exactly as the ancestor sum is stated.
Complex phi_by_formula(const BallTree& tree, const Kernel& F, Vertex outer, Vertex inner) {
    const double toward = tree.measure_toward(outer, inner);
    Complex acc = toward * toward * F(outer) - tree.measure(inner) * tree.measure(inner) * F(inner);
    for (auto L = tree.parent(inner); L && *L != outer; L = tree.parent(*L)) {
        const double part = tree.measure_toward(*L, inner);
        acc -= (tree.measure(*L) * tree.measure(*L) - part * part) * F(*L);
    }
    return acc;
}

// Closed form for two nested wavelets; eta_outer == 0 uses the limit -t.
Complex nested_inner(Complex eta_outer, Complex eta_inner, Complex coupling, Complex outer0, Complex inner0, double t) {
    const Complex factor = eta_outer == Complex{} ? Complex(-t) : (std::exp(-eta_outer * t) - 1.0) / eta_outer;
    return inner0 * std::exp(-eta_inner * t + coupling * outer0 * factor);
}

std::vector<BallTree> sweep_trees(std::mt19937_64& rng) {
    std::vector<BallTree> trees;
    testkit::RandomTreeOptions opt;
    opt.max_depth = 4;
    opt.min_branching = 2;
    opt.max_branching = 4;
    opt.max_leaves = 100;
    while (trees.size() < 20) {
        // alternate sparse trees with ones that fill the leaf budget
        opt.stop_probability = trees.size() % 2 == 0 ? 0.4 : 0.05;
        auto tree = testkit::random_tree(rng, opt);
        if (tree.leaf_count() >= 4) trees.push_back(std::move(tree));
    }
    return trees;
}

Outcome interaction_closed_form(const std::vector<BallTree>& trees, std::mt19937_64& rng) {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    double worst_formula = 0.0;
    std::size_t pairs = 0;
    std::size_t largest = 0;
    for (const auto& tree : trees) {
        largest = std::max(largest, tree.leaf_count());
        const WaveletBasis basis(tree);
        std::vector<LeafField> waves;
        for (Slot s : basis.slots()) waves.push_back(basis.leaf_values(s));
        for (int k = 0; k < 5; ++k) {
            const Kernel F = testkit::random_kernel(rng, tree);
            for (std::size_t a = 0; a < waves.size(); ++a) {
                const Vertex I = basis.slots()[a].vertex;
                const InteractionQuadrature quad(tree, F, waves[a]);
                for (std::size_t b = 0; b < waves.size(); ++b) {
                    const Vertex J = basis.slots()[b].vertex;
                    const Complex phi = interaction_coefficient(tree, F, I, J);
                    if (tree.strictly_below(J, I))
                        worst_formula = std::max(worst_formula, std::abs(phi - phi_by_formula(tree, F, I, J)));
                    const LeafField direct = quad.apply(waves[b]);
                    for (std::size_t x = 0; x < direct.size(); ++x)
                        worst = std::max(worst, std::abs(direct[x] - waves[b][x] * waves[a][x] * phi));
                    ++pairs;
                }
            }
        }
    }
    const double elapsed = seconds_since(start);

    // The factored quadrature itself against the unfactored triple sum.
    double worst_naive = 0.0;
    for (const auto& tree : trees) {
        if (tree.leaf_count() > 40) continue;
        const WaveletBasis basis(tree);
        const Kernel F = testkit::random_kernel(rng, tree);
        std::uniform_int_distribution<std::size_t> pick(0, basis.slots().size() - 1);
        for (int k = 0; k < 3; ++k) {
            const LeafField phi = basis.leaf_values(basis.slots()[pick(rng)]);
            const LeafField psi = basis.leaf_values(basis.slots()[pick(rng)]);
            const LeafField fast = interaction_integral_direct(tree, F, phi, psi);
            const LeafField slow = interaction_by_definition(tree, F, phi, psi);
            for (std::size_t x = 0; x < fast.size(); ++x) worst_naive = std::max(worst_naive, std::abs(fast[x] - slow[x]));
        }
    }

    const double dev = std::max({worst, worst_formula, worst_naive});
    return {dev <= 1e-11 && elapsed <= 60.0,
            "max deviation " + sci(dev) + " (tol 1e-11) over " + std::to_string(trees.size()) + " trees x 5 kernels, " +
                std::to_string(pairs) + " wavelet pairs, up to " + std::to_string(largest) + " leaves, " +
                sci(elapsed) + " s (limit 60 s)"};
}

Outcome wavelet_eigenvalues(const std::vector<BallTree>& trees, std::mt19937_64& rng) {
    double worst = 0.0;
    std::size_t checked = 0;
    for (const auto& tree : trees) {
        const WaveletBasis basis(tree);
        for (int k = 0; k < 5; ++k) {
            const Kernel T = testkit::random_kernel(rng, tree);
            for (Slot s : basis.slots()) {
                const LeafField psi = basis.leaf_values(s);
                const Complex lambda = eigenvalue(tree, T, s.vertex);
                worst = std::max(worst, std::abs(lambda - eigenvalue_by_chain(tree, T, s.vertex)));
                const LeafField lib = apply_pdo_direct(tree, T, psi);
                const LeafField own = operator_by_definition(tree, T, psi);
                for (std::size_t x = 0; x < psi.size(); ++x) {
                    worst = std::max(worst, std::abs(lib[x] - lambda * psi[x]));
                    worst = std::max(worst, std::abs(own[x] - lambda * psi[x]));
                }
                ++checked;
            }
        }
    }
    return {worst <= 1e-12,
            "max deviation " + sci(worst) + " (tol 1e-12) over " + std::to_string(checked) + " wavelet/kernel pairs"};
}

Outcome single_wavelet_residual(std::mt19937_64& rng) {
    std::vector<BallTree> trees;
    trees.push_back(BallTree::padic(2, 2));
    trees.push_back(BallTree::padic(3, 2));
    for (int k = 0; k < 4; ++k) {
        testkit::RandomTreeOptions opt;
        opt.max_leaves = 40;
        trees.push_back(testkit::random_tree(rng, opt));
    }
    double worst = 0.0;
    std::size_t evaluations = 0;
    for (const auto& tree : trees) {
        const WaveletBasis basis(tree);
        const Kernel F = testkit::random_kernel(rng, tree);
        const Kernel G = testkit::random_kernel(rng, tree);
        for (Slot s : basis.slots()) {
            const LeafField psi = basis.leaf_values(s);
            const Complex eta = eigenvalue(tree, G, s.vertex);
            for (int k = 0; k < 10; ++k) {
                const double t = 0.1 * (k + 1);
                const Complex amp = std::exp(-eta * t);
                LeafField v(psi.size());
                for (std::size_t i = 0; i < v.size(); ++i) v[i] = amp * psi[i];
                const LeafField rhs = leaf_rhs(tree, F, G, v);
                for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(-eta * v[i] - rhs[i]));
                ++evaluations;
            }
        }
    }
    return {worst <= 1e-10, "max residual " + sci(worst) + " (tol 1e-10) at 10 times for " +
                                std::to_string(evaluations / 10) + " wavelets on " + std::to_string(trees.size()) +
                                " trees"};
}

struct NestedCase {
    BallTree tree;
    Kernel F;
    Kernel G;
    Slot outer;
    Slot inner;
    Complex outer0;
    Complex inner0;
};

double nested_error(const NestedCase& c, const WaveletBasis& basis, const Trajectory& traj) {
    const Complex eta_o = eigenvalue(c.tree, c.G, c.outer.vertex);
    const Complex eta_i = eigenvalue(c.tree, c.G, c.inner.vertex);
    const Complex coupling = basis.ancestor_value(c.outer, c.inner.vertex) *
                             phi_by_formula(c.tree, c.F, c.outer.vertex, c.inner.vertex);
    const auto io = *traj.find(c.outer);
    const auto ii = *traj.find(c.inner);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        worst = std::max(worst, std::abs(traj.values[io][k] - c.outer0 * std::exp(-eta_o * t)));
        worst = std::max(worst, std::abs(traj.values[ii][k] - nested_inner(eta_o, eta_i, coupling, c.outer0, c.inner0, t)));
    }
    return worst;
}

Outcome nested_pair_closed_form(const fs::path& scenarios, std::mt19937_64& rng) {
    std::vector<NestedCase> cases;
    {
        const ScenarioConfig config = load_config(scenarios / "nested_pair.json");
        Model model = build_model(config);
        const auto& entries = config.initial.wavelets;
        cases.push_back({*model.tree, model.nonlinear, model.dissipation,
                         Slot{*model.tree->find(entries[0].path), entries[0].index},
                         Slot{*model.tree->find(entries[1].path), entries[1].index}, entries[0].value, entries[1].value});
    }
    for (int k = 0; k < 5; ++k) {
        testkit::RandomTreeOptions opt;
        opt.max_leaves = 30;
        BallTree tree = testkit::random_tree(rng, opt);
        const WaveletBasis basis(tree);
        std::vector<std::pair<Slot, Slot>> nested;
        for (Slot a : basis.slots())
            for (Slot b : basis.slots())
                if (tree.strictly_below(b.vertex, a.vertex)) nested.emplace_back(a, b);
        if (nested.empty()) continue;
        const auto [a, b] = nested[std::uniform_int_distribution<std::size_t>(0, nested.size() - 1)(rng)];
        Kernel F = testkit::random_kernel(rng, tree);
        // one case with vanishing outer eigenvalue exercises the limit form
        Kernel G = k == 0 ? Kernel::constant(tree, 0.0) : testkit::random_kernel(rng, tree, 1.0);
        cases.push_back({std::move(tree), std::move(F), std::move(G), a, b, testkit::random_unit(rng),
                         testkit::random_unit(rng)});
    }

    double worst_rk = 0.0;
    double worst_rec = 0.0;
    double slope = 1e9;
    for (const auto& c : cases) {
        const WaveletBasis basis(c.tree);
        const auto sys = CascadeSystem::assemble(basis, c.F, c.G);
        WaveletField v0;
        v0.set(c.outer, c.outer0);
        v0.set(c.inner, c.inner0);
        worst_rk = std::max(worst_rk, nested_error(c, basis, solve_rk(sys, v0, 1.0, 1e-3)));
        worst_rec = std::max(worst_rec, nested_error(c, basis, solve_recurrent(sys, v0, 1.0, 1e-3)));
        const double coarse = nested_error(c, basis, solve_recurrent(sys, v0, 1.0, 1e-2));
        const double fine = nested_error(c, basis, solve_recurrent(sys, v0, 1.0, 5e-3));
        if (coarse > 1e-13) slope = std::min(slope, std::log2(coarse / fine));
    }
    return {worst_rk <= 1e-6 && worst_rec <= 1e-5 && slope >= 1.9,
            "rk " + sci(worst_rk) + " (tol 1e-6), recurrent " + sci(worst_rec) + " (tol 1e-5), dt-halving slope " +
                sci(slope) + " (min 1.9), " + std::to_string(cases.size()) + " cases at dt 1e-3"};
}

struct TriangleResult {
    double pairwise = 0.0;
    double basis_gap = 0.0;
    double leak = 0.0;
    double mean_drift = 0.0;
    std::size_t scenarios = 0;
    std::size_t basis_pairs = 0;
};

double leak_of(const WaveletField& v0, const Trajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.slots.size(); ++i) {
        if (v0.get(traj.slots[i]) != Complex{}) continue;
        for (const auto& v : traj.values[i]) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

TriangleResult solver_triangle(std::mt19937_64& rng) {
    TriangleResult r;
    for (int k = 0; k < 12; ++k) {
        testkit::RandomTreeOptions opt;
        opt.max_depth = 3;
        opt.max_branching = 3;
        opt.max_leaves = 27;
        opt.equal_child_measures = k % 2 == 1;
        const BallTree tree = testkit::random_tree(rng, opt);
        const WaveletBasis basis(tree);
        const Kernel F = testkit::random_kernel(rng, tree);
        const Kernel G = testkit::random_kernel(rng, tree);
        const WaveletField v0 = testkit::random_sparse_field(rng, basis, 0.4);
        const auto sys = CascadeSystem::assemble(basis, F, G);

        const Trajectory rec = solve_recurrent(sys, v0, 1.0, 1e-3);
        const Trajectory rk = solve_rk(sys, v0, 1.0, 1e-3);
        const LeafField f0 = synthesize(basis, v0);
        const LeafTrajectory leaf = solve_leaf(tree, F, G, f0, 1.0, 1e-3);
        const Trajectory projected = project(basis, leaf, basis.slots());
        r.pairwise = std::max({r.pairwise, max_deviation(rec, rk), max_deviation(rec, projected),
                               max_deviation(rk, projected)});
        r.leak = std::max({r.leak, leak_of(v0, rec), leak_of(v0, rk), leak_of(v0, projected)});
        for (const auto& state : leaf.states) r.mean_drift = std::max(r.mean_drift, std::abs(state.integral(tree)));
        ++r.scenarios;

        if (opt.equal_child_measures) {
            const WaveletBasis other(tree, BasisScheme::RootsOfUnity);
            const auto sys2 = CascadeSystem::assemble(other, F, G);
            const WaveletField w0 = analyze(other, f0);
            // same solver in both bases; the leaf solver has no basis at all
            const LeafTrajectory rk_a = synthesize(basis, rk);
            const LeafTrajectory rk_b = synthesize(other, solve_rk(sys2, w0, 1.0, 1e-3));
            const LeafTrajectory rec_a = synthesize(basis, rec);
            const LeafTrajectory rec_b = synthesize(other, solve_recurrent(sys2, w0, 1.0, 1e-3));
            r.basis_gap = std::max({r.basis_gap, max_deviation(rk_a, rk_b), max_deviation(rec_a, rec_b),
                                    max_deviation(leaf, rk_b)});
            ++r.basis_pairs;
        }
    }
    return r;
}

double gram_error(const WaveletBasis& basis) {
    const BallTree& tree = basis.tree();
    std::vector<LeafField> waves;
    for (Slot s : basis.slots()) waves.push_back(basis.leaf_values(s));
    double worst = 0.0;
    for (std::size_t a = 0; a < waves.size(); ++a)
        for (std::size_t b = a; b < waves.size(); ++b) {
            Complex g{};
            for (std::size_t i = 0; i < waves[a].size(); ++i)
                g += waves[a][i] * std::conj(waves[b][i]) * tree.measure(tree.leaves()[i]);
            worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

Outcome orthonormal_basis(const std::vector<BallTree>& sweep, std::mt19937_64& rng) {
    std::vector<const BallTree*> trees;
    for (const auto& t : sweep) trees.push_back(&t);
    std::vector<BallTree> equal;
    for (int k = 0; k < 10; ++k) {
        testkit::RandomTreeOptions opt;
        opt.max_depth = 4;
        opt.equal_child_measures = true;
        equal.push_back(testkit::random_tree(rng, opt));
    }
    equal.push_back(BallTree::padic(2, 3));
    equal.push_back(BallTree::padic(3, 3, 1.0, 3.0));
    for (const auto& t : equal) trees.push_back(&t);

    double worst = 0.0;
    std::size_t bases = 0;
    for (const BallTree* tree : trees) {
        std::vector<BasisScheme> schemes{BasisScheme::GramSchmidt};
        bool uniform = true;
        for (Vertex v : tree->internal_vertices())
            for (Vertex c : tree->children(v))
                uniform = uniform && std::abs(tree->measure(c) * static_cast<double>(tree->branching(v)) -
                                              tree->measure(v)) <= 1e-12 * tree->measure(v);
        if (uniform) schemes.push_back(BasisScheme::RootsOfUnity);
        for (BasisScheme scheme : schemes) {
            const WaveletBasis basis(*tree, scheme);
            worst = std::max(worst, gram_error(basis));
            for (int k = 0; k < 3; ++k) {
                const LeafField f = testkit::random_mean_zero(rng, *tree);
                const LeafField back = synthesize(basis, analyze(basis, f));
                for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(back[i] - f[i]));
            }
            ++bases;
        }
    }
    return {worst <= 1e-12, "max Gram/round-trip deviation " + sci(worst) + " (tol 1e-12) over " +
                                std::to_string(bases) + " bases on " + std::to_string(trees.size()) + " trees"};
}

Outcome constant_kernel_nullity(const std::vector<BallTree>& trees) {
    std::size_t nonzero_phi = 0;
    std::size_t couplings = 0;
    std::size_t checked = 0;
    for (const auto& tree : trees) {
        const WaveletBasis basis(tree);
        for (Complex c : {Complex{1.0, 0.0}, Complex{-0.37, 2.1}, Complex{1e-3, -7.5}}) {
            const Kernel F = Kernel::constant(tree, c);
            for (const auto& [pair, phi] : interaction_table(tree, F)) {
                nonzero_phi += phi != Complex{};
                ++checked;
            }
            couplings += CascadeSystem::assemble(basis, F, Kernel::constant(tree, 1.0)).coupling_count();
        }
    }
    return {nonzero_phi == 0 && couplings == 0, std::to_string(nonzero_phi) + " nonzero of " + std::to_string(checked) +
                                                    " coefficients, " + std::to_string(couplings) + " couplings stored"};
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Outcome cli_determinism(const std::string& cli, const fs::path& scenarios, const fs::path& scratch) {
    std::size_t compared = 0;
    std::size_t differing = 0;
    std::string failure;
    for (const char* name : {"single_wavelet.json", "nested_pair.json"}) {
        std::vector<fs::path> dirs;
        for (const char* run : {"a", "b"}) {
            const fs::path dir = scratch / fs::path(name).stem() / run;
            fs::remove_all(dir);
            const std::string cmd = "\"" + cli + "\" run \"" + (scenarios / name).string() + "\" --out-dir \"" +
                                    dir.string() + "\" > \"" + (scratch / "cli.log").string() + "\" 2>&1";
            if (std::system(cmd.c_str()) != 0) failure += std::string(" ") + name + " run failed;";
            dirs.push_back(dir);
        }
        if (!fs::exists(dirs[0])) continue;
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            if (entry.path().extension() != ".csv") continue;
            ++compared;
            const fs::path twin = dirs[1] / entry.path().filename();
            if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) ++differing;
        }
    }
    return {failure.empty() && compared >= 4 && differing == 0,
            std::to_string(compared) + " CSV files compared, " + std::to_string(differing) + " differ" + failure};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 4) {
        std::fprintf(stderr, "usage: %s <ucascade-cli> <scenario-dir> <scratch-dir>\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path scenarios = argv[2];
    const fs::path scratch = argv[3];
    fs::create_directories(scratch);

    std::mt19937_64 rng(20260101);
    const std::vector<BallTree> trees = sweep_trees(rng);

    bool all = true;
    auto report = [&](const char* name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %-28s %s\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        all = all && o.passed;
    };

    report("interaction closed form", [&] { return interaction_closed_form(trees, rng); });
    report("wavelet eigenvalues", [&] { return wavelet_eigenvalues(trees, rng); });
    report("single-wavelet residual", [&] { return single_wavelet_residual(rng); });
    report("nested pair closed form", [&] { return nested_pair_closed_form(scenarios, rng); });

    TriangleResult tri;
    std::string tri_error;
    try {
        tri = solver_triangle(rng);
    } catch (const std::exception& e) {
        tri_error = e.what();
    }
    report("solver agreement", [&]() -> Outcome {
        if (!tri_error.empty()) return {false, "exception: " + tri_error};
        return {tri.scenarios >= 10 && tri.pairwise <= 1e-5 && tri.basis_gap <= 1e-6,
                "pairwise " + sci(tri.pairwise) + " (tol 1e-5) on " + std::to_string(tri.scenarios) +
                    " scenarios, basis gap " + sci(tri.basis_gap) + " (tol 1e-6) on " + std::to_string(tri.basis_pairs)};
    });
    report("localization", [&]() -> Outcome {
        if (!tri_error.empty()) return {false, "exception: " + tri_error};
        return {tri.leak <= 1e-10 && tri.mean_drift <= 1e-10,
                "zero-slot leak " + sci(tri.leak) + ", leaf mean drift " + sci(tri.mean_drift) + " (tol 1e-10)"};
    });

    report("orthonormal basis", [&] { return orthonormal_basis(trees, rng); });
    report("constant kernel nullity", [&] { return constant_kernel_nullity(trees); });
    report("cli determinism", [&] { return cli_determinism(cli, scenarios, scratch); });

    std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
    return all ? 0 : 1;
}
