#include "ucascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace ucascade {

namespace {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// (e^z - 1) / z
Complex exprel(Complex z) {
    if (std::abs(z) < 1e-4) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    return (std::exp(z) - 1.0) / z;
}

void check_finite_bounded(Complex v, const std::string& where) {
    if (!(std::abs(v) <= kBlowupLimit))
        throw NumericalAbort("coefficient magnitude left the trusted range at " + where);
}

std::vector<Complex> initial_vector(const CascadeSystem& system, const WaveletField& initial) {
    std::vector<Complex> v(system.slots().size());
    for (const auto& [slot, value] : initial.entries()) {
        const auto i = system.index_of(slot);
        if (!i) throw std::invalid_argument("initial condition uses unknown wavelet " + slot_label(system.tree(), slot));
        v[*i] = value;
    }
    return v;
}

Trajectory empty_trajectory(const BallTree& tree, std::span<const Slot> slots, std::vector<double> times) {
    Trajectory traj;
    traj.slots = canonical_order(tree, slots);
    traj.values.assign(traj.slots.size(), std::vector<Complex>(times.size()));
    traj.times = std::move(times);
    return traj;
}

double step_of(const std::vector<double>& times) { return times.size() > 1 ? times[1] - times[0] : 0.0; }

// Classical RK4 with a step-halving comparison on every step. The value kept
// is the full step; the halved pair only feeds the error estimate.
template <class State, class Rhs, class Axpy>
double rk4_step(State& y, double h, const Rhs& rhs, const Axpy& axpy) {
    auto one_step = [&](const State& y0, double dt) {
        const State k1 = rhs(y0);
        const State k2 = rhs(axpy(y0, dt / 2, k1));
        const State k3 = rhs(axpy(y0, dt / 2, k2));
        const State k4 = rhs(axpy(y0, dt, k3));
        State out = y0;
        out = axpy(out, dt / 6, k1);
        out = axpy(out, dt / 3, k2);
        out = axpy(out, dt / 3, k3);
        out = axpy(out, dt / 6, k4);
        return out;
    };
    State full = one_step(y, h);
    const State halves = one_step(one_step(y, h / 2), h / 2);
    double diff = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) diff = std::max(diff, std::abs(full[i] - halves[i]));
    y = std::move(full);
    return diff;
}

}  // namespace

CascadeSystem CascadeSystem::assemble(const WaveletBasis& basis, const Kernel& nonlinear, const Kernel& dissipation) {
    const BallTree& tree = basis.tree();
    if (nonlinear.values().size() != tree.size() || dissipation.values().size() != tree.size())
        throw std::invalid_argument("kernel does not match the tree");

    CascadeSystem sys;
    sys.basis_ = &basis;
    sys.slots_.assign(basis.slots().begin(), basis.slots().end());
    std::map<Slot, std::size_t> position;
    for (std::size_t i = 0; i < sys.slots_.size(); ++i) position[sys.slots_[i]] = i;

    std::vector<Complex> eta_by_vertex(tree.size());
    for (Vertex ball : tree.internal_vertices()) eta_by_vertex[ball.index] = eigenvalue(tree, dissipation, ball);

    sys.eta_.reserve(sys.slots_.size());
    sys.couplings_.resize(sys.slots_.size());
    std::vector<Vertex> ancestors;
    for (std::size_t i = 0; i < sys.slots_.size(); ++i) {
        const Vertex ball = sys.slots_[i].vertex;
        sys.eta_.push_back(eta_by_vertex[ball.index]);
        ancestors.clear();
        for (auto up = tree.parent(ball); up; up = tree.parent(*up)) ancestors.push_back(*up);
        std::reverse(ancestors.begin(), ancestors.end());
        for (Vertex outer : ancestors) {
            const Complex phi = interaction_coefficient(tree, nonlinear, outer, ball);
            if (phi == Complex{}) continue;
            for (std::size_t j = 0; j < basis.wavelet_count(outer); ++j) {
                const Slot anc{outer, j};
                const Complex w = basis.ancestor_value(anc, ball) * phi;
                if (w != Complex{}) sys.couplings_[i].push_back(Coupling{position.at(anc), w});
            }
        }
    }
    return sys;
}

std::optional<std::size_t> CascadeSystem::index_of(Slot slot) const {
    const auto it = std::find(slots_.begin(), slots_.end(), slot);
    if (it == slots_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - slots_.begin());
}

std::size_t CascadeSystem::coupling_count() const {
    std::size_t n = 0;
    for (const auto& c : couplings_) n += c.size();
    return n;
}

CascadeSystem CascadeSystem::reordered(std::span<const Slot> order) const {
    if (order.size() != slots_.size()) throw std::invalid_argument("order is not a permutation of the slots");
    std::vector<std::size_t> old_to_new(slots_.size(), slots_.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto i = index_of(order[k]);
        if (!i || old_to_new[*i] != slots_.size()) throw std::invalid_argument("order is not a permutation of the slots");
        old_to_new[*i] = k;
    }
    CascadeSystem out;
    out.basis_ = basis_;
    out.slots_.assign(order.begin(), order.end());
    out.eta_.resize(slots_.size());
    out.couplings_.resize(slots_.size());
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const std::size_t k = old_to_new[i];
        out.eta_[k] = eta_[i];
        for (const auto& c : couplings_[i]) {
            if (old_to_new[c.ancestor] >= k) throw std::invalid_argument("order places a slot before its ancestor");
            out.couplings_[k].push_back(Coupling{old_to_new[c.ancestor], c.weight});
        }
    }
    // Ancestor slots without a stored coupling still have to come first.
    const BallTree& t = tree();
    for (std::size_t k = 0; k < order.size(); ++k)
        for (std::size_t m = 0; m < k; ++m)
            if (t.strictly_below(order[m].vertex, order[k].vertex))
                throw std::invalid_argument("order places a slot before its ancestor");
    return out;
}

std::vector<double> time_grid(double t_end, double dt) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    const double ratio = t_end / dt;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("dt does not divide t_end");
    const auto steps = static_cast<std::size_t>(n);
    std::vector<double> times(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) times[k] = t_end * static_cast<double>(k) / static_cast<double>(steps);
    return times;
}

std::optional<std::size_t> Trajectory::find(Slot slot) const {
    const auto it = std::find(slots.begin(), slots.end(), slot);
    if (it == slots.end()) return std::nullopt;
    return static_cast<std::size_t>(it - slots.begin());
}

WaveletField Trajectory::state(std::size_t step) const {
    WaveletField field;
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (values[i][step] != Complex{}) field.set(slots[i], values[i][step]);
    return field;
}

std::vector<Slot> canonical_order(const BallTree& tree, std::span<const Slot> slots) {
    std::vector<Slot> out(slots.begin(), slots.end());
    std::sort(out.begin(), out.end(), [&](Slot a, Slot b) {
        const auto& pa = tree.path(a.vertex);
        const auto& pb = tree.path(b.vertex);
        if (pa != pb) return pa < pb;
        return a.index < b.index;
    });
    return out;
}

Trajectory solve_recurrent(const CascadeSystem& system, const WaveletField& initial, double t_end, double dt) {
    auto times = time_grid(t_end, dt);
    const std::vector<Complex> v0 = initial_vector(system, initial);
    const std::size_t n = system.slots().size();
    const std::size_t steps = times.size();

    std::vector<std::vector<Complex>> history(n);
    std::vector<Complex> integrand(steps);
    for (std::size_t i = 0; i < n; ++i) {
        auto& out = history[i];
        out.assign(steps, Complex{});
        if (v0[i] == Complex{}) continue;

        std::fill(integrand.begin(), integrand.end(), Complex{});
        for (const auto& c : system.couplings(i)) {
            const auto& ancestor = history[c.ancestor];
            for (std::size_t k = 0; k < steps; ++k) integrand[k] += c.weight * ancestor[k];
        }
        Complex cumulative{};
        const Complex eta = system.eta(i);
        out[0] = v0[i];
        for (std::size_t k = 1; k < steps; ++k) {
            cumulative += 0.5 * (times[k] - times[k - 1]) * (integrand[k - 1] + integrand[k]);
            out[k] = v0[i] * std::exp(-eta * times[k] - cumulative);
            check_finite_bounded(out[k], slot_label(system.tree(), system.slots()[i]));
        }
    }

    Trajectory traj = empty_trajectory(system.tree(), system.slots(), times);
    for (std::size_t i = 0; i < n; ++i) traj.values[*traj.find(system.slots()[i])] = std::move(history[i]);
    traj.info = SolverInfo{"recurrent", step_of(traj.times), steps - 1, 0.0, {}};
    return traj;
}

Trajectory solve_rk(const CascadeSystem& system, const WaveletField& initial, double t_end, double dt) {
    auto times = time_grid(t_end, dt);
    const std::size_t n = system.slots().size();
    std::vector<Complex> y = initial_vector(system, initial);

    auto rhs = [&](const std::vector<Complex>& v) {
        std::vector<Complex> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (v[i] == Complex{}) continue;
            Complex rate = system.eta(i);
            for (const auto& c : system.couplings(i)) rate += c.weight * v[c.ancestor];
            out[i] = -v[i] * rate;
        }
        return out;
    };
    auto axpy = [](const std::vector<Complex>& a, double h, const std::vector<Complex>& b) {
        std::vector<Complex> out(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * b[i];
        return out;
    };

    std::vector<std::vector<Complex>> history(n, std::vector<Complex>(times.size()));
    for (std::size_t i = 0; i < n; ++i) history[i][0] = y[i];
    double worst = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double err = rk4_step(y, times[k] - times[k - 1], rhs, axpy);
        worst = std::max(worst, err);
        if (!(err <= kStepErrorLimit))
            throw NumericalAbort("RK4 step at t=" + format_number(times[k]) + " rejected (halving estimate " +
                                 format_number(err) + "); reduce dt");
        for (std::size_t i = 0; i < n; ++i) {
            check_finite_bounded(y[i], slot_label(system.tree(), system.slots()[i]));
            history[i][k] = y[i];
        }
    }

    Trajectory traj = empty_trajectory(system.tree(), system.slots(), times);
    for (std::size_t i = 0; i < n; ++i) traj.values[*traj.find(system.slots()[i])] = std::move(history[i]);
    traj.info = SolverInfo{"rk", step_of(traj.times), traj.times.size() - 1, worst, {}};
    return traj;
}

LeafField leaf_rhs(const BallTree& tree, const Kernel& nonlinear, const Kernel& dissipation, const LeafField& f,
                   std::size_t leaf_cap) {
    const LeafField quadratic = interaction_integral_direct(tree, nonlinear, f, f, leaf_cap);
    const LeafField linear = apply_pdo_direct(tree, dissipation, f);
    LeafField out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = -quadratic[i] - linear[i];
    return out;
}

LeafTrajectory solve_leaf(const BallTree& tree, const Kernel& nonlinear, const Kernel& dissipation,
                          const LeafField& initial, double t_end, double dt, std::size_t leaf_cap) {
    auto times = time_grid(t_end, dt);
    if (initial.size() != tree.leaf_count()) throw std::invalid_argument("leaf field size does not match the tree");
    if (tree.leaf_count() > leaf_cap)
        throw std::invalid_argument("leaf solver over " + std::to_string(tree.leaf_count()) +
                                    " leaves exceeds the cap of " + std::to_string(leaf_cap));
    if (std::abs(initial.integral(tree)) > 1e-10 * initial.l1_norm(tree))
        throw std::invalid_argument("initial leaf field does not have zero mean");

    auto rhs = [&](const LeafField& f) { return leaf_rhs(tree, nonlinear, dissipation, f, leaf_cap); };
    auto axpy = [](const LeafField& a, double h, const LeafField& b) {
        LeafField out(a);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * b[i];
        return out;
    };

    LeafTrajectory traj;
    traj.states.reserve(times.size());
    traj.states.push_back(initial);
    LeafField y = initial;
    double worst = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double err = rk4_step(y, times[k] - times[k - 1], rhs, axpy);
        worst = std::max(worst, err);
        if (!(err <= kStepErrorLimit))
            throw NumericalAbort("leaf RK4 step at t=" + format_number(times[k]) + " rejected (halving estimate " +
                                 format_number(err) + "); reduce dt");
        for (std::size_t i = 0; i < y.size(); ++i) check_finite_bounded(y[i], tree.label(tree.leaves()[i]));
        traj.states.push_back(y);
    }
    traj.info = SolverInfo{"leaf", step_of(times), times.size() - 1, worst, {}};
    traj.times = std::move(times);
    return traj;
}

Trajectory project(const WaveletBasis& basis, const LeafTrajectory& trajectory, std::span<const Slot> slots) {
    Trajectory traj = empty_trajectory(basis.tree(), slots, trajectory.times);
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
        const WaveletField field = analyze(basis, trajectory.states[k]);
        for (std::size_t i = 0; i < traj.slots.size(); ++i) traj.values[i][k] = field.get(traj.slots[i]);
    }
    traj.info = trajectory.info;
    return traj;
}

LeafTrajectory synthesize(const WaveletBasis& basis, const Trajectory& trajectory) {
    LeafTrajectory out;
    out.times = trajectory.times;
    out.info = trajectory.info;
    out.states.reserve(trajectory.times.size());
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) out.states.push_back(synthesize(basis, trajectory.state(k)));
    return out;
}

double max_deviation(const Trajectory& a, const Trajectory& b) {
    if (a.times != b.times) throw std::invalid_argument("trajectories are on different grids");
    std::map<Slot, std::pair<const std::vector<Complex>*, const std::vector<Complex>*>> joined;
    for (std::size_t i = 0; i < a.slots.size(); ++i) joined[a.slots[i]].first = &a.values[i];
    for (std::size_t i = 0; i < b.slots.size(); ++i) joined[b.slots[i]].second = &b.values[i];
    double worst = 0.0;
    for (const auto& [slot, pair] : joined) {
        for (std::size_t k = 0; k < a.times.size(); ++k) {
            const Complex x = pair.first ? (*pair.first)[k] : Complex{};
            const Complex y = pair.second ? (*pair.second)[k] : Complex{};
            worst = std::max(worst, std::abs(x - y));
        }
    }
    return worst;
}

double max_deviation(const LeafTrajectory& a, const LeafTrajectory& b) {
    if (a.times != b.times) throw std::invalid_argument("trajectories are on different grids");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k)
        for (std::size_t i = 0; i < a.states[k].size(); ++i)
            worst = std::max(worst, std::abs(a.states[k][i] - b.states[k][i]));
    return worst;
}

std::vector<EnergyRow> energy_by_level(const BallTree& tree, const Trajectory& trajectory) {
    int deepest = -1;
    for (Vertex ball : tree.internal_vertices()) deepest = std::max(deepest, tree.depth(ball));
    std::vector<EnergyRow> rows;
    rows.reserve(trajectory.times.size() * static_cast<std::size_t>(deepest + 1));
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        std::vector<double> level(static_cast<std::size_t>(deepest + 1), 0.0);
        for (std::size_t i = 0; i < trajectory.slots.size(); ++i)
            level[static_cast<std::size_t>(tree.depth(trajectory.slots[i].vertex))] += std::norm(trajectory.values[i][k]);
        for (int d = 0; d <= deepest; ++d)
            rows.push_back(EnergyRow{trajectory.times[k], d, level[static_cast<std::size_t>(d)]});
    }
    return rows;
}

NestedPairState nested_pair_solution(Complex eta_outer, Complex eta_inner, Complex coupling, Complex outer0,
                                     Complex inner0, double t) {
    // integral_0^t exp(-eta_outer s) ds = t * exprel(-eta_outer t), equal to t when eta_outer = 0.
    const Complex outer_integral = outer0 * t * exprel(-eta_outer * t);
    return NestedPairState{outer0 * std::exp(-eta_outer * t),
                           inner0 * std::exp(-eta_inner * t - coupling * outer_integral)};
}

void write_trajectory_csv(std::ostream& out, const BallTree& tree, const Trajectory& trajectory) {
    out << 't';
    for (Slot slot : trajectory.slots) {
        const std::string label = slot_label(tree, slot);
        out << ',' << label << ".re," << label << ".im";
    }
    out << '\n';
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        out << format_number(trajectory.times[k]);
        for (const auto& series : trajectory.values)
            out << ',' << format_number(series[k].real()) << ',' << format_number(series[k].imag());
        out << '\n';
    }
}

void write_energy_csv(std::ostream& out, std::span<const EnergyRow> rows) {
    out << "t,depth,energy\n";
    for (const auto& row : rows) out << format_number(row.t) << ',' << row.depth << ',' << format_number(row.energy) << '\n';
}

}  // namespace ucascade
