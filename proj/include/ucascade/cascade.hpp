#pragma once

// Cauchy problem for the quadratic cascade equation
//
//   d/dt v(x) = - sum sum F(sup(x, xi, eta)) v(xi) (v(eta) - v(x)) dnu dnu
//               - sum G(sup(x, xi)) (v(x) - v(xi)) dnu
//
// on mean-zero initial data. In wavelet coordinates it becomes the strictly
// triangular system
//
//   d/dt v_s = - v_s (eta_s + sum_{a ancestor of s} w_{s,a} v_a),
//
// solved here three ways: the top-down recurrence (each slot is an
// exponential of an integral over already-known ancestors), classical RK4 on
// the coefficients, and RK4 directly on leaf values.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ucascade/spectral.hpp"
#include "ucascade/tree.hpp"
#include "ucascade/wavelets.hpp"

namespace ucascade {

/// Raised when a solve leaves its trusted range (blow-up or an RK step whose
/// halving estimate is too large).
class NumericalAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kBlowupLimit = 1e12;
inline constexpr double kStepErrorLimit = 1e-3;

struct Coupling {
    std::size_t ancestor;  // position in CascadeSystem::slots()
    Complex weight;        // psi_ancestor on this slot's ball times Phi
};

class CascadeSystem {
public:
    /// Only couplings with a nonzero weight are stored. The basis (and its
    /// tree) must outlive the system.
    static CascadeSystem assemble(const WaveletBasis& basis, const Kernel& nonlinear, const Kernel& dissipation);

    [[nodiscard]] const WaveletBasis& basis() const { return *basis_; }
    [[nodiscard]] const BallTree& tree() const { return basis_->tree(); }
    /// Processing order: every slot comes after all of its ancestors.
    [[nodiscard]] std::span<const Slot> slots() const { return slots_; }
    [[nodiscard]] std::optional<std::size_t> index_of(Slot slot) const;
    [[nodiscard]] Complex eta(std::size_t i) const { return eta_[i]; }
    /// Ancestors from the root downward.
    [[nodiscard]] std::span<const Coupling> couplings(std::size_t i) const { return couplings_[i]; }
    [[nodiscard]] std::size_t coupling_count() const;

    /// Same system processed in another order. Throws std::invalid_argument
    /// unless `order` is a permutation of slots() with ancestors first.
    [[nodiscard]] CascadeSystem reordered(std::span<const Slot> order) const;

private:
    const WaveletBasis* basis_ = nullptr;
    std::vector<Slot> slots_;
    std::vector<Complex> eta_;
    std::vector<std::vector<Coupling>> couplings_;
};

struct SolverInfo {
    std::string solver;
    double dt = 0.0;
    std::size_t steps = 0;
    /// Largest RK4 step-halving difference; zero for the recurrence.
    double error_estimate = 0.0;
    std::string config_hash;
};

/// Uniform grid 0 = t_0 < ... < t_N = t_end. Throws std::invalid_argument
/// for non-positive arguments or when dt does not divide t_end.
std::vector<double> time_grid(double t_end, double dt);

/// Coefficient histories. Slots are kept in canonical order (vertex path
/// lexicographic, then index) so that every solver shares one layout.
struct Trajectory {
    std::vector<double> times;
    std::vector<Slot> slots;
    std::vector<std::vector<Complex>> values;  // [slot][step]
    SolverInfo info;

    [[nodiscard]] std::optional<std::size_t> find(Slot slot) const;
    [[nodiscard]] WaveletField state(std::size_t step) const;
};

struct LeafTrajectory {
    std::vector<double> times;
    std::vector<LeafField> states;
    SolverInfo info;
};

/// Slots sorted by vertex path (as integer sequences) and then index.
std::vector<Slot> canonical_order(const BallTree& tree, std::span<const Slot> slots);

/// Top-down recurrence with the ancestor integral taken by cumulative
/// trapezoid on the grid; the linear part exp(-eta t) is exact.
Trajectory solve_recurrent(const CascadeSystem& system, const WaveletField& initial, double t_end, double dt);

/// Classical RK4 on the coefficient system with step-halving error estimate.
Trajectory solve_rk(const CascadeSystem& system, const WaveletField& initial, double t_end, double dt);

/// Right-hand side of the equation evaluated directly on leaf values.
LeafField leaf_rhs(const BallTree& tree, const Kernel& nonlinear, const Kernel& dissipation, const LeafField& f,
                   std::size_t leaf_cap = kDefaultLeafCap);

/// Classical RK4 on leaf values. Rejects initial data with nonzero mean.
LeafTrajectory solve_leaf(const BallTree& tree, const Kernel& nonlinear, const Kernel& dissipation,
                          const LeafField& initial, double t_end, double dt, std::size_t leaf_cap = kDefaultLeafCap);

/// Wavelet coefficients of every state of a leaf trajectory, on `slots`.
Trajectory project(const WaveletBasis& basis, const LeafTrajectory& trajectory, std::span<const Slot> slots);

/// Leaf values of every state of a coefficient trajectory.
LeafTrajectory synthesize(const WaveletBasis& basis, const Trajectory& trajectory);

/// Largest |a - b| over all slots and steps; slots missing from one side
/// count as zero. Grids must match.
double max_deviation(const Trajectory& a, const Trajectory& b);
double max_deviation(const LeafTrajectory& a, const LeafTrajectory& b);

struct EnergyRow {
    double t;
    int depth;
    double energy;
};

/// Sum of |v|^2 over the slots at each ball depth, for every grid time and
/// every depth that holds internal balls.
std::vector<EnergyRow> energy_by_level(const BallTree& tree, const Trajectory& trajectory);

/// Two nested wavelets: `outer` on ball I, `inner` on ball J < I, with
/// coupling = psi_outer(J) * Phi_{IJ}. Exact solution at time t; eta_outer = 0
/// is handled by its limit.
struct NestedPairState {
    Complex outer;
    Complex inner;
};
NestedPairState nested_pair_solution(Complex eta_outer, Complex eta_inner, Complex coupling, Complex outer0,
                                     Complex inner0, double t);

/// Header `t,<slot>.re,<slot>.im,...`; numbers with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const BallTree& tree, const Trajectory& trajectory);
void write_energy_csv(std::ostream& out, std::span<const EnergyRow> rows);

}  // namespace ucascade
