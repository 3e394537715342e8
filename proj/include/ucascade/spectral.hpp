#pragma once

// Spectral data of the cascade equation.
//
// The linear term is an ultrametric pseudodifferential operator
//   (Tf)(x) = sum_y T(sup(x, y)) (f(x) - f(y)) nu(y),
// diagonal on wavelets with eigenvalue depending only on the ball. The
// quadratic term couples a wavelet on ball J to one on a strictly larger
// ball I through a single coefficient Phi_{IJ}. Both closed forms live here
// together with exact finite-sum evaluations of the underlying integrals.

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ucascade/tree.hpp"
#include "ucascade/wavelets.hpp"

namespace ucascade {

/// Config-level description of a kernel, independent of any particular tree.
struct KernelSpec {
    enum class Kind { Power, Table };
    Kind kind = Kind::Power;
    /// Power family: value(I) = amplitude * diameter(I)^exponent.
    Complex amplitude{1.0, 0.0};
    double exponent = 0.0;
    /// Table values for Kind::Table, per-vertex overrides for Kind::Power.
    std::vector<std::pair<std::string, Complex>> entries;

    bool operator==(const KernelSpec&) const = default;
};

/// Complex function on the vertices of one tree.
class Kernel {
public:
    /// Throws std::invalid_argument on an unknown vertex path, a non-finite
    /// value, or a table that misses some vertex.
    static Kernel resolve(const KernelSpec& spec, const BallTree& tree);
    static Kernel constant(const BallTree& tree, Complex value);
    Kernel() = default;
    explicit Kernel(std::vector<Complex> values);

    [[nodiscard]] Complex operator()(Vertex v) const { return values_[v.index]; }
    [[nodiscard]] std::span<const Complex> values() const { return values_; }
    [[nodiscard]] bool is_real() const;

private:
    std::vector<Complex> values_;
};

/// Eigenvalue of the operator with this kernel on any wavelet of ball I:
///   K(I) nu(I) + sum_{J > I} K(J) (nu(J) - nu(J, I)).
/// Plays the role of eta_I for the dissipative kernel.
Complex eigenvalue(const BallTree& tree, const Kernel& kernel, Vertex ball);

/// Phi_{outer, inner}: nonzero only when inner lies strictly inside outer,
///   nu(outer, inner)^2 F(outer) - nu(inner)^2 F(inner)
///     - sum_{inner < L < outer} (nu(L)^2 - nu(L, inner)^2) F(L),
/// evaluated as the equivalent chain sum of nu^2 times kernel differences.
Complex interaction_coefficient(const BallTree& tree, const Kernel& kernel, Vertex outer, Vertex inner);

/// Phi for every strict (outer, inner) pair.
std::map<std::pair<Vertex, Vertex>, Complex> interaction_table(const BallTree& tree, const Kernel& kernel);

/// Direct O(L^2) evaluation of the operator on a leaf field.
LeafField apply_pdo_direct(const BallTree& tree, const Kernel& kernel, const LeafField& f);

inline constexpr std::size_t kDefaultLeafCap = 100;

/// Direct evaluation of the quadratic interaction integral
///   I[phi, psi](x) = sum_eta [ sum_xi F(sup(x, xi, eta)) phi(xi) nu(xi) ] (psi(eta) - psi(x)) nu(eta)
/// with the xi-sum taken innermost. The bracket depends only on phi, so it is
/// tabulated once per phi and reused for every psi. Construction costs
/// O(L^2 |supp phi|); apply costs O(L |supp psi|) plus O(L^2) on supp psi.
class InteractionQuadrature {
public:
    /// Throws std::invalid_argument when the tree has more than leaf_cap leaves.
    InteractionQuadrature(const BallTree& tree, const Kernel& kernel, const LeafField& phi,
                          std::size_t leaf_cap = kDefaultLeafCap);

    [[nodiscard]] LeafField apply(const LeafField& psi) const;

private:
    const BallTree* tree_;
    std::size_t leaves_;
    std::vector<Complex> inner_;  // [x * L + eta]
};

LeafField interaction_integral_direct(const BallTree& tree, const Kernel& kernel, const LeafField& phi,
                                      const LeafField& psi, std::size_t leaf_cap = kDefaultLeafCap);

}  // namespace ucascade
