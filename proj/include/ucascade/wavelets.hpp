#pragma once

// Orthonormal ultrametric wavelets on a BallTree.
//
// For an internal ball I with children m = 0..p_I-1, the wavelets psi_{I,j},
// j = 0..p_I-2, are constant on each child, have zero mean and are
// orthonormal in L^2(nu). Together over all internal balls they span the
// mean-zero locally constant functions.

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ucascade/tree.hpp"

namespace ucascade {

using Complex = std::complex<double>;

enum class BasisScheme {
    GramSchmidt,   ///< orthonormalized differences of normalized child indicators
    RootsOfUnity,  ///< discrete Fourier modes; needs equal child measures
};

std::string to_string(BasisScheme scheme);
BasisScheme parse_basis_scheme(std::string_view name);

/// One wavelet: ball plus index within that ball's family.
struct Slot {
    Vertex vertex;
    std::size_t index = 0;
    auto operator<=>(const Slot&) const = default;
};

/// "path:j", e.g. "0.1:0" or "root:1".
std::string slot_label(const BallTree& tree, Slot slot);

/// Piecewise-constant function: one complex value per leaf, in leaf order.
class LeafField {
public:
    LeafField() = default;
    explicit LeafField(std::size_t leaves) : values_(leaves) {}
    explicit LeafField(std::vector<Complex> values) : values_(std::move(values)) {}

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    Complex& operator[](std::size_t i) { return values_[i]; }
    const Complex& operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<const Complex> values() const { return values_; }
    [[nodiscard]] std::span<Complex> values() { return values_; }

    /// Integral against nu.
    [[nodiscard]] Complex integral(const BallTree& tree) const;
    /// Integral of |f| against nu.
    [[nodiscard]] double l1_norm(const BallTree& tree) const;
    [[nodiscard]] double sup_norm() const;

    bool operator==(const LeafField&) const = default;

private:
    std::vector<Complex> values_;
};

/// Finite wavelet expansion: slot -> coefficient. Absent slots are zero.
class WaveletField {
public:
    void set(Slot slot, Complex value) { coefficients_[slot] = value; }
    [[nodiscard]] Complex get(Slot slot) const;
    [[nodiscard]] bool empty() const { return coefficients_.empty(); }
    [[nodiscard]] std::size_t size() const { return coefficients_.size(); }
    [[nodiscard]] const std::map<Slot, Complex>& entries() const { return coefficients_; }

    bool operator==(const WaveletField&) const = default;

private:
    std::map<Slot, Complex> coefficients_;
};

class WaveletBasis {
public:
    /// The tree must outlive the basis. Throws std::invalid_argument when
    /// RootsOfUnity meets a ball whose children have unequal measures.
    WaveletBasis(const BallTree& tree, BasisScheme scheme = BasisScheme::GramSchmidt);

    [[nodiscard]] const BallTree& tree() const { return *tree_; }
    [[nodiscard]] BasisScheme scheme() const { return scheme_; }

    /// All slots, internal balls top-down, indices ascending.
    [[nodiscard]] std::span<const Slot> slots() const { return slots_; }
    [[nodiscard]] std::size_t wavelet_count(Vertex ball) const;
    [[nodiscard]] bool contains(Slot slot) const;

    /// Constant value of psi_slot on the child of its ball at `child_position`.
    [[nodiscard]] Complex value_on_child(Slot slot, std::size_t child_position) const;
    /// The (p_I - 1) x p_I coefficient table of a ball, row-major.
    [[nodiscard]] std::span<const Complex> table(Vertex ball) const;

    /// Value of psi_{J,j} on ball `inner`, which must lie strictly inside J.
    [[nodiscard]] Complex ancestor_value(Slot outer, Vertex inner) const;
    /// psi_slot sampled on every leaf.
    [[nodiscard]] LeafField leaf_values(Slot slot) const;

private:
    const BallTree* tree_;
    BasisScheme scheme_;
    std::vector<std::size_t> offset_;  // per vertex, into coefficients_
    std::vector<Complex> coefficients_;
    std::vector<Slot> slots_;
};

/// Coefficients <f, psi> for every slot; exact zeros are omitted. Throws
/// std::invalid_argument unless f has zero mean to 1e-10 relative to its L1
/// norm: constants are outside the span of the wavelets.
WaveletField analyze(const WaveletBasis& basis, const LeafField& f);

/// Sum of coefficient * psi over the field.
LeafField synthesize(const WaveletBasis& basis, const WaveletField& field);

}  // namespace ucascade
