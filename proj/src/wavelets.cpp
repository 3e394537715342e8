#include "ucascade/wavelets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ucascade {

namespace {

// Weighted inner product over children: sum_m u_m conj(v_m) nu_m.
Complex child_inner(std::span<const Complex> u, std::span<const Complex> v, std::span<const double> weight) {
    Complex acc{};
    for (std::size_t m = 0; m < weight.size(); ++m) acc += u[m] * std::conj(v[m]) * weight[m];
    return acc;
}

void gram_schmidt_rows(std::span<Complex> rows, std::span<const double> weight) {
    const std::size_t p = weight.size();
    for (std::size_t j = 0; j + 1 < p; ++j) {
        auto row = rows.subspan(j * p, p);
        row[j] = 1.0 / weight[j];
        row[j + 1] = -1.0 / weight[j + 1];
        for (std::size_t k = 0; k < j; ++k) {
            auto prev = rows.subspan(k * p, p);
            const Complex proj = child_inner(row, prev, weight);
            for (std::size_t m = 0; m < p; ++m) row[m] -= proj * prev[m];
        }
        const double norm = std::sqrt(child_inner(row, row, weight).real());
        std::size_t lead = 0;
        while (lead < p && std::abs(row[lead]) == 0.0) ++lead;
        const double sign = row[lead].real() < 0.0 ? -1.0 : 1.0;
        for (auto& c : row) c *= sign / norm;
    }
}

void fourier_rows(std::span<Complex> rows, std::span<const double> weight, const std::string& where) {
    const std::size_t p = weight.size();
    double total = 0.0;
    for (double w : weight) total += w;
    for (double w : weight) {
        if (std::abs(w - total / static_cast<double>(p)) > 1e-12 * total)
            throw std::invalid_argument("roots-of-unity basis needs equal child measures at ball " + where);
    }
    const double scale = 1.0 / std::sqrt(total);
    for (std::size_t j = 0; j + 1 < p; ++j) {
        for (std::size_t m = 0; m < p; ++m) {
            // Reduce the phase index first so the argument stays in [0, 2pi).
            const auto k = static_cast<double>(((j + 1) * m) % p);
            rows[j * p + m] = std::polar(scale, 2.0 * std::numbers::pi * k / static_cast<double>(p));
        }
    }
}

}  // namespace

std::string to_string(BasisScheme scheme) {
    return scheme == BasisScheme::GramSchmidt ? "gram-schmidt" : "roots-of-unity";
}

BasisScheme parse_basis_scheme(std::string_view name) {
    if (name == "gram-schmidt") return BasisScheme::GramSchmidt;
    if (name == "roots-of-unity") return BasisScheme::RootsOfUnity;
    throw std::invalid_argument("unknown basis scheme '" + std::string(name) + "'");
}

std::string slot_label(const BallTree& tree, Slot slot) {
    return tree.label(slot.vertex) + ":" + std::to_string(slot.index);
}

Complex LeafField::integral(const BallTree& tree) const {
    Complex acc{};
    const auto leaves = tree.leaves();
    for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * tree.measure(leaves[i]);
    return acc;
}

double LeafField::l1_norm(const BallTree& tree) const {
    double acc = 0.0;
    const auto leaves = tree.leaves();
    for (std::size_t i = 0; i < values_.size(); ++i) acc += std::abs(values_[i]) * tree.measure(leaves[i]);
    return acc;
}

double LeafField::sup_norm() const {
    double best = 0.0;
    for (const auto& v : values_) best = std::max(best, std::abs(v));
    return best;
}

Complex WaveletField::get(Slot slot) const {
    const auto it = coefficients_.find(slot);
    return it == coefficients_.end() ? Complex{} : it->second;
}

WaveletBasis::WaveletBasis(const BallTree& tree, BasisScheme scheme)
    : tree_(&tree), scheme_(scheme), offset_(tree.size(), 0) {
    for (Vertex ball : tree.internal_vertices()) {
        const std::size_t p = tree.branching(ball);
        offset_[ball.index] = coefficients_.size();
        coefficients_.resize(coefficients_.size() + (p - 1) * p);
        for (std::size_t j = 0; j + 1 < p; ++j) slots_.push_back(Slot{ball, j});
    }
    std::vector<double> weight;
    for (Vertex ball : tree.internal_vertices()) {
        const std::size_t p = tree.branching(ball);
        weight.clear();
        for (Vertex c : tree.children(ball)) weight.push_back(tree.measure(c));
        std::span<Complex> rows(coefficients_.data() + offset_[ball.index], (p - 1) * p);
        if (scheme == BasisScheme::GramSchmidt)
            gram_schmidt_rows(rows, weight);
        else
            fourier_rows(rows, weight, tree.label(ball));
    }
}

std::size_t WaveletBasis::wavelet_count(Vertex ball) const {
    return tree_->is_leaf(ball) ? 0 : tree_->branching(ball) - 1;
}

bool WaveletBasis::contains(Slot slot) const {
    return slot.vertex.index < tree_->size() && slot.index < wavelet_count(slot.vertex);
}

std::span<const Complex> WaveletBasis::table(Vertex ball) const {
    const std::size_t p = tree_->branching(ball);
    if (p == 0) return {};
    return {coefficients_.data() + offset_[ball.index], (p - 1) * p};
}

Complex WaveletBasis::value_on_child(Slot slot, std::size_t child_position) const {
    if (!contains(slot)) throw std::invalid_argument("no wavelet " + slot_label(*tree_, slot));
    const std::size_t p = tree_->branching(slot.vertex);
    return coefficients_[offset_[slot.vertex.index] + slot.index * p + child_position];
}

Complex WaveletBasis::ancestor_value(Slot outer, Vertex inner) const {
    const Vertex child = tree_->child_toward(outer.vertex, inner);
    return value_on_child(outer, tree_->child_position(child));
}

LeafField WaveletBasis::leaf_values(Slot slot) const {
    LeafField f(tree_->leaf_count());
    const auto children = tree_->children(slot.vertex);
    for (std::size_t m = 0; m < children.size(); ++m) {
        const Complex value = value_on_child(slot, m);
        const auto [lo, hi] = tree_->leaf_range(children[m]);
        for (std::size_t i = lo; i < hi; ++i) f[i] = value;
    }
    return f;
}

WaveletField analyze(const WaveletBasis& basis, const LeafField& f) {
    const BallTree& tree = basis.tree();
    if (f.size() != tree.leaf_count()) throw std::invalid_argument("leaf field size does not match the tree");
    for (const auto& v : f.values())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("leaf field has non-finite values");
    if (std::abs(f.integral(tree)) > 1e-10 * f.l1_norm(tree))
        throw std::invalid_argument("leaf field does not have zero mean");

    // Integral of f over every ball, children before parents.
    std::vector<Complex> mass(tree.size());
    const auto leaves = tree.leaves();
    for (std::size_t i = 0; i < leaves.size(); ++i) mass[leaves[i].index] = f[i] * tree.measure(leaves[i]);
    for (std::size_t v = tree.size(); v-- > 0;)
        for (Vertex c : tree.children(Vertex{v})) mass[v] += mass[c.index];

    WaveletField field;
    for (Slot slot : basis.slots()) {
        Complex acc{};
        const auto children = tree.children(slot.vertex);
        for (std::size_t m = 0; m < children.size(); ++m)
            acc += std::conj(basis.value_on_child(slot, m)) * mass[children[m].index];
        if (acc != Complex{}) field.set(slot, acc);
    }
    return field;
}

LeafField synthesize(const WaveletBasis& basis, const WaveletField& field) {
    const BallTree& tree = basis.tree();
    LeafField f(tree.leaf_count());
    for (const auto& [slot, coefficient] : field.entries()) {
        if (!basis.contains(slot)) throw std::invalid_argument("field references unknown wavelet");
        const auto children = tree.children(slot.vertex);
        for (std::size_t m = 0; m < children.size(); ++m) {
            const Complex value = coefficient * basis.value_on_child(slot, m);
            const auto [lo, hi] = tree.leaf_range(children[m]);
            for (std::size_t i = lo; i < hi; ++i) f[i] += value;
        }
    }
    return f;
}

}  // namespace ucascade
