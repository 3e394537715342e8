#include "ucascade/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace ucascade {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// sup(a, b) for every ordered pair of leaf positions.
std::vector<Vertex> leaf_sup_table(const BallTree& tree) {
    const auto leaves = tree.leaves();
    const std::size_t n = leaves.size();
    std::vector<Vertex> table(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        table[a * n + a] = leaves[a];
        for (std::size_t b = a + 1; b < n; ++b) table[a * n + b] = table[b * n + a] = tree.sup(leaves[a], leaves[b]);
    }
    return table;
}

}  // namespace

Kernel::Kernel(std::vector<Complex> values) : values_(std::move(values)) {
    for (const auto& v : values_)
        if (!finite(v)) throw std::invalid_argument("kernel value is not finite");
}

Kernel Kernel::constant(const BallTree& tree, Complex value) {
    return Kernel(std::vector<Complex>(tree.size(), value));
}

Kernel Kernel::resolve(const KernelSpec& spec, const BallTree& tree) {
    std::vector<Complex> values(tree.size());
    std::vector<bool> set(tree.size(), spec.kind == KernelSpec::Kind::Power);
    if (spec.kind == KernelSpec::Kind::Power) {
        for (std::size_t v = 0; v < tree.size(); ++v)
            values[v] = spec.amplitude * std::pow(tree.diameter(Vertex{v}), spec.exponent);
    }
    for (const auto& [path, value] : spec.entries) {
        const auto v = tree.find(path);
        if (!v) throw std::invalid_argument("kernel entry refers to unknown vertex '" + path + "'");
        values[v->index] = value;
        set[v->index] = true;
    }
    for (std::size_t v = 0; v < tree.size(); ++v)
        if (!set[v]) throw std::invalid_argument("kernel table has no value for vertex " + tree.label(Vertex{v}));
    return Kernel(std::move(values));
}

bool Kernel::is_real() const {
    for (const auto& v : values_)
        if (v.imag() != 0.0) return false;
    return true;
}

Complex eigenvalue(const BallTree& tree, const Kernel& kernel, Vertex ball) {
    if (tree.is_leaf(ball)) throw std::invalid_argument("eigenvalue requested for leaf " + tree.label(ball));
    Complex acc = kernel(ball) * tree.measure(ball);
    Vertex below = ball;
    for (auto above = tree.parent(ball); above; below = *above, above = tree.parent(*above))
        acc += kernel(*above) * (tree.measure(*above) - tree.measure(below));
    return acc;
}

Complex interaction_coefficient(const BallTree& tree, const Kernel& kernel, Vertex outer, Vertex inner) {
    if (!tree.strictly_below(inner, outer)) return {};
    // Collecting the nu^2 terms per ball along the chain inner = L_0 < L_1 <
    // ... < L_{k+1} = outer gives sum_m nu(L_m)^2 (F(L_{m+1}) - F(L_m)),
    // which is exactly zero for a constant kernel.
    Complex acc{};
    Vertex below = inner;
    while (below != outer) {
        const Vertex above = *tree.parent(below);
        const double m = tree.measure(below);
        acc += m * m * (kernel(above) - kernel(below));
        below = above;
    }
    return acc;
}

std::map<std::pair<Vertex, Vertex>, Complex> interaction_table(const BallTree& tree, const Kernel& kernel) {
    std::map<std::pair<Vertex, Vertex>, Complex> table;
    for (std::size_t v = 0; v < tree.size(); ++v) {
        const Vertex inner{v};
        for (auto outer = tree.parent(inner); outer; outer = tree.parent(*outer))
            table[{*outer, inner}] = interaction_coefficient(tree, kernel, *outer, inner);
    }
    return table;
}

LeafField apply_pdo_direct(const BallTree& tree, const Kernel& kernel, const LeafField& f) {
    const std::size_t n = tree.leaf_count();
    if (f.size() != n) throw std::invalid_argument("leaf field size does not match the tree");
    const auto sup = leaf_sup_table(tree);
    const auto leaves = tree.leaves();
    LeafField out(n);
    for (std::size_t a = 0; a < n; ++a) {
        Complex acc{};
        for (std::size_t b = 0; b < n; ++b)
            acc += kernel(sup[a * n + b]) * (f[a] - f[b]) * tree.measure(leaves[b]);
        out[a] = acc;
    }
    return out;
}

InteractionQuadrature::InteractionQuadrature(const BallTree& tree, const Kernel& kernel, const LeafField& phi,
                                             std::size_t leaf_cap)
    : tree_(&tree), leaves_(tree.leaf_count()) {
    const std::size_t n = leaves_;
    if (n > leaf_cap)
        throw std::invalid_argument("direct triple sum over " + std::to_string(n) + " leaves exceeds the cap of " +
                                    std::to_string(leaf_cap));
    if (phi.size() != n) throw std::invalid_argument("leaf field size does not match the tree");

    const auto sup = leaf_sup_table(tree);
    const auto leaves = tree.leaves();
    std::vector<std::size_t> support;
    std::vector<Complex> weighted;
    for (std::size_t b = 0; b < n; ++b) {
        if (phi[b] == Complex{}) continue;
        support.push_back(b);
        weighted.push_back(phi[b] * tree.measure(leaves[b]));
    }

    inner_.assign(n * n, Complex{});
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t eta = 0; eta < n; ++eta) {
            // sup(x, xi, eta) is the larger of sup(x, xi) and sup(x, eta):
            // both contain x, so they are nested.
            const Vertex s_eta = sup[x * n + eta];
            const int d_eta = tree.depth(s_eta);
            Complex acc{};
            for (std::size_t k = 0; k < support.size(); ++k) {
                const Vertex s_xi = sup[x * n + support[k]];
                const Vertex top = tree.depth(s_xi) < d_eta ? s_xi : s_eta;
                acc += kernel(top) * weighted[k];
            }
            inner_[x * n + eta] = acc;
        }
    }
}

LeafField InteractionQuadrature::apply(const LeafField& psi) const {
    const std::size_t n = leaves_;
    if (psi.size() != n) throw std::invalid_argument("leaf field size does not match the tree");
    const auto leaves = tree_->leaves();
    std::vector<std::size_t> support;
    for (std::size_t c = 0; c < n; ++c)
        if (psi[c] != Complex{}) support.push_back(c);

    LeafField out(n);
    for (std::size_t x = 0; x < n; ++x) {
        const Complex* row = inner_.data() + x * n;
        Complex acc{};
        if (psi[x] == Complex{}) {
            // psi(eta) - psi(x) vanishes off the support of psi.
            for (std::size_t eta : support) acc += row[eta] * psi[eta] * tree_->measure(leaves[eta]);
        } else {
            for (std::size_t eta = 0; eta < n; ++eta)
                acc += row[eta] * (psi[eta] - psi[x]) * tree_->measure(leaves[eta]);
        }
        out[x] = acc;
    }
    return out;
}

LeafField interaction_integral_direct(const BallTree& tree, const Kernel& kernel, const LeafField& phi,
                                      const LeafField& psi, std::size_t leaf_cap) {
    return InteractionQuadrature(tree, kernel, phi, leaf_cap).apply(psi);
}

}  // namespace ucascade
