#pragma once

// Finite regular ultrametric spaces, represented by their rooted tree of balls.
//
// Leaves are the minimal balls and carry the atomic measure; every other
// measure is derived by summing over children. The ultrametric on leaves is
// d(a, b) = diameter(sup(a, b)).

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ucascade {

/// Index of a ball in a BallTree. Vertices are numbered in depth-first
/// preorder, so the root is always 0 and a vertex precedes its descendants.
struct Vertex {
    std::size_t index = 0;
    auto operator<=>(const Vertex&) const = default;
};

/// Complete p-ary tree of the given depth, total measure spread evenly over
/// the leaves, diameter q^(-depth) at each depth.
struct PadicTreeSpec {
    int p = 2;
    int depth = 1;
    double measure = 1.0;
    double q = 2.0;
    bool operator==(const PadicTreeSpec&) const = default;
};

/// Explicit nested description. Leaves must carry a measure; internal nodes
/// must not. Diameters are optional everywhere and default to q^(-depth).
struct NestedBall {
    std::vector<NestedBall> children;
    std::optional<double> measure;
    std::optional<double> diameter;
    bool operator==(const NestedBall&) const = default;
};

struct ExplicitTreeSpec {
    NestedBall root;
    double q = 2.0;
    bool operator==(const ExplicitTreeSpec&) const = default;
};

using TreeSpec = std::variant<PadicTreeSpec, ExplicitTreeSpec>;

class BallTree {
public:
    /// Builds and validates a tree. Throws std::invalid_argument on a
    /// single-child vertex, a non-positive measure or a diameter that does
    /// not strictly increase toward the root.
    static BallTree build(const TreeSpec& spec);
    static BallTree padic(int p, int depth, double measure = 1.0, double q = 2.0);

    /// Explicit form with every measure (leaves only) and every diameter
    /// filled in; build(to_spec()) reproduces the tree.
    [[nodiscard]] ExplicitTreeSpec to_spec() const;

    [[nodiscard]] std::size_t size() const { return parent_.size(); }
    [[nodiscard]] Vertex root() const { return Vertex{0}; }
    [[nodiscard]] std::optional<Vertex> parent(Vertex v) const;
    [[nodiscard]] std::span<const Vertex> children(Vertex v) const { return children_[v.index]; }
    [[nodiscard]] std::size_t branching(Vertex v) const { return children_[v.index].size(); }
    [[nodiscard]] bool is_leaf(Vertex v) const { return children_[v.index].empty(); }
    [[nodiscard]] int depth(Vertex v) const { return depth_[v.index]; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] double measure(Vertex v) const { return measure_[v.index]; }
    [[nodiscard]] double diameter(Vertex v) const { return diameter_[v.index]; }
    /// Dot-joined child indices from the root ("0.2.1"); the root is "root".
    [[nodiscard]] const std::string& label(Vertex v) const { return label_[v.index]; }
    /// Child indices from the root.
    [[nodiscard]] const std::vector<std::size_t>& path(Vertex v) const { return path_[v.index]; }
    /// Accepts a label as produced by label(), or "" for the root.
    [[nodiscard]] std::optional<Vertex> find(std::string_view label) const;

    /// Leaves in left-to-right order. The leaves below any vertex form a
    /// contiguous run of this sequence.
    [[nodiscard]] std::span<const Vertex> leaves() const { return leaves_; }
    [[nodiscard]] std::size_t leaf_count() const { return leaves_.size(); }
    [[nodiscard]] std::size_t leaf_position(Vertex leaf) const;
    /// Half-open range of leaf positions under v.
    [[nodiscard]] std::pair<std::size_t, std::size_t> leaf_range(Vertex v) const { return leaf_range_[v.index]; }

    /// Non-leaf vertices ordered by depth, then by preorder index.
    [[nodiscard]] std::span<const Vertex> internal_vertices() const { return internal_; }

    /// Least common ancestor under inclusion.
    [[nodiscard]] Vertex sup(Vertex a, Vertex b) const;
    [[nodiscard]] Vertex sup(Vertex a, Vertex b, Vertex c) const { return sup(sup(a, b), c); }
    /// True when ball `inner` is a strict subset of ball `outer`.
    [[nodiscard]] bool strictly_below(Vertex inner, Vertex outer) const;
    /// Child of `outer` whose ball contains `inner`. Requires inner < outer.
    [[nodiscard]] Vertex child_toward(Vertex outer, Vertex inner) const;
    /// nu(outer, inner): measure of the maximal subball of `outer` containing `inner`.
    [[nodiscard]] double measure_toward(Vertex outer, Vertex inner) const;
    /// Position of `child` among the children of its parent.
    [[nodiscard]] std::size_t child_position(Vertex child) const { return path_[child.index].back(); }

private:
    BallTree() = default;
    void add_subtree(const NestedBall& node, std::optional<Vertex> parent, double q);
    void finalize();

    std::vector<std::optional<Vertex>> parent_;
    std::vector<std::vector<Vertex>> children_;
    std::vector<int> depth_;
    std::vector<double> measure_;
    std::vector<double> diameter_;
    std::vector<std::string> label_;
    std::vector<std::vector<std::size_t>> path_;
    std::vector<Vertex> leaves_;
    std::vector<std::size_t> leaf_position_;
    std::vector<std::pair<std::size_t, std::size_t>> leaf_range_;
    std::vector<Vertex> internal_;
    int height_ = 0;
};

/// Diameter of the smallest ball holding both leaves.
inline double ultrametric_distance(const BallTree& tree, Vertex a, Vertex b) {
    return a == b ? 0.0 : tree.diameter(tree.sup(a, b));
}

}  // namespace ucascade
