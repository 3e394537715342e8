#include "ucascade/tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ucascade {

namespace {

NestedBall padic_ball(int p, int levels_below, double leaf_measure) {
    NestedBall ball;
    if (levels_below == 0) {
        ball.measure = leaf_measure;
        return ball;
    }
    ball.children.reserve(static_cast<std::size_t>(p));
    for (int m = 0; m < p; ++m) ball.children.push_back(padic_ball(p, levels_below - 1, leaf_measure));
    return ball;
}

std::string join_path(const std::vector<std::size_t>& path) {
    if (path.empty()) return "root";
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(path[i]);
    }
    return out;
}

}  // namespace

BallTree BallTree::padic(int p, int depth, double measure, double q) {
    return build(PadicTreeSpec{p, depth, measure, q});
}

BallTree BallTree::build(const TreeSpec& spec) {
    BallTree tree;
    if (const auto* padic = std::get_if<PadicTreeSpec>(&spec)) {
        if (padic->p < 2) throw std::invalid_argument("p-adic tree needs branching p >= 2");
        if (padic->depth < 1) throw std::invalid_argument("p-adic tree needs depth >= 1");
        if (!(padic->measure > 0.0) || !std::isfinite(padic->measure))
            throw std::invalid_argument("p-adic tree needs a positive finite total measure");
        if (!(padic->q > 1.0)) throw std::invalid_argument("p-adic tree needs diameter ratio q > 1");
        const double leaf_measure = padic->measure * std::pow(static_cast<double>(padic->p), -padic->depth);
        tree.add_subtree(padic_ball(padic->p, padic->depth, leaf_measure), std::nullopt, padic->q);
    } else {
        const auto& expl = std::get<ExplicitTreeSpec>(spec);
        if (!(expl.q > 1.0)) throw std::invalid_argument("explicit tree needs diameter ratio q > 1");
        tree.add_subtree(expl.root, std::nullopt, expl.q);
    }
    tree.finalize();
    return tree;
}

void BallTree::add_subtree(const NestedBall& node, std::optional<Vertex> parent, double q) {
    const Vertex v{parent_.size()};
    const int d = parent ? depth_[parent->index] + 1 : 0;
    std::vector<std::size_t> path = parent ? path_[parent->index] : std::vector<std::size_t>{};
    if (parent) path.push_back(children_[parent->index].size());

    parent_.push_back(parent);
    children_.emplace_back();
    depth_.push_back(d);
    measure_.push_back(0.0);
    diameter_.push_back(node.diameter.value_or(std::pow(q, -d)));
    label_.push_back(join_path(path));
    path_.push_back(std::move(path));
    if (parent) children_[parent->index].push_back(v);

    const auto& where = label_.back();
    if (node.children.size() == 1)
        throw std::invalid_argument("vertex " + where + " has a single child; every ball must split into at least two");
    if (node.children.empty()) {
        if (!node.measure) throw std::invalid_argument("leaf " + where + " has no measure");
        if (!(*node.measure > 0.0) || !std::isfinite(*node.measure))
            throw std::invalid_argument("leaf " + where + " has a non-positive measure");
        measure_[v.index] = *node.measure;
    } else if (node.measure) {
        throw std::invalid_argument("internal vertex " + where + " carries a measure; internal measures are derived");
    }
    if (!(diameter_[v.index] > 0.0) || !std::isfinite(diameter_[v.index]))
        throw std::invalid_argument("vertex " + where + " has a non-positive diameter");

    for (const auto& child : node.children) add_subtree(child, v, q);
}

void BallTree::finalize() {
    const std::size_t n = parent_.size();
    // Preorder numbering: every descendant has a larger index, so a reverse
    // sweep sees children before parents.
    for (std::size_t i = n; i-- > 0;) {
        if (children_[i].empty()) continue;
        double total = 0.0;
        for (Vertex c : children_[i]) {
            total += measure_[c.index];
            if (!(diameter_[c.index] < diameter_[i]))
                throw std::invalid_argument("diameter of " + label_[c.index] + " is not smaller than that of its parent " +
                                            label_[i]);
        }
        measure_[i] = total;
    }

    leaf_position_.assign(n, n);
    leaf_range_.assign(n, {0, 0});
    for (std::size_t i = 0; i < n; ++i) {
        if (children_[i].empty()) {
            leaf_position_[i] = leaves_.size();
            leaves_.push_back(Vertex{i});
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        if (children_[i].empty()) {
            leaf_range_[i] = {leaf_position_[i], leaf_position_[i] + 1};
        } else {
            leaf_range_[i] = {leaf_range_[children_[i].front().index].first,
                              leaf_range_[children_[i].back().index].second};
        }
        height_ = std::max(height_, depth_[i]);
    }

    for (std::size_t i = 0; i < n; ++i)
        if (!children_[i].empty()) internal_.push_back(Vertex{i});
    std::stable_sort(internal_.begin(), internal_.end(),
                     [&](Vertex a, Vertex b) { return depth_[a.index] < depth_[b.index]; });
}

ExplicitTreeSpec BallTree::to_spec() const {
    auto emit = [&](auto&& self, Vertex v) -> NestedBall {
        NestedBall ball;
        ball.diameter = diameter(v);
        if (is_leaf(v)) ball.measure = measure(v);
        for (Vertex c : children(v)) ball.children.push_back(self(self, c));
        return ball;
    };
    return ExplicitTreeSpec{emit(emit, root()), 2.0};
}

std::optional<Vertex> BallTree::parent(Vertex v) const { return parent_.at(v.index); }

std::optional<Vertex> BallTree::find(std::string_view label) const {
    if (label.empty() || label == "root") return root();
    Vertex v = root();
    std::size_t pos = 0;
    while (pos <= label.size()) {
        const std::size_t dot = std::min(label.find('.', pos), label.size());
        std::size_t index = 0;
        const auto* first = label.data() + pos;
        const auto* last = label.data() + dot;
        auto [ptr, ec] = std::from_chars(first, last, index);
        if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
        if (index >= children_[v.index].size()) return std::nullopt;
        v = children_[v.index][index];
        pos = dot + 1;
    }
    return v;
}

std::size_t BallTree::leaf_position(Vertex leaf) const {
    if (!is_leaf(leaf)) throw std::invalid_argument("vertex " + label(leaf) + " is not a leaf");
    return leaf_position_[leaf.index];
}

Vertex BallTree::sup(Vertex a, Vertex b) const {
    while (depth_[a.index] > depth_[b.index]) a = *parent_[a.index];
    while (depth_[b.index] > depth_[a.index]) b = *parent_[b.index];
    while (a != b) {
        a = *parent_[a.index];
        b = *parent_[b.index];
    }
    return a;
}

bool BallTree::strictly_below(Vertex inner, Vertex outer) const {
    // Leaf ranges of incomparable balls are disjoint.
    if (depth_[inner.index] <= depth_[outer.index]) return false;
    const auto [lo, hi] = leaf_range_[outer.index];
    const auto [ilo, ihi] = leaf_range_[inner.index];
    return lo <= ilo && ihi <= hi;
}

Vertex BallTree::child_toward(Vertex outer, Vertex inner) const {
    if (!strictly_below(inner, outer))
        throw std::invalid_argument("ball " + label(inner) + " is not strictly inside " + label(outer));
    return children_[outer.index][path_[inner.index][static_cast<std::size_t>(depth_[outer.index])]];
}

double BallTree::measure_toward(Vertex outer, Vertex inner) const {
    return measure(child_toward(outer, inner));
}

}  // namespace ucascade
