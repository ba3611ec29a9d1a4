#include "stackcast/models/forest.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "stackcast/common/stats.hpp"

namespace stackcast::models {

namespace {

// Mean as an offset from the first tree, so identical trees give their value
// exactly, clamped to the range of the tree outputs.
struct TreeAverage {
    double first = 0.0, lo = 0.0, hi = 0.0, sum = 0.0;
    bool any = false;
    void add(double v) {
        if (!any) {
            first = lo = hi = v;
            any = true;
        }
        sum += v - first;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double value(std::size_t n) const { return std::clamp(first + sum / double(n), lo, hi); }
};

}  // namespace

double RegressionTree::predict(const double* x, std::size_t stride) const {
    std::int32_t k = 0;
    while (nodes[k].feature >= 0) {
        const auto& n = nodes[k];
        k = x[std::size_t(n.feature) * stride] <= n.threshold ? n.left : n.right;
    }
    return nodes[k].value;
}

std::size_t RegressionTree::depth() const {
    std::vector<std::size_t> d(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        best = std::max(best, d[k]);
        if (nodes[k].feature >= 0) {
            d[nodes[k].left] = d[k] + 1;
            d[nodes[k].right] = d[k] + 1;
        }
    }
    return best;
}

double Forest::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    if (std::size_t(x.size()) != n_features) throw std::invalid_argument("forest: wrong feature count");
    TreeAverage avg;
    for (const auto& t : trees) avg.add(t.predict(x.data(), std::size_t(x.innerStride())));
    return avg.value(trees.size());
}

Eigen::VectorXd Forest::predict(const Eigen::MatrixXd& X) const {
    if (std::size_t(X.cols()) != n_features) throw std::invalid_argument("forest: wrong feature count");
    Eigen::VectorXd out(X.rows());
    const std::size_t stride = std::size_t(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        TreeAverage avg;
        for (const auto& t : trees) avg.add(t.predict(X.data() + i, stride));
        out(i) = avg.value(trees.size());
    }
    return out;
}

std::size_t Forest::max_depth() const {
    std::size_t d = 0;
    for (const auto& t : trees) d = std::max(d, t.depth());
    return d;
}

namespace {

struct NodeStats {
    double w = 0.0, s = 0.0;
    double ymin = 0.0, ymax = 0.0;
    // sweep state
    double wl = 0.0, sl = 0.0, last_x = 0.0;
    bool seen = false;
    // best split
    double gain = 0.0, threshold = 0.0;
    std::int32_t feature = -1;
};

RegressionTree grow_tree(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const std::vector<std::vector<std::uint32_t>>& order, const std::vector<double>& w,
                         std::size_t max_depth) {
    const std::size_t n = std::size_t(X.rows()), d = std::size_t(X.cols());
    RegressionTree tree;
    // node of each row; -1 once the row sits in a closed leaf or is out of bag
    std::vector<std::int32_t> node_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] > 0.0) node_of[i] = 0;
    }
    tree.nodes.emplace_back();
    std::vector<std::int32_t> open = {0};

    for (std::size_t depth = 0; !open.empty(); ++depth) {
        std::vector<NodeStats> st(open.size());
        std::vector<std::int32_t> slot(tree.nodes.size(), -1);
        for (std::size_t k = 0; k < open.size(); ++k) slot[open[k]] = std::int32_t(k);

        for (std::size_t i = 0; i < n; ++i) {
            if (node_of[i] < 0) continue;
            auto& s = st[slot[node_of[i]]];
            if (s.w == 0.0) s.ymin = s.ymax = y(i);
            s.w += w[i];
            s.s += w[i] * y(i);
            s.ymin = std::min(s.ymin, y(i));
            s.ymax = std::max(s.ymax, y(i));
        }
        for (std::size_t k = 0; k < open.size(); ++k) {
            // pure nodes keep the value exactly; rounding must not leave [ymin, ymax]
            const auto& s = st[k];
            tree.nodes[open[k]].value = s.ymin == s.ymax ? s.ymin : std::clamp(s.s / s.w, s.ymin, s.ymax);
        }

        const bool can_split = depth < max_depth;
        if (can_split) {
            for (std::size_t f = 0; f < d; ++f) {
                for (auto& s : st) {
                    s.wl = s.sl = 0.0;
                    s.seen = false;
                }
                const double* col = X.col(Eigen::Index(f)).data();
                for (std::uint32_t i : order[f]) {
                    if (node_of[i] < 0) continue;
                    auto& s = st[slot[node_of[i]]];
                    if (s.ymin == s.ymax) continue;
                    const double x = col[i];
                    if (s.seen && x > s.last_x) {
                        const double wr = s.w - s.wl, sr = s.s - s.sl;
                        const double gain = s.sl * s.sl / s.wl + sr * sr / wr - s.s * s.s / s.w;
                        if (gain > s.gain) {
                            s.gain = gain;
                            s.feature = std::int32_t(f);
                            s.threshold = s.last_x + 0.5 * (x - s.last_x);
                            // midpoint can round up to x for adjacent doubles
                            if (s.threshold >= x) s.threshold = s.last_x;
                        }
                    }
                    s.wl += w[i];
                    s.sl += w[i] * y(i);
                    s.last_x = x;
                    s.seen = true;
                }
            }
        }

        std::vector<std::int32_t> next;
        std::vector<std::int32_t> left_of(open.size(), -1);
        for (std::size_t k = 0; k < open.size(); ++k) {
            auto& s = st[k];
            if (s.feature < 0) continue;
            const auto l = std::int32_t(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            auto& node = tree.nodes[open[k]];
            node.feature = s.feature;
            node.threshold = s.threshold;
            node.left = l;
            node.right = l + 1;
            left_of[k] = l;
            next.push_back(l);
            next.push_back(l + 1);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (node_of[i] < 0) continue;
            const auto k = slot[node_of[i]];
            if (left_of[k] < 0) {
                node_of[i] = -1;
                continue;
            }
            const auto& s = st[k];
            node_of[i] = X(Eigen::Index(i), s.feature) <= s.threshold ? left_of[k] : left_of[k] + 1;
        }
        open = std::move(next);
    }
    return tree;
}

}  // namespace

Forest fit_random_forest(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ForestParams& params,
                         std::uint64_t seed) {
    const std::size_t n = std::size_t(X.rows()), d = std::size_t(X.cols());
    if (n == 0 || std::size_t(y.size()) != n) throw std::invalid_argument("fit_random_forest: bad input shape");
    if (params.n_trees == 0) throw std::invalid_argument("fit_random_forest: n_trees must be positive");

    std::vector<std::vector<std::uint32_t>> order(d, std::vector<std::uint32_t>(n));
    for (std::size_t f = 0; f < d; ++f) {
        std::iota(order[f].begin(), order[f].end(), 0u);
        const double* col = X.col(Eigen::Index(f)).data();
        std::stable_sort(order[f].begin(), order[f].end(), [&](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }

    Forest forest;
    forest.n_features = d;
    forest.trees.reserve(params.n_trees);
    std::vector<double> w(n);
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        std::mt19937_64 rng(mix_seed(seed, t));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) w[pick(rng)] += 1.0;
        forest.trees.push_back(grow_tree(X, y, order, w, params.max_depth));
    }
    return forest;
}

}  // namespace stackcast::models
