#include "rfikit/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfikit {

std::size_t BinningTable::bin_index(std::size_t feature, double value) const {
    const auto& e = edges[feature];
    const auto it = std::lower_bound(e.begin(), e.end(), value);
    if (it == e.end()) {
        return e.size() - 1;
    }
    return static_cast<std::size_t>(it - e.begin());
}

double Tree::score(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf) {
        const TreeNode& n = nodes[i];
        const double v = x[n.feature];
        bool go_left;
        if (std::isfinite(v)) {
            go_left = v <= n.threshold;
        } else {
            go_left = n.default_left;
        }
        i = static_cast<std::size_t>(go_left ? n.left : n.right);
    }
    return nodes[i].leaf_value;
}

double BoostedModel::raw_score(std::span<const double> x) const {
    double z = base_score;
    for (const auto& tree : trees) {
        z += tree.score(x);
    }
    return z;
}

BinningTable fit_bins(std::span<const std::vector<double>> rows, std::size_t max_bins) {
    if (rows.size() < 2) {
        throw TrainingError("fit_bins: need >= 2 rows");
    }
    if (max_bins < 2) {
        throw TrainingError("fit_bins: max_bins must be >= 2");
    }
    const std::size_t n = rows.size();
    const std::size_t f = rows[0].size();
    BinningTable table;
    table.edges.resize(f);
    std::vector<double> column(n);
    for (std::size_t j = 0; j < f; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = rows[i][j];
        }
        std::sort(column.begin(), column.end());
        auto& edges = table.edges[j];
        std::vector<double> distinct;
        distinct.reserve(std::min(n, max_bins + 1));
        for (double v : column) {
            if (distinct.empty() || v != distinct.back()) {
                distinct.push_back(v);
                if (distinct.size() > max_bins) {
                    break;
                }
            }
        }
        if (distinct.size() <= max_bins) {
            edges = std::move(distinct);
            continue;
        }
        // quantile cut: edge k closes the bin holding ranks up to ceil((k+1)n/B)
        edges.reserve(max_bins);
        for (std::size_t k = 0; k < max_bins; ++k) {
            const std::size_t rank = (k + 1) * n / max_bins;  // 1-based count
            const double edge = column[rank - 1];
            if (edges.empty() || edge != edges.back()) {
                edges.push_back(edge);
            }
        }
    }
    return table;
}

BinningTable fit_bins(const FeatureMatrix& features, std::size_t max_bins) {
    std::vector<std::vector<double>> rows;
    rows.reserve(features.size());
    for (const auto& row : features.rows) {
        rows.emplace_back(row.values.begin(), row.values.end());
    }
    return fit_bins(rows, max_bins);
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double l2_leaf) {
    const double g = g_left + g_right;
    const double h = h_left + h_right;
    return 0.5 * (g_left * g_left / (h_left + l2_leaf) + g_right * g_right / (h_right + l2_leaf) -
                  g * g / (h + l2_leaf));
}

namespace {

struct LeafCandidate {
    std::vector<std::uint32_t> rows;
    double g_sum = 0.0;
    double h_sum = 0.0;
    std::int32_t node = 0;  // index in the tree's node array
    // best split, valid when has_split
    bool has_split = false;
    double gain = 0.0;
    std::size_t feature = 0;
    std::size_t bin = 0;
};

struct HistogramCell {
    double g = 0.0;
    double h = 0.0;
    std::uint32_t count = 0;
};

// Find the gain-maximizing (feature, bin) for one leaf. Features and bins are
// scanned in ascending order and only strictly larger gains replace the
// incumbent, which pins the tie-break.
void search_split(LeafCandidate& leaf, const std::vector<std::vector<std::uint16_t>>& binned,
                  std::span<const double> grad, std::span<const double> hess,
                  const BinningTable& bins, const GbdtHyper& hyper) {
    leaf.has_split = false;
    leaf.gain = 0.0;
    if (leaf.rows.size() < 2 * hyper.min_samples_leaf) {
        return;
    }
    const std::size_t f = bins.n_features();
    std::vector<HistogramCell> hist;
    for (std::size_t j = 0; j < f; ++j) {
        const std::size_t nb = bins.n_bins(j);
        if (nb < 2) {
            continue;
        }
        hist.assign(nb, HistogramCell{});
        for (std::uint32_t r : leaf.rows) {
            HistogramCell& cell = hist[binned[r][j]];
            cell.g += grad[r];
            cell.h += hess[r];
            cell.count += 1;
        }
        double g_left = 0.0;
        double h_left = 0.0;
        std::uint32_t count_left = 0;
        for (std::size_t b = 0; b + 1 < nb; ++b) {
            g_left += hist[b].g;
            h_left += hist[b].h;
            count_left += hist[b].count;
            const std::uint32_t count_right = static_cast<std::uint32_t>(leaf.rows.size()) - count_left;
            if (count_left < hyper.min_samples_leaf || count_right < hyper.min_samples_leaf) {
                continue;
            }
            const double gain =
                split_gain(g_left, h_left, leaf.g_sum - g_left, leaf.h_sum - h_left, hyper.l2_leaf);
            if (gain > leaf.gain) {
                leaf.gain = gain;
                leaf.feature = j;
                leaf.bin = b;
                leaf.has_split = true;
            }
        }
    }
}

}  // namespace

BoostedModel train_gbdt(std::span<const std::vector<double>> rows, std::span<const int> labels,
                        const GbdtHyper& hyper) {
    const std::size_t n = rows.size();
    if (n < 2 || labels.size() != n) {
        throw TrainingError("train_gbdt: need >= 2 rows with matching labels");
    }
    std::size_t positives = 0;
    for (int y : labels) {
        positives += static_cast<std::size_t>(y);
    }

    BoostedModel model;
    model.hyper = hyper;
    const double prevalence = static_cast<double>(positives) / static_cast<double>(n);
    if (positives == 0 || positives == n) {
        const double p = std::clamp(prevalence, 1e-12, 1.0 - 1e-12);
        model.base_score = std::clamp(std::log(p / (1.0 - p)), -10.0, 10.0);
        return model;  // zero trees
    }
    model.base_score = std::log(prevalence / (1.0 - prevalence));
    model.bins = fit_bins(rows, hyper.max_bins);

    const std::size_t f = model.bins.n_features();
    std::vector<std::vector<std::uint16_t>> binned(n, std::vector<std::uint16_t>(f));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            binned[i][j] = static_cast<std::uint16_t>(model.bins.bin_index(j, rows[i][j]));
        }
    }

    std::vector<double> score(n, model.base_score);
    std::vector<double> grad(n);
    std::vector<double> hess(n);

    for (std::size_t round = 0; round < hyper.n_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(score[i]);
            grad[i] = p - static_cast<double>(labels[i]);
            hess[i] = p * (1.0 - p);
        }

        Tree tree;
        tree.nodes.push_back(TreeNode{});
        std::vector<LeafCandidate> leaves(1);
        leaves[0].node = 0;
        leaves[0].rows.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            leaves[0].rows[i] = static_cast<std::uint32_t>(i);
            leaves[0].g_sum += grad[i];
            leaves[0].h_sum += hess[i];
        }
        search_split(leaves[0], binned, grad, hess, model.bins, hyper);

        while (leaves.size() < hyper.max_leaves) {
            // leaf-wise growth: expand the highest-gain leaf; earlier-created
            // leaves win ties
            std::size_t best = leaves.size();
            for (std::size_t l = 0; l < leaves.size(); ++l) {
                if (leaves[l].has_split &&
                    (best == leaves.size() || leaves[l].gain > leaves[best].gain)) {
                    best = l;
                }
            }
            if (best == leaves.size()) {
                break;  // no splittable leaf with positive gain
            }

            LeafCandidate parent = std::move(leaves[best]);
            const std::size_t j = parent.feature;
            const std::size_t b = parent.bin;
            const double threshold = model.bins.edges[j][b];

            LeafCandidate left;
            LeafCandidate right;
            for (std::uint32_t r : parent.rows) {
                LeafCandidate& side = binned[r][j] <= b ? left : right;
                side.rows.push_back(r);
                side.g_sum += grad[r];
                side.h_sum += hess[r];
            }

            TreeNode& node = tree.nodes[static_cast<std::size_t>(parent.node)];
            node.is_leaf = false;
            node.feature = j;
            node.threshold = threshold;
            node.default_left = left.rows.size() >= right.rows.size();
            node.left = static_cast<std::int32_t>(tree.nodes.size());
            node.right = static_cast<std::int32_t>(tree.nodes.size() + 1);
            left.node = node.left;
            right.node = node.right;
            tree.nodes.push_back(TreeNode{});
            tree.nodes.push_back(TreeNode{});

            search_split(left, binned, grad, hess, model.bins, hyper);
            search_split(right, binned, grad, hess, model.bins, hyper);
            leaves[best] = std::move(left);
            leaves.push_back(std::move(right));
        }

        for (const auto& leaf : leaves) {
            const double value =
                -leaf.g_sum / (leaf.h_sum + hyper.l2_leaf) * hyper.learning_rate;
            tree.nodes[static_cast<std::size_t>(leaf.node)].leaf_value = value;
            for (std::uint32_t r : leaf.rows) {
                score[r] += value;
            }
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

BoostedModel train_gbdt(const FeatureMatrix& features, const GbdtHyper& hyper) {
    std::vector<std::vector<double>> rows;
    rows.reserve(features.size());
    for (const auto& row : features.rows) {
        rows.emplace_back(row.values.begin(), row.values.end());
    }
    return train_gbdt(rows, features.labels, hyper);
}

Prediction predict_gbdt(const BoostedModel& model, std::span<const double> features) {
    if (!model.trees.empty() && features.size() != model.bins.n_features()) {
        throw TrainingError("feature dimension mismatch: got " + std::to_string(features.size()) +
                            ", model expects " + std::to_string(model.bins.n_features()));
    }
    Prediction out;
    out.probability = sigmoid(model.raw_score(features));
    out.label = out.probability >= 0.5 ? 1 : 0;
    return out;
}

}  // namespace rfikit
