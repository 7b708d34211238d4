#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rfikit/features.hpp"
#include "rfikit/logistic.hpp"  // TrainingError, sigmoid, Prediction

namespace rfikit {

struct GbdtHyper {
    std::size_t n_trees = 100;
    double learning_rate = 0.1;
    std::size_t max_leaves = 31;
    std::size_t min_samples_leaf = 20;
    double l2_leaf = 1.0;
    std::size_t max_bins = 255;
};

// Per-feature quantile bin upper-edges fitted on the training set.
struct BinningTable {
    std::vector<std::vector<double>> edges;

    std::size_t n_features() const { return edges.size(); }
    std::size_t n_bins(std::size_t feature) const { return edges[feature].size(); }
    /// Index of the first edge >= value; values above the last edge map to the
    /// last bin.
    std::size_t bin_index(std::size_t feature, double value) const;
};

struct TreeNode {
    bool is_leaf = true;
    double leaf_value = 0.0;  // log-odds increment, shrinkage applied
    std::size_t feature = 0;
    double threshold = 0.0;   // bin upper-edge; x <= threshold goes left
    bool default_left = true; // route for non-finite values
    std::int32_t left = -1;
    std::int32_t right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double score(std::span<const double> x) const;
};

struct BoostedModel {
    double base_score = 0.0;  // log-odds of training prevalence
    std::vector<Tree> trees;
    GbdtHyper hyper;
    BinningTable bins;

    double raw_score(std::span<const double> x) const;
};

/// Quantile edges per feature; features with <= max_bins distinct values get
/// one bin per distinct value. Requires >= 2 rows.
BinningTable fit_bins(std::span<const std::vector<double>> rows, std::size_t max_bins);

BinningTable fit_bins(const FeatureMatrix& features, std::size_t max_bins = 255);

/// Second-order boosting on logistic loss with leaf-wise, histogram-based tree
/// growth. Deterministic; split ties break toward (lower feature, lower bin).
/// A single-class set yields a zero-tree model carrying only base_score.
BoostedModel train_gbdt(std::span<const std::vector<double>> rows, std::span<const int> labels,
                        const GbdtHyper& hyper = {});

BoostedModel train_gbdt(const FeatureMatrix& features, const GbdtHyper& hyper = {});

/// p = sigmoid(base_score + sum of routed leaf values); label 1 iff p >= 0.5.
Prediction predict_gbdt(const BoostedModel& model, std::span<const double> features);

/// Split gain for the stated left/right gradient statistics.
double split_gain(double g_left, double h_left, double g_right, double h_right, double l2_leaf);

}  // namespace rfikit
