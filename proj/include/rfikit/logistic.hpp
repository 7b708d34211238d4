#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "rfikit/features.hpp"

namespace rfikit {

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LogisticHyper {
    double l2 = 1e-3;         // ridge on weights, not bias
    std::size_t max_iters = 1000;
    double tol = 1e-6;        // stop when grad infinity-norm <= tol
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    double threshold = 0.5;
    // training metadata
    std::size_t iterations = 0;
    double final_grad_norm = 0.0;
    bool degenerate = false;  // single-class training set

    double raw_score(std::span<const double> x) const;
};

struct Prediction {
    double probability = 0.0;
    int label = 0;
};

/// Numerically stable sigmoid.
double sigmoid(double z);

/// L2-regularized mean cross-entropy loss and its gradient at (w, b).
/// Exposed for the finite-difference check.
double logistic_loss(std::span<const std::vector<double>> rows, std::span<const int> labels,
                     std::span<const double> weights, double bias, double l2,
                     std::vector<double>* grad_w = nullptr, double* grad_b = nullptr);

/// Deterministic full-batch gradient descent with backtracking line search,
/// weights initialized to zero. A single-class set yields a degenerate model:
/// zero weights, bias = clipped log-odds of prevalence.
LinearModel train_logistic(std::span<const std::vector<double>> rows, std::span<const int> labels,
                           const LogisticHyper& hyper = {});

LinearModel train_logistic(const FeatureMatrix& features, const LogisticHyper& hyper = {});

/// p = sigmoid(w.x + b); label 1 iff p >= threshold.
Prediction predict_logistic(const LinearModel& model, std::span<const double> features);

}  // namespace rfikit
