#include "rfikit/logistic.hpp"

#include <algorithm>
#include <cmath>

namespace rfikit {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow
double softplus(double z) {
    if (z > 0.0) {
        return z + std::log1p(std::exp(-z));
    }
    return std::log1p(std::exp(z));
}

}  // namespace

double LinearModel::raw_score(std::span<const double> x) const {
    if (x.size() != weights.size()) {
        throw TrainingError("feature dimension mismatch: got " + std::to_string(x.size()) +
                            ", model has " + std::to_string(weights.size()));
    }
    double z = bias;
    for (std::size_t j = 0; j < x.size(); ++j) {
        z += weights[j] * x[j];
    }
    return z;
}

double logistic_loss(std::span<const std::vector<double>> rows, std::span<const int> labels,
                     std::span<const double> weights, double bias, double l2,
                     std::vector<double>* grad_w, double* grad_b) {
    const std::size_t n = rows.size();
    const std::size_t f = weights.size();
    if (grad_w) {
        grad_w->assign(f, 0.0);
    }
    if (grad_b) {
        *grad_b = 0.0;
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& x = rows[i];
        double z = bias;
        for (std::size_t j = 0; j < f; ++j) {
            z += weights[j] * x[j];
        }
        const double y = static_cast<double>(labels[i]);
        // cross-entropy: softplus(z) - y*z
        loss += softplus(z) - y * z;
        if (grad_w || grad_b) {
            const double residual = sigmoid(z) - y;
            if (grad_w) {
                for (std::size_t j = 0; j < f; ++j) {
                    (*grad_w)[j] += residual * x[j];
                }
            }
            if (grad_b) {
                *grad_b += residual;
            }
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    double reg = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
        reg += weights[j] * weights[j];
    }
    loss += 0.5 * l2 * reg;
    if (grad_w) {
        for (std::size_t j = 0; j < f; ++j) {
            (*grad_w)[j] = (*grad_w)[j] * inv_n + l2 * weights[j];
        }
    }
    if (grad_b) {
        *grad_b *= inv_n;
    }
    return loss;
}

LinearModel train_logistic(std::span<const std::vector<double>> rows, std::span<const int> labels,
                           const LogisticHyper& hyper) {
    const std::size_t n = rows.size();
    if (n < 2 || labels.size() != n) {
        throw TrainingError("train_logistic: need >= 2 rows with matching labels");
    }
    const std::size_t f = rows[0].size();
    for (const auto& r : rows) {
        if (r.size() != f) {
            throw TrainingError("train_logistic: ragged feature rows");
        }
    }

    std::size_t positives = 0;
    for (int y : labels) {
        positives += static_cast<std::size_t>(y);
    }

    LinearModel model;
    model.weights.assign(f, 0.0);
    if (positives == 0 || positives == n) {
        // single-class set: constant predictor at the clipped prevalence log-odds
        const double p = std::clamp(static_cast<double>(positives) / static_cast<double>(n),
                                    1e-12, 1.0 - 1e-12);
        model.bias = std::clamp(std::log(p / (1.0 - p)), -10.0, 10.0);
        model.degenerate = true;
        return model;
    }

    std::vector<double> grad_w;
    double grad_b = 0.0;
    double loss = logistic_loss(rows, labels, model.weights, model.bias, hyper.l2, &grad_w, &grad_b);

    std::vector<double> trial_w(f);
    double step = 1.0;
    std::size_t iter = 0;
    for (; iter < hyper.max_iters; ++iter) {
        double grad_inf = std::fabs(grad_b);
        double grad_sq = grad_b * grad_b;
        for (double g : grad_w) {
            grad_inf = std::max(grad_inf, std::fabs(g));
            grad_sq += g * g;
        }
        model.final_grad_norm = grad_inf;
        if (grad_inf <= hyper.tol) {
            break;
        }

        // Armijo backtracking on the negative-gradient direction.
        double trial_loss = 0.0;
        double trial_b = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t j = 0; j < f; ++j) {
                trial_w[j] = model.weights[j] - step * grad_w[j];
            }
            trial_b = model.bias - step * grad_b;
            trial_loss = logistic_loss(rows, labels, trial_w, trial_b, hyper.l2, nullptr, nullptr);
            if (trial_loss <= loss - 1e-4 * step * grad_sq) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;  // no descent step representable
        }
        model.weights.swap(trial_w);
        model.bias = trial_b;
        loss = logistic_loss(rows, labels, model.weights, model.bias, hyper.l2, &grad_w, &grad_b);
        step = std::min(step * 2.0, 1e6);
    }
    model.iterations = iter;
    return model;
}

LinearModel train_logistic(const FeatureMatrix& features, const LogisticHyper& hyper) {
    std::vector<std::vector<double>> rows;
    rows.reserve(features.size());
    for (const auto& row : features.rows) {
        rows.emplace_back(row.values.begin(), row.values.end());
    }
    return train_logistic(rows, features.labels, hyper);
}

Prediction predict_logistic(const LinearModel& model, std::span<const double> features) {
    Prediction out;
    out.probability = sigmoid(model.raw_score(features));
    out.label = out.probability >= model.threshold ? 1 : 0;
    return out;
}

}  // namespace rfikit
