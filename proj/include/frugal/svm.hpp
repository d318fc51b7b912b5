#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frugal/features.hpp"

namespace frugal {

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    double lambda = 1e-4;
    int epochs = 100;
    std::uint64_t seed = 1;
};

// Stochastic subgradient descent on the L2-regularized hinge loss with step
// size 1/(lambda*t) and a deterministic per-epoch shuffle. The bias term is
// left unregularized.
LinearModel svm_fit(const FeatureMatrix& rows, const std::vector<bool>& labels, double lambda,
                    int epochs, std::uint64_t seed);

// sign(w.x + b) > 0; non-positive margins predict the negative class
bool svm_predict(const LinearModel& model, std::span<const double> row);

// mean hinge loss plus (lambda/2)*|w|^2, for convergence checks
double hinge_objective(const LinearModel& model, const FeatureMatrix& rows,
                       const std::vector<bool>& labels);

std::string linear_model_to_json(const LinearModel& model);
LinearModel linear_model_from_json(std::string_view text);

}  // namespace frugal
