#include "frugal/svm.hpp"

#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "frugal/metrics.hpp"
#include "frugal/rng.hpp"

namespace frugal {

namespace {

double dot(std::span<const double> w, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

}  // namespace

LinearModel svm_fit(const FeatureMatrix& rows, const std::vector<bool>& labels, double lambda,
                    int epochs, std::uint64_t seed) {
    if (rows.n_features < 1) throw std::invalid_argument("svm: no features");
    if (lambda <= 0.0) throw std::invalid_argument("svm: lambda must be > 0");
    bool any_true = false, any_false = false;
    for (bool l : labels) (l ? any_true : any_false) = true;
    if (!any_true || !any_false) throw DegenerateFoldError{};

    LinearModel model;
    model.weights.assign(rows.n_features, 0.0);
    model.lambda = lambda;
    model.epochs = epochs;
    model.seed = seed;

    std::vector<int> order(rows.n_docs);
    std::iota(order.begin(), order.end(), 0);

    Rng rng(seed);
    long long t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        shuffle(order, rng);
        for (int i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            auto x = rows.row(static_cast<std::size_t>(i));
            const double y = labels[static_cast<std::size_t>(i)] ? 1.0 : -1.0;
            const double margin = y * (dot(model.weights, x) + model.bias);
            const double scale = 1.0 - eta * lambda;  // = 1 - 1/t
            if (margin < 1.0) {
                for (std::size_t f = 0; f < model.weights.size(); ++f) {
                    model.weights[f] = scale * model.weights[f] + eta * y * x[f];
                }
                model.bias += eta * y;
            } else {
                for (double& w : model.weights) w *= scale;
            }
        }
    }
    return model;
}

bool svm_predict(const LinearModel& model, std::span<const double> row) {
    if (row.size() != model.weights.size())
        throw std::invalid_argument("svm: row length does not match model");
    return dot(model.weights, row) + model.bias > 0.0;
}

double hinge_objective(const LinearModel& model, const FeatureMatrix& rows,
                       const std::vector<bool>& labels) {
    double loss = 0.0;
    for (std::size_t i = 0; i < rows.n_docs; ++i) {
        const double y = labels[i] ? 1.0 : -1.0;
        const double margin = y * (dot(model.weights, rows.row(i)) + model.bias);
        if (margin < 1.0) loss += 1.0 - margin;
    }
    loss /= static_cast<double>(rows.n_docs);
    double norm_sq = dot(model.weights, model.weights);
    return loss + 0.5 * model.lambda * norm_sq;
}

std::string linear_model_to_json(const LinearModel& model) {
    nlohmann::json j;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["lambda"] = model.lambda;
    j["epochs"] = model.epochs;
    j["seed"] = model.seed;
    return j.dump();
}

LinearModel linear_model_from_json(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LinearModel model;
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.lambda = j.at("lambda").get<double>();
    model.epochs = j.at("epochs").get<int>();
    model.seed = j.at("seed").get<std::uint64_t>();
    return model;
}

}  // namespace frugal
