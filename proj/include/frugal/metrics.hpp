#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace frugal {

// Thrown when a training fold carries a single class; the rig skips the cell.
struct DegenerateFoldError : std::invalid_argument {
    DegenerateFoldError() : std::invalid_argument("degenerate training fold") {}
};

enum class Goal { precision, recall };

inline std::string goal_name(Goal g) { return g == Goal::precision ? "precision" : "recall"; }

inline std::optional<Goal> parse_goal(std::string_view name) {
    if (name == "precision") return Goal::precision;
    if (name == "recall") return Goal::recall;
    return std::nullopt;
}

struct ConfusionMatrix {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    long long total() const { return tp + fp + tn + fn; }
    void add(bool predicted, bool actual) {
        if (predicted && actual) ++tp;
        else if (predicted && !actual) ++fp;
        else if (!predicted && actual) ++fn;
        else ++tn;
    }
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;

    double get(Goal g) const { return g == Goal::precision ? precision : recall; }
};

// precision = TP/(TP+FP), recall = TP/(TP+FN); zero denominators score 0
inline Metrics metrics(const ConfusionMatrix& cm) {
    Metrics m;
    m.precision = (cm.tp + cm.fp) > 0
                      ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp)
                      : 0.0;
    m.recall = (cm.tp + cm.fn) > 0
                   ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn)
                   : 0.0;
    return m;
}

}  // namespace frugal
