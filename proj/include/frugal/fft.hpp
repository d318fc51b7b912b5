#pragma once

#include <span>
#include <string>
#include <vector>

#include "frugal/features.hpp"
#include "frugal/metrics.hpp"

namespace frugal {

enum class CueDirection { greater, less_equal };

struct Cue {
    int feature = 0;
    CueDirection direction = CueDirection::greater;
    double threshold = 0.0;

    bool satisfied(std::span<const double> row) const {
        double v = row[static_cast<std::size_t>(feature)];
        return direction == CueDirection::greater ? v > threshold : v <= threshold;
    }
};

// One boolean per level: true exits positive ("severe"), false exits negative.
// The final leaf takes the complement of the last bit.
struct ExitPolicy {
    std::vector<bool> bits;
    std::string to_string() const;
};

struct FrugalTree {
    ExitPolicy policy;
    std::vector<Cue> cues;  // one per level
    Goal goal = Goal::recall;
    double training_score = 0.0;

    int depth() const { return static_cast<int>(cues.size()); }
};

// All 2^d exit policies in lexicographic order of their bit strings.
// Depths above 10 are rejected as a guardrail.
std::vector<ExitPolicy> enumerate_policies(int depth);

// Picks the (feature, direction, threshold) whose one-level classifier
// "exit side := exit_label, rest := !exit_label" maximizes the goal metric on
// the remaining rows. Thresholds come from the 10..90 percentile grid of each
// feature over those rows. Ties break to the lower feature index, then the
// smaller threshold, then '>' before '<='.
Cue learn_level_cue(const FeatureMatrix& rows, const std::vector<bool>& labels,
                    std::span<const int> remaining, bool exit_label, Goal goal);

FrugalTree grow_tree(const FeatureMatrix& rows, const std::vector<bool>& labels,
                     const ExitPolicy& policy, Goal goal);

// Grows all 2^d trees and keeps the best training score; ties break to the
// lexicographically smallest policy string.
FrugalTree train_best(const FeatureMatrix& rows, const std::vector<bool>& labels, int depth,
                      Goal goal, unsigned threads = 1);

bool predict(const FrugalTree& tree, std::span<const double> row);

// Figure-style rule text: d if/else-if lines plus the final else, thresholds
// with two decimals. When per-feature top words are supplied, one
// "Topic n: w1 .. w8" line is appended per referenced feature, in order of
// first appearance.
std::string render_rules(const FrugalTree& tree, std::span<const std::string> feature_names,
                         const std::vector<std::vector<std::string>>* topic_top_words = nullptr);

std::string tree_to_json(const FrugalTree& tree);
FrugalTree tree_from_json(std::string_view text);

}  // namespace frugal
