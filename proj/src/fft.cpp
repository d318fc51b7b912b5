#include "frugal/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "frugal/parallel.hpp"
#include "frugal/textio.hpp"

namespace frugal {

std::string ExitPolicy::to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (bool b : bits) s += b ? '1' : '0';
    return s;
}

std::vector<ExitPolicy> enumerate_policies(int depth) {
    if (depth < 1) throw std::invalid_argument("fft: depth must be >= 1");
    if (depth > 10) throw std::invalid_argument("fft: depth above 10 not supported");
    std::vector<ExitPolicy> policies;
    policies.reserve(1u << depth);
    for (unsigned code = 0; code < (1u << depth); ++code) {
        ExitPolicy p;
        p.bits.resize(static_cast<std::size_t>(depth));
        for (int level = 0; level < depth; ++level) {
            p.bits[static_cast<std::size_t>(level)] = (code >> (depth - 1 - level)) & 1u;
        }
        policies.push_back(std::move(p));
    }
    return policies;
}

namespace {

double score_split(const FeatureMatrix& rows, const std::vector<bool>& labels,
                   std::span<const int> remaining, const Cue& cue, bool exit_label, Goal goal) {
    ConfusionMatrix cm;
    for (int r : remaining) {
        bool predicted = cue.satisfied(rows.row(static_cast<std::size_t>(r))) ? exit_label : !exit_label;
        cm.add(predicted, labels[static_cast<std::size_t>(r)]);
    }
    return metrics(cm).get(goal);
}

// Thresholds are quantized to two decimals so the rendered rule text carries
// the cue exactly and re-predicting from it reproduces predict.
std::vector<double> percentile_grid(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::vector<double> grid;
    grid.reserve(9);
    for (int p = 10; p <= 90; p += 10) {
        double v = values[(n - 1) * static_cast<std::size_t>(p) / 100];
        v = std::round(v * 100.0) / 100.0;
        if (grid.empty() || v > grid.back()) grid.push_back(v);
    }
    return grid;
}

}  // namespace

Cue learn_level_cue(const FeatureMatrix& rows, const std::vector<bool>& labels,
                    std::span<const int> remaining, bool exit_label, Goal goal) {
    if (remaining.empty()) throw std::invalid_argument("fft: no remaining rows");
    if (rows.n_features == 0) throw std::invalid_argument("fft: no features");

    bool all_constant = true;
    for (std::size_t f = 0; f < rows.n_features && all_constant; ++f) {
        double first = rows.at(static_cast<std::size_t>(remaining[0]), f);
        for (int r : remaining) {
            if (rows.at(static_cast<std::size_t>(r), f) != first) {
                all_constant = false;
                break;
            }
        }
    }
    if (all_constant) {
        // nothing to split on; empty exit side keeps the level a no-op
        return Cue{0, CueDirection::greater, rows.at(static_cast<std::size_t>(remaining[0]), 0)};
    }

    Cue best;
    double best_score = -1.0;
    std::vector<double> values(remaining.size());
    for (std::size_t f = 0; f < rows.n_features; ++f) {
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            values[i] = rows.at(static_cast<std::size_t>(remaining[i]), f);
        }
        for (double threshold : percentile_grid(values)) {
            for (CueDirection dir : {CueDirection::greater, CueDirection::less_equal}) {
                Cue candidate{static_cast<int>(f), dir, threshold};
                double score = score_split(rows, labels, remaining, candidate, exit_label, goal);
                if (score > best_score) {
                    best_score = score;
                    best = candidate;
                }
            }
        }
    }
    return best;
}

FrugalTree grow_tree(const FeatureMatrix& rows, const std::vector<bool>& labels,
                     const ExitPolicy& policy, Goal goal) {
    bool any_true = false, any_false = false;
    for (bool l : labels) (l ? any_true : any_false) = true;
    if (!any_true || !any_false) throw DegenerateFoldError{};

    FrugalTree tree;
    tree.policy = policy;
    tree.goal = goal;

    std::vector<int> remaining(rows.n_docs);
    for (std::size_t i = 0; i < rows.n_docs; ++i) remaining[i] = static_cast<int>(i);

    for (bool exit_label : policy.bits) {
        Cue cue;
        if (remaining.empty()) {
            // exhausted rows: pass-through level with an empty exit side
            cue = Cue{0, CueDirection::greater, std::numeric_limits<double>::infinity()};
        } else {
            cue = learn_level_cue(rows, labels, remaining, exit_label, goal);
        }
        std::vector<int> kept;
        kept.reserve(remaining.size());
        for (int r : remaining) {
            if (!cue.satisfied(rows.row(static_cast<std::size_t>(r)))) kept.push_back(r);
        }
        remaining = std::move(kept);
        tree.cues.push_back(cue);
    }

    ConfusionMatrix cm;
    for (std::size_t r = 0; r < rows.n_docs; ++r) {
        cm.add(predict(tree, rows.row(r)), labels[r]);
    }
    tree.training_score = metrics(cm).get(goal);
    return tree;
}

FrugalTree train_best(const FeatureMatrix& rows, const std::vector<bool>& labels, int depth,
                      Goal goal, unsigned threads) {
    auto policies = enumerate_policies(depth);
    std::vector<FrugalTree> trees(policies.size());
    parallel_for(policies.size(), threads, [&](std::size_t i) {
        trees[i] = grow_tree(rows, labels, policies[i], goal);
    });
    // policies are enumerated in lexicographic order, so the first maximum is
    // the lexicographically smallest winner
    std::size_t best = 0;
    for (std::size_t i = 1; i < trees.size(); ++i) {
        if (trees[i].training_score > trees[best].training_score) best = i;
    }
    return trees[best];
}

bool predict(const FrugalTree& tree, std::span<const double> row) {
    for (const Cue& cue : tree.cues) {
        if (static_cast<std::size_t>(cue.feature) >= row.size())
            throw std::invalid_argument("fft: row length does not match training features");
    }
    for (std::size_t level = 0; level < tree.cues.size(); ++level) {
        if (tree.cues[level].satisfied(row)) return tree.policy.bits[level];
    }
    return !tree.policy.bits.back();
}

std::string render_rules(const FrugalTree& tree, std::span<const std::string> feature_names,
                         const std::vector<std::vector<std::string>>* topic_top_words) {
    auto name_of = [&](int feature) {
        if (static_cast<std::size_t>(feature) < feature_names.size())
            return feature_names[static_cast<std::size_t>(feature)];
        return std::string("f") + std::to_string(feature);
    };

    std::string out;
    for (std::size_t level = 0; level < tree.cues.size(); ++level) {
        const Cue& cue = tree.cues[level];
        out += level == 0 ? "if      " : "else if ";
        out += name_of(cue.feature);
        out += cue.direction == CueDirection::greater ? " > " : " <= ";
        out += format_double(cue.threshold, 2);
        out += " then ";
        out += tree.policy.bits[level] ? "true" : "false";
        out += '\n';
    }
    out += "else ";
    out += !tree.policy.bits.back() ? "true" : "false";
    out += '\n';

    if (topic_top_words) {
        std::vector<int> referenced;
        for (const Cue& cue : tree.cues) {
            if (std::find(referenced.begin(), referenced.end(), cue.feature) == referenced.end())
                referenced.push_back(cue.feature);
        }
        out += '\n';
        for (int feature : referenced) {
            out += "Topic " + std::to_string(feature + 1) + ":";
            if (static_cast<std::size_t>(feature) < topic_top_words->size()) {
                for (const auto& word : (*topic_top_words)[static_cast<std::size_t>(feature)]) {
                    out += ' ';
                    out += word;
                }
            }
            out += '\n';
        }
    }
    return out;
}

std::string tree_to_json(const FrugalTree& tree) {
    nlohmann::json j;
    j["policy"] = tree.policy.to_string();
    nlohmann::json cues = nlohmann::json::array();
    for (const Cue& c : tree.cues) {
        cues.push_back({{"feature", c.feature},
                        {"direction", c.direction == CueDirection::greater ? ">" : "<="},
                        {"threshold", c.threshold}});
    }
    j["cues"] = std::move(cues);
    j["goal"] = goal_name(tree.goal);
    j["training_score"] = tree.training_score;
    return j.dump();
}

FrugalTree tree_from_json(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text);
    FrugalTree tree;
    for (char b : j.at("policy").get<std::string>()) tree.policy.bits.push_back(b == '1');
    for (const auto& cj : j.at("cues")) {
        Cue c;
        c.feature = cj.at("feature").get<int>();
        c.direction = cj.at("direction").get<std::string>() == ">" ? CueDirection::greater
                                                                   : CueDirection::less_equal;
        c.threshold = cj.at("threshold").get<double>();
        tree.cues.push_back(c);
    }
    tree.goal = *parse_goal(j.at("goal").get<std::string>());
    tree.training_score = j.at("training_score").get<double>();
    return tree;
}

}  // namespace frugal
