#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "frugal/corpus.hpp"
#include "frugal/features.hpp"
#include "frugal/rng.hpp"

namespace testutil {

inline std::filesystem::path source_dir() { return FRUGAL_SOURCE_DIR; }

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("frugal_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Two disjoint vocabularies of Porter-stable, non-stop-word tokens.
inline std::vector<std::string> synthetic_vocab(const std::string& prefix, int count) {
    const std::string consonants = "bcdfghjkmn";
    std::vector<std::string> words;
    for (std::size_t i = 0; i < consonants.size() && static_cast<int>(words.size()) < count; ++i) {
        for (std::size_t j = 0; j < consonants.size(); ++j) {
            if (i == j) continue;  // avoid double letters
            words.push_back(prefix + consonants[i] + consonants[j]);
            if (static_cast<int>(words.size()) == count) break;
        }
    }
    return words;
}

// n_docs documents split evenly over two disjoint 20-word vocabularies;
// every tenth document of each half carries the flipped severity, so labels
// are exactly 90% correlated with the vocabulary.
inline std::vector<frugal::RawDocument> synthetic_raw_docs(int n_docs, std::uint64_t seed) {
    auto vocab_a = synthetic_vocab("qa", 20);
    auto vocab_b = synthetic_vocab("zo", 20);
    frugal::Rng rng(seed);
    std::vector<frugal::RawDocument> docs;
    docs.reserve(static_cast<std::size_t>(n_docs));
    for (int i = 0; i < n_docs; ++i) {
        const bool from_a = i < n_docs / 2;
        const auto& vocab = from_a ? vocab_a : vocab_b;
        const int within = from_a ? i : i - n_docs / 2;
        const bool flipped = within % 10 == 0;
        std::string text;
        const int len = 15 + i % 7;
        for (int w = 0; w < len; ++w) {
            if (w) text += ' ';
            text += vocab[rng.next_index(vocab.size())];
        }
        frugal::RawDocument doc;
        doc.id = (from_a ? "a" : "b") + std::to_string(within);
        doc.text = std::move(text);
        doc.severity = (from_a != flipped) ? "high" : "low";
        docs.push_back(std::move(doc));
    }
    return docs;
}

inline frugal::Corpus synthetic_corpus(int n_docs, std::uint64_t seed) {
    return frugal::build_corpus(synthetic_raw_docs(n_docs, seed));
}

// Random labeled rows for classifier tests.
inline frugal::FeatureMatrix random_matrix(std::size_t rows, std::size_t cols,
                                           std::uint64_t seed) {
    frugal::FeatureMatrix m;
    m.kind = frugal::FeatureMatrix::Kind::topic;
    m.n_docs = rows;
    m.n_features = cols;
    m.values.resize(rows * cols);
    m.feature_names.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) m.feature_names.push_back("topic " + std::to_string(c + 1));
    frugal::Rng rng(seed);
    for (auto& v : m.values) v = rng.next_double();
    return m;
}

// ---- independent rule-text interpreter -------------------------------------
// Re-predicts from the rendered rules alone; deliberately shares no code with
// frugal::predict.

struct RuleLine {
    std::string feature_name;
    bool greater = true;
    double threshold = 0.0;
    bool label = false;
};

struct ParsedRules {
    std::vector<RuleLine> lines;
    bool fall_through_label = false;
};

inline ParsedRules parse_rules(const std::string& text) {
    ParsedRules parsed;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) break;  // topic-words block follows
        if (line.rfind("else if ", 0) == 0 || line.rfind("if ", 0) == 0) {
            std::size_t start = line.rfind("else if ", 0) == 0 ? 8 : 3;
            while (start < line.size() && line[start] == ' ') ++start;
            std::size_t op_pos = line.find(" > ", start);
            bool greater = true;
            std::size_t op_len = 3;
            if (op_pos == std::string::npos) {
                op_pos = line.find(" <= ", start);
                greater = false;
                op_len = 4;
            }
            if (op_pos == std::string::npos) throw std::runtime_error("rule parse: no operator");
            std::size_t then_pos = line.find(" then ", op_pos);
            if (then_pos == std::string::npos) throw std::runtime_error("rule parse: no then");
            RuleLine rule;
            rule.feature_name = line.substr(start, op_pos - start);
            rule.greater = greater;
            rule.threshold = std::stod(line.substr(op_pos + op_len, then_pos - op_pos - op_len));
            rule.label = line.substr(then_pos + 6) == "true";
            parsed.lines.push_back(rule);
        } else if (line.rfind("else ", 0) == 0) {
            parsed.fall_through_label = line.substr(5) == "true";
        } else {
            throw std::runtime_error("rule parse: unexpected line: " + line);
        }
    }
    return parsed;
}

inline bool interpret_rules(const ParsedRules& rules,
                            const std::vector<std::string>& feature_names,
                            std::span<const double> row) {
    for (const auto& rule : rules.lines) {
        int feature = -1;
        for (std::size_t f = 0; f < feature_names.size(); ++f) {
            if (feature_names[f] == rule.feature_name) {
                feature = static_cast<int>(f);
                break;
            }
        }
        if (feature < 0) throw std::runtime_error("rule parse: unknown feature " + rule.feature_name);
        double v = row[static_cast<std::size_t>(feature)];
        bool satisfied = rule.greater ? v > rule.threshold : v <= rule.threshold;
        if (satisfied) return rule.label;
    }
    return rules.fall_through_label;
}

}  // namespace testutil
