#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "frugal/corpus.hpp"

namespace frugal {

struct FeatureMatrix {
    enum class Kind { tfidf, topic };

    Kind kind = Kind::tfidf;
    std::size_t n_docs = 0;
    std::size_t n_features = 0;
    std::vector<double> values;  // row-major, n_docs x n_features
    std::vector<std::string> feature_names;

    double at(std::size_t doc, std::size_t feature) const {
        return values[doc * n_features + feature];
    }
    double& at(std::size_t doc, std::size_t feature) {
        return values[doc * n_features + feature];
    }
    std::span<const double> row(std::size_t doc) const {
        return {values.data() + doc * n_features, n_features};
    }
};

// header doc_id,f0..f{n-1}
std::string feature_matrix_to_csv(const FeatureMatrix& matrix,
                                  std::span<const std::string> doc_ids);

// entry(doc, term) = (count in doc / doc token count) * ln(total docs / doc_freq)
FeatureMatrix tfidf(const Corpus& corpus);

struct LdaConfig {
    int topics = 10;
    double alpha = 0.0;  // <= 0 resolves to 50/K
    double beta = 0.01;
    int iterations = 200;
    std::uint64_t seed = 1;

    LdaConfig resolved() const {
        LdaConfig c = *this;
        if (c.alpha <= 0.0) c.alpha = 50.0 / static_cast<double>(c.topics);
        return c;
    }
};

struct TopicModel {
    LdaConfig config;  // resolved values
    int vocab_size = 0;
    std::size_t n_docs = 0;
    std::vector<long long> topic_word_counts;  // topics x vocab, row-major
    std::vector<long long> topic_totals;       // per topic
    std::vector<double> doc_topic;             // n_docs x topics, row-major
    std::vector<std::string> vocab_terms;      // vocabulary snapshot

    long long word_count(int topic, int word) const {
        return topic_word_counts[static_cast<std::size_t>(topic) * vocab_size + word];
    }
    std::span<const double> doc_row(std::size_t doc) const {
        return {doc_topic.data() + doc * static_cast<std::size_t>(config.topics),
                static_cast<std::size_t>(config.topics)};
    }
};

// Counts snapshot handed to the sweep observer; used by invariants tests.
struct GibbsCounts {
    int topics = 0;
    int vocab = 0;
    std::span<const long long> doc_topic_counts;   // docs x topics
    std::span<const long long> topic_word_counts;  // topics x vocab
    std::span<const long long> topic_totals;       // per topic
    std::span<const int> doc_lengths;
};
using SweepObserver = std::function<void(const GibbsCounts&, int sweep)>;

// Collapsed Gibbs sampling, sequential by contract so a seed pins the result
// bit for bit. The final state is read directly (no burn-in discard).
TopicModel lda_fit(const Corpus& corpus, const LdaConfig& cfg,
                   const SweepObserver& observer = {});

// Fold-in for one document: resamples only its assignments against frozen
// topic-word counts. Ids outside [0, V) are skipped; an empty (or fully
// unseen) document yields the uniform vector.
std::vector<double> lda_transform(const TopicModel& model, std::span<const int> token_ids,
                                  int iterations, std::uint64_t seed);

// n highest-count terms for a topic, descending; ties break to the lower
// term id. Asking for more than V returns all V.
std::vector<std::string> top_words(const TopicModel& model, int topic, int n);

FeatureMatrix topic_feature_matrix(const TopicModel& model);

std::string topic_model_to_json(const TopicModel& model);
TopicModel topic_model_from_json(std::string_view text);

// ---- fold-aware extractors -------------------------------------------------
// Both extractors are fitted strictly on training documents of a parent
// corpus; held-out documents are mapped into the training feature space at
// transform time (terms unseen in training are skipped).

struct TfidfModel {
    Vocabulary vocab;                       // training-side vocabulary
    std::vector<int> parent_term_to_local;  // -1 when absent from training

    static TfidfModel fit(const Corpus& parent, std::span<const int> train_docs);

    FeatureMatrix train_matrix(const Corpus& parent, std::span<const int> train_docs) const;
    std::vector<double> transform(const Document& parent_doc) const;
};

struct LdaFeatureModel {
    TopicModel model;
    std::vector<int> parent_term_to_local;
    int fold_in_iterations = 100;
    std::uint64_t transform_seed = 1;

    static LdaFeatureModel fit(const Corpus& parent, std::span<const int> train_docs,
                               const LdaConfig& cfg, int fold_in_iterations);

    FeatureMatrix train_matrix() const { return topic_feature_matrix(model); }
    std::vector<double> transform(const Document& parent_doc, std::uint64_t stream) const;
};

}  // namespace frugal
