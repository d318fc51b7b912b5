#include "frugal/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "frugal/rng.hpp"
#include "frugal/textio.hpp"

namespace frugal {

std::string feature_matrix_to_csv(const FeatureMatrix& matrix,
                                  std::span<const std::string> doc_ids) {
    std::string out = "doc_id";
    for (std::size_t f = 0; f < matrix.n_features; ++f) {
        out += ",f" + std::to_string(f);
    }
    out += '\n';
    for (std::size_t d = 0; d < matrix.n_docs; ++d) {
        std::vector<std::string> fields;
        fields.reserve(matrix.n_features + 1);
        fields.push_back(d < doc_ids.size() ? doc_ids[d] : std::to_string(d));
        for (std::size_t f = 0; f < matrix.n_features; ++f) {
            fields.push_back(format_double(matrix.at(d, f), 9));
        }
        out += csv_row(fields);
    }
    return out;
}

FeatureMatrix tfidf(const Corpus& corpus) {
    const Vocabulary& vocab = corpus.vocabulary;
    FeatureMatrix m;
    m.kind = FeatureMatrix::Kind::tfidf;
    m.n_docs = corpus.documents.size();
    m.n_features = static_cast<std::size_t>(vocab.size());
    m.values.assign(m.n_docs * m.n_features, 0.0);
    m.feature_names = vocab.terms;

    const double total_docs = static_cast<double>(vocab.total_docs);
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        const auto& ids = corpus.documents[d].token_ids;
        if (ids.empty()) continue;  // all-zero row
        std::vector<int> counts(m.n_features, 0);
        for (int t : ids) ++counts[static_cast<std::size_t>(t)];
        const double doc_len = static_cast<double>(ids.size());
        for (std::size_t t = 0; t < m.n_features; ++t) {
            if (counts[t] == 0) continue;
            const double tf = static_cast<double>(counts[t]) / doc_len;
            const double idf = std::log(total_docs / static_cast<double>(vocab.doc_freq[t]));
            m.at(d, t) = tf * idf;
        }
    }
    return m;
}

namespace {

void validate_lda_config(const LdaConfig& cfg) {
    if (cfg.topics < 1) throw std::invalid_argument("lda: topics must be >= 1");
    if (cfg.alpha <= 0.0) throw std::invalid_argument("lda: alpha must be > 0");
    if (cfg.beta <= 0.0) throw std::invalid_argument("lda: beta must be > 0");
    if (cfg.iterations < 1) throw std::invalid_argument("lda: iterations must be >= 1");
}

}  // namespace

TopicModel lda_fit(const Corpus& corpus, const LdaConfig& raw_cfg, const SweepObserver& observer) {
    const LdaConfig cfg = raw_cfg.resolved();
    validate_lda_config(cfg);
    const int V = corpus.vocabulary.size();
    if (V < 1) throw std::invalid_argument("lda: empty vocabulary");

    const int K = cfg.topics;
    const std::size_t D = corpus.documents.size();
    bool any_tokens = false;
    std::vector<int> doc_len(D, 0);
    for (std::size_t d = 0; d < D; ++d) {
        doc_len[d] = static_cast<int>(corpus.documents[d].token_ids.size());
        any_tokens |= doc_len[d] > 0;
    }
    if (!any_tokens) throw std::invalid_argument("lda: no non-empty documents");

    std::vector<long long> nd(D * static_cast<std::size_t>(K), 0);   // doc-topic
    std::vector<long long> nw(static_cast<std::size_t>(K) * V, 0);   // topic-word
    std::vector<long long> nk(static_cast<std::size_t>(K), 0);       // topic totals
    std::vector<std::vector<int>> z(D);

    Rng rng(cfg.seed);
    for (std::size_t d = 0; d < D; ++d) {
        const auto& ids = corpus.documents[d].token_ids;
        z[d].resize(ids.size());
        for (std::size_t n = 0; n < ids.size(); ++n) {
            int topic = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(K)));
            z[d][n] = topic;
            ++nd[d * K + topic];
            ++nw[static_cast<std::size_t>(topic) * V + ids[n]];
            ++nk[static_cast<std::size_t>(topic)];
        }
    }

    const double alpha = cfg.alpha;
    const double beta = cfg.beta;
    const double v_beta = static_cast<double>(V) * beta;
    std::vector<double> cumulative(static_cast<std::size_t>(K));

    for (int sweep = 1; sweep <= cfg.iterations; ++sweep) {
        for (std::size_t d = 0; d < D; ++d) {
            const auto& ids = corpus.documents[d].token_ids;
            long long* nd_row = nd.data() + d * K;
            for (std::size_t n = 0; n < ids.size(); ++n) {
                const int w = ids[n];
                const int old_topic = z[d][n];
                --nd_row[old_topic];
                --nw[static_cast<std::size_t>(old_topic) * V + w];
                --nk[static_cast<std::size_t>(old_topic)];

                double total = 0.0;
                for (int k = 0; k < K; ++k) {
                    const double weight =
                        (static_cast<double>(nd_row[k]) + alpha) *
                        (static_cast<double>(nw[static_cast<std::size_t>(k) * V + w]) + beta) /
                        (static_cast<double>(nk[static_cast<std::size_t>(k)]) + v_beta);
                    total += weight;
                    cumulative[static_cast<std::size_t>(k)] = total;
                }
                const double u = rng.next_double() * total;
                int new_topic = K - 1;
                for (int k = 0; k < K; ++k) {
                    if (u < cumulative[static_cast<std::size_t>(k)]) {
                        new_topic = k;
                        break;
                    }
                }
                z[d][n] = new_topic;
                ++nd_row[new_topic];
                ++nw[static_cast<std::size_t>(new_topic) * V + w];
                ++nk[static_cast<std::size_t>(new_topic)];
            }
        }
        if (observer) {
            observer(GibbsCounts{K, V, nd, nw, nk, doc_len}, sweep);
        }
    }

    TopicModel model;
    model.config = cfg;
    model.vocab_size = V;
    model.n_docs = D;
    model.topic_word_counts = std::move(nw);
    model.topic_totals = std::move(nk);
    model.vocab_terms = corpus.vocabulary.terms;
    model.doc_topic.resize(D * static_cast<std::size_t>(K));
    const double k_alpha = static_cast<double>(K) * alpha;
    for (std::size_t d = 0; d < D; ++d) {
        const double denom = static_cast<double>(doc_len[d]) + k_alpha;
        for (int k = 0; k < K; ++k) {
            model.doc_topic[d * K + k] = (static_cast<double>(nd[d * K + k]) + alpha) / denom;
        }
    }
    return model;
}

std::vector<double> lda_transform(const TopicModel& model, std::span<const int> token_ids,
                                  int iterations, std::uint64_t seed) {
    const int K = model.config.topics;
    const int V = model.vocab_size;
    const double alpha = model.config.alpha;
    const double beta = model.config.beta;
    const double v_beta = static_cast<double>(V) * beta;

    std::vector<int> words;
    words.reserve(token_ids.size());
    for (int t : token_ids) {
        if (t >= 0 && t < V) words.push_back(t);  // unseen terms are skipped
    }

    std::vector<double> theta(static_cast<std::size_t>(K));
    if (words.empty()) {
        std::fill(theta.begin(), theta.end(), 1.0 / static_cast<double>(K));
        return theta;
    }

    Rng rng(seed);
    std::vector<long long> local(static_cast<std::size_t>(K), 0);
    std::vector<int> z(words.size());
    for (std::size_t n = 0; n < words.size(); ++n) {
        z[n] = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(K)));
        ++local[static_cast<std::size_t>(z[n])];
    }

    std::vector<double> cumulative(static_cast<std::size_t>(K));
    for (int sweep = 0; sweep < iterations; ++sweep) {
        for (std::size_t n = 0; n < words.size(); ++n) {
            const int w = words[n];
            --local[static_cast<std::size_t>(z[n])];
            double total = 0.0;
            for (int k = 0; k < K; ++k) {
                const double weight =
                    (static_cast<double>(local[static_cast<std::size_t>(k)]) + alpha) *
                    (static_cast<double>(model.word_count(k, w)) + beta) /
                    (static_cast<double>(model.topic_totals[static_cast<std::size_t>(k)]) + v_beta);
                total += weight;
                cumulative[static_cast<std::size_t>(k)] = total;
            }
            const double u = rng.next_double() * total;
            int new_topic = K - 1;
            for (int k = 0; k < K; ++k) {
                if (u < cumulative[static_cast<std::size_t>(k)]) {
                    new_topic = k;
                    break;
                }
            }
            z[n] = new_topic;
            ++local[static_cast<std::size_t>(new_topic)];
        }
    }

    const double denom = static_cast<double>(words.size()) + static_cast<double>(K) * alpha;
    for (int k = 0; k < K; ++k) {
        theta[static_cast<std::size_t>(k)] =
            (static_cast<double>(local[static_cast<std::size_t>(k)]) + alpha) / denom;
    }
    return theta;
}

std::vector<std::string> top_words(const TopicModel& model, int topic, int n) {
    if (topic < 0 || topic >= model.config.topics)
        throw std::out_of_range("top_words: topic out of range");
    const int V = model.vocab_size;
    std::vector<int> order(static_cast<std::size_t>(V));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return model.word_count(topic, a) > model.word_count(topic, b);
    });
    const int take = std::min(n, V);
    std::vector<std::string> words;
    words.reserve(static_cast<std::size_t>(std::max(take, 0)));
    for (int i = 0; i < take; ++i) {
        words.push_back(model.vocab_terms[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
    }
    return words;
}

FeatureMatrix topic_feature_matrix(const TopicModel& model) {
    FeatureMatrix m;
    m.kind = FeatureMatrix::Kind::topic;
    m.n_docs = model.n_docs;
    m.n_features = static_cast<std::size_t>(model.config.topics);
    m.values = model.doc_topic;
    m.feature_names.reserve(m.n_features);
    for (std::size_t k = 0; k < m.n_features; ++k) {
        m.feature_names.push_back("topic " + std::to_string(k + 1));
    }
    return m;
}

std::string topic_model_to_json(const TopicModel& model) {
    nlohmann::json j;
    j["config"] = {{"topics", model.config.topics},
                   {"alpha", model.config.alpha},
                   {"beta", model.config.beta},
                   {"iterations", model.config.iterations},
                   {"seed", model.config.seed}};
    j["vocabulary"] = model.vocab_terms;
    j["topic_word_counts"] = model.topic_word_counts;
    j["doc_topic"] = model.doc_topic;
    return j.dump();
}

TopicModel topic_model_from_json(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TopicModel model;
    const auto& c = j.at("config");
    model.config.topics = c.at("topics").get<int>();
    model.config.alpha = c.at("alpha").get<double>();
    model.config.beta = c.at("beta").get<double>();
    model.config.iterations = c.at("iterations").get<int>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.vocab_terms = j.at("vocabulary").get<std::vector<std::string>>();
    model.vocab_size = static_cast<int>(model.vocab_terms.size());
    model.topic_word_counts = j.at("topic_word_counts").get<std::vector<long long>>();
    model.doc_topic = j.at("doc_topic").get<std::vector<double>>();
    const int topics = model.config.topics;
    model.n_docs = model.doc_topic.size() / static_cast<std::size_t>(topics);
    model.topic_totals.assign(static_cast<std::size_t>(topics), 0);
    for (int k = 0; k < topics; ++k) {
        for (int w = 0; w < model.vocab_size; ++w) {
            model.topic_totals[static_cast<std::size_t>(k)] += model.word_count(k, w);
        }
    }
    return model;
}

TfidfModel TfidfModel::fit(const Corpus& parent, std::span<const int> train_docs) {
    SubCorpus sub = restrict_corpus(parent, train_docs);
    TfidfModel m;
    m.vocab = std::move(sub.corpus.vocabulary);
    m.parent_term_to_local = std::move(sub.parent_term_to_local);
    return m;
}

FeatureMatrix TfidfModel::train_matrix(const Corpus& parent,
                                       std::span<const int> train_docs) const {
    FeatureMatrix m;
    m.kind = FeatureMatrix::Kind::tfidf;
    m.n_docs = train_docs.size();
    m.n_features = static_cast<std::size_t>(vocab.size());
    m.values.assign(m.n_docs * m.n_features, 0.0);
    m.feature_names = vocab.terms;
    for (std::size_t i = 0; i < train_docs.size(); ++i) {
        auto row = transform(parent.documents[static_cast<std::size_t>(train_docs[i])]);
        std::copy(row.begin(), row.end(), m.values.begin() + static_cast<std::ptrdiff_t>(i * m.n_features));
    }
    return m;
}

std::vector<double> TfidfModel::transform(const Document& parent_doc) const {
    std::vector<double> row(static_cast<std::size_t>(vocab.size()), 0.0);
    if (parent_doc.token_ids.empty()) return row;
    std::vector<int> counts(row.size(), 0);
    for (int parent_term : parent_doc.token_ids) {
        if (parent_term < 0 ||
            static_cast<std::size_t>(parent_term) >= parent_term_to_local.size())
            continue;
        int local = parent_term_to_local[static_cast<std::size_t>(parent_term)];
        if (local >= 0) ++counts[static_cast<std::size_t>(local)];
    }
    // tf normalizes by the full document length, unseen terms included
    const double doc_len = static_cast<double>(parent_doc.token_ids.size());
    const double total_docs = static_cast<double>(vocab.total_docs);
    for (std::size_t t = 0; t < row.size(); ++t) {
        if (counts[t] == 0) continue;
        row[t] = (static_cast<double>(counts[t]) / doc_len) *
                 std::log(total_docs / static_cast<double>(vocab.doc_freq[t]));
    }
    return row;
}

LdaFeatureModel LdaFeatureModel::fit(const Corpus& parent, std::span<const int> train_docs,
                                     const LdaConfig& cfg, int fold_in_iterations) {
    SubCorpus sub = restrict_corpus(parent, train_docs);
    LdaFeatureModel m;
    m.model = lda_fit(sub.corpus, cfg);
    m.parent_term_to_local = std::move(sub.parent_term_to_local);
    m.fold_in_iterations = fold_in_iterations;
    m.transform_seed = mix_seed(cfg.seed, 0x7f01dull);
    return m;
}

std::vector<double> LdaFeatureModel::transform(const Document& parent_doc,
                                               std::uint64_t stream) const {
    std::vector<int> local_ids;
    local_ids.reserve(parent_doc.token_ids.size());
    for (int parent_term : parent_doc.token_ids) {
        if (parent_term < 0 ||
            static_cast<std::size_t>(parent_term) >= parent_term_to_local.size())
            continue;
        int local = parent_term_to_local[static_cast<std::size_t>(parent_term)];
        if (local >= 0) local_ids.push_back(local);
    }
    return lda_transform(model, local_ids, fold_in_iterations, mix_seed(transform_seed, stream));
}

}  // namespace frugal
