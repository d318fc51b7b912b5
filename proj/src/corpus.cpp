#include "frugal/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "frugal/porter.hpp"
#include "frugal/textio.hpp"

namespace frugal {

namespace {

constexpr const char* kStopwords[] = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
    "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
    "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
    "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
    "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
    "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by",
    "for", "with", "about", "against", "between", "into", "through", "during", "before",
    "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
    "under", "again", "further", "then", "once", "here", "there", "when", "where", "why",
    "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such",
    "no", "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t", "can",
    "will", "just", "don", "should", "now",
};

}  // namespace

const StopwordSet& default_stopwords() {
    static const StopwordSet set(std::begin(kStopwords), std::end(kStopwords));
    return set;
}

StopwordSet parse_stopwords(std::string_view text) {
    StopwordSet set;
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        set.insert(line.substr(begin, end - begin + 1));
    }
    return set;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) tokens.push_back(current);
        current.clear();
    };
    for (char c : text) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalpha(uc)) {
            current += static_cast<char>(std::tolower(uc));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordSet& stopwords) {
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!stopwords.contains(t)) kept.push_back(t);
    }
    return kept;
}

std::vector<std::string> preprocess(std::string_view text, const StopwordSet& stopwords) {
    auto tokens = remove_stopwords(tokenize(text), stopwords);
    for (auto& t : tokens) t = porter_stem(t);
    return tokens;
}

std::string binarize_labels(const std::map<std::string, long long>& severity_counts) {
    if (severity_counts.empty()) throw std::invalid_argument("no labels");
    // std::map iterates keys in order, so keeping the first maximum breaks
    // ties toward the lexicographically smallest severity.
    auto best = severity_counts.begin();
    for (auto it = std::next(best); it != severity_counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

Corpus build_corpus(const std::vector<RawDocument>& raw, const CorpusOptions& options) {
    if (raw.empty()) throw std::invalid_argument("no documents");
    const StopwordSet& stopwords = options.stopwords ? *options.stopwords : default_stopwords();

    {
        std::unordered_set<std::string> seen;
        for (const auto& doc : raw) {
            if (!seen.insert(doc.id).second)
                throw std::invalid_argument("duplicate document id: " + doc.id);
        }
    }

    std::map<std::string, long long> severity_counts;
    for (const auto& doc : raw) ++severity_counts[doc.severity];
    const std::string positive = binarize_labels(severity_counts);

    std::vector<std::vector<std::string>> doc_tokens;
    doc_tokens.reserve(raw.size());
    for (const auto& doc : raw) doc_tokens.push_back(preprocess(doc.text, stopwords));

    // term ids in first-occurrence order; doc_freq in the same pass
    Corpus corpus;
    Vocabulary& vocab = corpus.vocabulary;
    for (const auto& tokens : doc_tokens) {
        std::unordered_set<int> seen_in_doc;
        for (const auto& term : tokens) {
            auto [it, inserted] = vocab.term_ids.try_emplace(term, vocab.size());
            if (inserted) {
                vocab.terms.push_back(term);
                vocab.doc_freq.push_back(0);
            }
            if (seen_in_doc.insert(it->second).second) ++vocab.doc_freq[it->second];
        }
    }

    if (options.min_doc_freq > 1) {
        Vocabulary pruned;
        for (std::size_t t = 0; t < vocab.terms.size(); ++t) {
            if (vocab.doc_freq[t] >= options.min_doc_freq) {
                pruned.term_ids.emplace(vocab.terms[t], pruned.size());
                pruned.terms.push_back(vocab.terms[t]);
                pruned.doc_freq.push_back(vocab.doc_freq[t]);
            }
        }
        vocab = std::move(pruned);
    }

    vocab.total_docs = static_cast<int>(raw.size());
    long long positives = 0;
    for (std::size_t d = 0; d < raw.size(); ++d) {
        Document doc;
        doc.id = raw[d].id;
        doc.label = raw[d].severity == positive;
        positives += doc.label ? 1 : 0;
        doc.token_ids.reserve(doc_tokens[d].size());
        for (const auto& term : doc_tokens[d]) {
            auto it = vocab.term_ids.find(term);
            if (it == vocab.term_ids.end()) continue;  // pruned term
            doc.token_ids.push_back(it->second);
        }
        vocab.total_terms += static_cast<long long>(doc.token_ids.size());
        corpus.documents.push_back(std::move(doc));
    }

    corpus.positive_class = positive;
    corpus.positive_fraction =
        static_cast<double>(positives) / static_cast<double>(corpus.documents.size());
    return corpus;
}

std::vector<RawDocument> read_raw_documents_csv(std::istream& in) {
    CsvTable table = read_csv(in);
    if (table.header.empty()) throw std::runtime_error("csv: missing header row");

    int id_col = -1, text_col = -1, severity_col = -1;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const std::string& name = table.header[c];
        if (name == "id") id_col = static_cast<int>(c);
        else if (name == "text") text_col = static_cast<int>(c);
        else if (name == "severity") severity_col = static_cast<int>(c);
        else throw std::runtime_error("csv: unknown column '" + name + "'");
    }
    if (id_col < 0 || text_col < 0 || severity_col < 0)
        throw std::runtime_error("csv: header must name id, text and severity columns");

    std::vector<RawDocument> docs;
    docs.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.header.size()) {
            throw std::runtime_error("csv line " + std::to_string(table.row_lines[r]) +
                                     ": expected " + std::to_string(table.header.size()) +
                                     " fields, got " + std::to_string(row.size()));
        }
        docs.push_back({row[static_cast<std::size_t>(id_col)],
                        row[static_cast<std::size_t>(text_col)],
                        row[static_cast<std::size_t>(severity_col)]});
    }
    return docs;
}

std::string corpus_to_json(const Corpus& corpus) {
    nlohmann::json j;
    j["positive_class"] = corpus.positive_class;
    j["positive_fraction"] = corpus.positive_fraction;
    j["vocabulary"] = {
        {"terms", corpus.vocabulary.terms},
        {"doc_freq", corpus.vocabulary.doc_freq},
        {"total_docs", corpus.vocabulary.total_docs},
        {"total_terms", corpus.vocabulary.total_terms},
    };
    nlohmann::json docs = nlohmann::json::array();
    for (const auto& d : corpus.documents) {
        docs.push_back({{"id", d.id}, {"token_ids", d.token_ids}, {"label", d.label}});
    }
    j["documents"] = std::move(docs);
    return j.dump();
}

Corpus corpus_from_json(std::string_view text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Corpus corpus;
    corpus.positive_class = j.at("positive_class").get<std::string>();
    corpus.positive_fraction = j.at("positive_fraction").get<double>();
    const auto& v = j.at("vocabulary");
    corpus.vocabulary.terms = v.at("terms").get<std::vector<std::string>>();
    corpus.vocabulary.doc_freq = v.at("doc_freq").get<std::vector<int>>();
    corpus.vocabulary.total_docs = v.at("total_docs").get<int>();
    corpus.vocabulary.total_terms = v.at("total_terms").get<long long>();
    if (corpus.vocabulary.doc_freq.size() != corpus.vocabulary.terms.size())
        throw std::runtime_error("corpus artifact: doc_freq and terms lengths differ");
    for (std::size_t t = 0; t < corpus.vocabulary.terms.size(); ++t) {
        corpus.vocabulary.term_ids.emplace(corpus.vocabulary.terms[t], static_cast<int>(t));
    }
    const int vocab_size = corpus.vocabulary.size();
    for (const auto& dj : j.at("documents")) {
        Document d;
        d.id = dj.at("id").get<std::string>();
        d.token_ids = dj.at("token_ids").get<std::vector<int>>();
        d.label = dj.at("label").get<bool>();
        for (int t : d.token_ids) {
            if (t < 0 || t >= vocab_size)
                throw std::runtime_error("corpus artifact: token id out of range in document " +
                                         d.id);
        }
        corpus.documents.push_back(std::move(d));
    }
    return corpus;
}

SubCorpus restrict_corpus(const Corpus& parent, std::span<const int> doc_indices) {
    SubCorpus sub;
    sub.doc_parent_index.assign(doc_indices.begin(), doc_indices.end());
    sub.parent_term_to_local.assign(parent.vocabulary.terms.size(), -1);

    Vocabulary& vocab = sub.corpus.vocabulary;
    long long positives = 0;
    for (int parent_idx : doc_indices) {
        const Document& src = parent.documents[static_cast<std::size_t>(parent_idx)];
        Document doc;
        doc.id = src.id;
        doc.label = src.label;
        positives += doc.label ? 1 : 0;
        std::unordered_set<int> seen_in_doc;
        for (int parent_term : src.token_ids) {
            int& local = sub.parent_term_to_local[static_cast<std::size_t>(parent_term)];
            if (local < 0) {
                local = vocab.size();
                vocab.terms.push_back(parent.vocabulary.terms[static_cast<std::size_t>(parent_term)]);
                vocab.term_ids.emplace(vocab.terms.back(), local);
                vocab.doc_freq.push_back(0);
            }
            if (seen_in_doc.insert(local).second) ++vocab.doc_freq[local];
            doc.token_ids.push_back(local);
        }
        vocab.total_terms += static_cast<long long>(doc.token_ids.size());
        sub.corpus.documents.push_back(std::move(doc));
    }
    vocab.total_docs = static_cast<int>(sub.corpus.documents.size());
    sub.corpus.positive_class = parent.positive_class;
    sub.corpus.positive_fraction =
        sub.corpus.documents.empty()
            ? 0.0
            : static_cast<double>(positives) / static_cast<double>(sub.corpus.documents.size());
    return sub;
}

}  // namespace frugal
