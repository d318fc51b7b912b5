#pragma once

#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace frugal {

struct RawDocument {
    std::string id;
    std::string text;
    std::string severity;
};

struct Vocabulary {
    std::vector<std::string> terms;                 // dense ids 0..V-1
    std::unordered_map<std::string, int> term_ids;  // inverse of terms
    std::vector<int> doc_freq;                      // documents containing each term
    int total_docs = 0;
    long long total_terms = 0;  // sum of all token occurrences

    int size() const { return static_cast<int>(terms.size()); }
    std::optional<int> id_of(std::string_view term) const {
        auto it = term_ids.find(std::string(term));
        if (it == term_ids.end()) return std::nullopt;
        return it->second;
    }
};

struct Document {
    std::string id;
    std::vector<int> token_ids;  // post-preprocessing, ordered
    bool label = false;          // true = severe / positive class
};

struct Corpus {
    std::vector<Document> documents;
    Vocabulary vocabulary;
    std::string positive_class;
    double positive_fraction = 0.0;
};

using StopwordSet = std::unordered_set<std::string>;

// The pinned 127-word English stop-word list; data/stopwords.txt ships the
// same words and the tests assert the two never drift apart.
const StopwordSet& default_stopwords();

// One lowercase word per line; '#' starts a comment.
StopwordSet parse_stopwords(std::string_view text);

// Lowercases, splits on any non-alphabetic character, drops tokens shorter
// than two characters.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordSet& stopwords);

// tokenize -> remove_stopwords -> stem
std::vector<std::string> preprocess(std::string_view text, const StopwordSet& stopwords);

// Severity with the maximum count becomes the positive class; ties break to
// the lexicographically smallest severity string.
std::string binarize_labels(const std::map<std::string, long long>& severity_counts);

struct CorpusOptions {
    int min_doc_freq = 1;                   // 1 = keep every term
    const StopwordSet* stopwords = nullptr;  // null = default list
};

Corpus build_corpus(const std::vector<RawDocument>& raw, const CorpusOptions& options = {});

// CSV with header columns id,text,severity (any order); RFC 4180 quoting.
std::vector<RawDocument> read_raw_documents_csv(std::istream& in);

std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(std::string_view text);

// A corpus over a subset of documents with a densely rebuilt vocabulary.
// Feature extractors fit on the sub-corpus see nothing of the held-out rows.
struct SubCorpus {
    Corpus corpus;
    std::vector<int> doc_parent_index;      // sub doc -> parent doc index
    std::vector<int> parent_term_to_local;  // parent term id -> local id, -1 if absent
};

SubCorpus restrict_corpus(const Corpus& parent, std::span<const int> doc_indices);

}  // namespace frugal
