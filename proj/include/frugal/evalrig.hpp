#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "frugal/corpus.hpp"
#include "frugal/features.hpp"
#include "frugal/fft.hpp"
#include "frugal/metrics.hpp"
#include "frugal/svm.hpp"
#include "frugal/textio.hpp"
#include "frugal/tuner.hpp"

namespace frugal {

enum class MethodKind { tfidf_svm, fft_k10, fft_k25, fft_k50, fft_k100, ldade_svm, ldade_fft };

inline constexpr std::array<MethodKind, 7> kAllMethods = {
    MethodKind::tfidf_svm, MethodKind::fft_k10,   MethodKind::fft_k25, MethodKind::fft_k50,
    MethodKind::fft_k100,  MethodKind::ldade_svm, MethodKind::ldade_fft};

std::string method_name(MethodKind kind);
std::optional<MethodKind> parse_method(std::string_view name);
bool method_is_tuned(MethodKind kind);
bool method_uses_fft(MethodKind kind);
int method_topic_count(MethodKind kind);  // fixed-K methods only

struct FoldPlan {
    int repeats = 5;
    int bins = 5;
    std::vector<std::vector<int>> assignment;  // [repeat][doc] -> bin
    std::uint64_t seed = 1;
};

// Per repeat, documents are shuffled within each class and dealt round-robin
// into bins, so per-bin class counts stay within one of perfect proportion.
FoldPlan stratified_folds(const std::vector<bool>& labels, int repeats, int bins,
                          std::uint64_t seed);

struct RunRecord {
    std::string dataset;
    std::string method;
    int repeat = 0;
    int fold = 0;
    std::string metric;  // precision | recall
    double value = 0.0;
    double runtime_ms = 0.0;
};

// dataset,method,repeat,fold,metric,value,runtime_ms
std::string records_to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const CsvTable& table);

struct RigConfig {
    Goal goal = Goal::recall;
    std::uint64_t seed = 1;

    int lda_iterations = 200;
    double lda_alpha = 0.0;  // <= 0 resolves to 50/K
    double lda_beta = 0.01;
    int fold_in_iterations = 100;

    int fft_depth = 4;

    double svm_lambda = 1e-4;
    int svm_epochs = 100;

    DEConfig de;
    int de_lda_iterations = 0;  // 0 -> lda_iterations
    enum class DeFitness { stability, classification };
    DeFitness de_fitness = DeFitness::stability;
    bool keep_tuning_traces = false;

    unsigned threads = 0;  // 0 -> hardware concurrency
};

// One fitted (feature extractor, classifier) pair. Fitting sees only the
// documents it was given; held-out documents only pass through transform and
// predict.
struct TrainedCell {
    MethodKind kind = MethodKind::tfidf_svm;
    std::optional<TfidfModel> tfidf;
    std::optional<LdaFeatureModel> lda;
    std::optional<LinearModel> linear;
    std::optional<FrugalTree> tree;
    std::optional<Candidate> tuned;

    bool predict(const Document& parent_doc, std::uint64_t stream) const;
    std::string params_json() const;
};

// Tuned methods expect the DE validation bin in `validation_docs` and train on
// `train_docs` alone; for plain methods `validation_docs` stays empty.
TrainedCell train_method_cell(const Corpus& corpus, MethodKind kind,
                              std::span<const int> train_docs,
                              std::span<const int> validation_docs, const RigConfig& cfg,
                              std::uint64_t seed,
                              std::vector<TuneTraceRow>* tuning_trace = nullptr);

struct RunMatrixResult {
    std::vector<RunRecord> records;    // sorted by dataset, method, repeat, fold, metric
    std::vector<std::string> warnings; // skipped cells
    // tuning traces per cell ("<method>_r<repeat>_f<fold>" -> csv), when kept
    std::vector<std::pair<std::string, std::string>> tuning_traces;
};

RunMatrixResult run_matrix(const Corpus& corpus, const std::string& dataset_name,
                           const std::vector<MethodKind>& methods, const FoldPlan& plan,
                           const RigConfig& cfg);

}  // namespace frugal
