#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "frugal/evalrig.hpp"
#include "frugal/report.hpp"

namespace frugal::cli {

// key=value experiment configuration; CLI flags override file values and the
// FRUGAL_SEED environment variable overrides every seed last.
struct ExperimentConfig {
    std::vector<std::pair<std::string, std::string>> datasets;  // name -> path
    std::vector<MethodKind> methods{kAllMethods.begin(), kAllMethods.end()};
    int repeats = 5;
    int bins = 5;
    std::uint64_t seed = 1;
    int min_doc_freq = 1;
    std::string stopwords_path;
    std::string out_dir = "out";
    int bootstraps = 1000;
    double conf = 0.95;
    bool write_traces = false;
    RigConfig rig;
};

ExperimentConfig parse_config_text(std::string_view text);

// Applies FRUGAL_SEED when set; returns true if it overrode the seed.
bool apply_env_seed(std::uint64_t& seed);

struct PrepOptions {
    std::string input;
    std::string out;
    std::string stopwords_path;
    int min_doc_freq = 1;
};
void cmd_prep(const PrepOptions& options, std::ostream& log);

struct FeaturesOptions {
    std::string corpus_path;
    std::string kind = "tfidf";  // tfidf | lda
    int topics = 10;
    double alpha = 0.0;  // <= 0 -> 50/K
    double beta = 0.01;
    int iterations = 200;
    std::uint64_t seed = 1;
    std::string out;        // feature matrix csv
    std::string model_out;  // topic model json (lda only)
};
void cmd_features(const FeaturesOptions& options, std::ostream& log);

struct TrainOptions {
    std::string corpus_path;
    std::string topic_model_path;  // empty -> tfidf features
    std::string classifier = "fft";  // fft | svm
    std::string goal = "recall";
    int depth = 4;
    double svm_lambda = 1e-4;
    int svm_epochs = 100;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;  // model json
};
void cmd_train(const TrainOptions& options, std::ostream& log);

struct RulesOptions {
    std::string corpus_path;
    std::string method = "fft_k10";
    std::string goal = "recall";
    int depth = 4;
    int iterations = 200;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;  // rule text
};
void cmd_rules(const RulesOptions& options, std::ostream& log);

// Returns 0 iff every requested dataset completed.
int cmd_experiment(const ExperimentConfig& config, std::ostream& log);

struct StatsOptions {
    std::string results_path;
    std::string out;
    int bootstraps = 1000;
    double conf = 0.95;
    std::uint64_t seed = 1;
};
void cmd_stats(const StatsOptions& options, std::ostream& log);

struct ReportOptions {
    std::string results_path;
    std::string rankings_path;
    std::string out;
};
void cmd_report(const ReportOptions& options, std::ostream& log);

}  // namespace frugal::cli
