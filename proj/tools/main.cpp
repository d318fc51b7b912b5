#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frugal/cli.hpp"
#include "frugal/textio.hpp"

using namespace frugal;

int main(int argc, char** argv) {
    CLI::App app{"frugal: LDA/TFIDF features, fast-and-frugal-tree and linear-margin "
                 "classifiers, cross-validated experiments with Scott-Knott ranking"};
    app.require_subcommand(1);

    // prep
    cli::PrepOptions prep;
    auto* prep_cmd = app.add_subcommand("prep", "preprocess a csv dataset into a corpus artifact");
    prep_cmd->add_option("--input", prep.input, "input csv (id,text,severity)")->required();
    prep_cmd->add_option("--out", prep.out, "corpus json output")->required();
    prep_cmd->add_option("--stopwords", prep.stopwords_path, "stop-word list file");
    prep_cmd->add_option("--min-doc-freq", prep.min_doc_freq, "prune terms below this doc freq");

    // features
    cli::FeaturesOptions features;
    auto* features_cmd = app.add_subcommand("features", "build a feature matrix from a corpus");
    features_cmd->add_option("--corpus", features.corpus_path, "corpus json")->required();
    features_cmd->add_option("--kind", features.kind, "tfidf | lda");
    features_cmd->add_option("--k", features.topics, "lda topic count");
    features_cmd->add_option("--alpha", features.alpha, "lda alpha (default 50/K)");
    features_cmd->add_option("--beta", features.beta, "lda beta");
    features_cmd->add_option("--iterations", features.iterations, "gibbs sweeps");
    features_cmd->add_option("--seed", features.seed, "random seed");
    features_cmd->add_option("--out", features.out, "feature matrix csv")->required();
    features_cmd->add_option("--model", features.model_out, "topic model json (lda)");

    // train
    cli::TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "train a classifier on the full corpus");
    train_cmd->add_option("--corpus", train.corpus_path, "corpus json")->required();
    train_cmd->add_option("--model", train.topic_model_path, "topic model json (omit for tfidf)");
    train_cmd->add_option("--classifier", train.classifier, "fft | svm");
    train_cmd->add_option("--goal", train.goal, "precision | recall");
    train_cmd->add_option("--depth", train.depth, "fft depth");
    train_cmd->add_option("--svm-lambda", train.svm_lambda, "svm regularization");
    train_cmd->add_option("--svm-epochs", train.svm_epochs, "svm epochs");
    train_cmd->add_option("--seed", train.seed, "random seed");
    train_cmd->add_option("--threads", train.threads, "worker threads");
    train_cmd->add_option("--out", train.out, "model json output")->required();

    // rules
    cli::RulesOptions rules;
    auto* rules_cmd = app.add_subcommand("rules", "fit lda+fft on a corpus and emit rule text");
    rules_cmd->add_option("--corpus", rules.corpus_path, "corpus json")->required();
    rules_cmd->add_option("--method", rules.method, "fft_k10 | fft_k25 | fft_k50 | fft_k100");
    rules_cmd->add_option("--goal", rules.goal, "precision | recall");
    rules_cmd->add_option("--depth", rules.depth, "fft depth");
    rules_cmd->add_option("--iterations", rules.iterations, "gibbs sweeps");
    rules_cmd->add_option("--seed", rules.seed, "random seed");
    rules_cmd->add_option("--threads", rules.threads, "worker threads");
    rules_cmd->add_option("--out", rules.out, "rule text output")->required();

    // experiment
    std::string config_path;
    std::vector<std::string> dataset_flags;
    std::string methods_flag, goal_flag, out_flag;
    int repeats_flag = -1, bins_flag = -1;
    long long seed_flag = -1;
    auto* exp_cmd = app.add_subcommand("experiment", "run the dataset x method matrix");
    exp_cmd->add_option("--config", config_path, "key=value config file");
    exp_cmd->add_option("--dataset", dataset_flags, "dataset as name:path (repeatable)");
    exp_cmd->add_option("--methods", methods_flag, "comma-separated method list");
    exp_cmd->add_option("--goal", goal_flag, "precision | recall");
    exp_cmd->add_option("--repeats", repeats_flag, "cv repeats");
    exp_cmd->add_option("--bins", bins_flag, "cv bins");
    exp_cmd->add_option("--seed", seed_flag, "random seed");
    exp_cmd->add_option("--out", out_flag, "output directory");

    // stats
    cli::StatsOptions stats;
    auto* stats_cmd = app.add_subcommand("stats", "scott-knott rankings from a results csv");
    stats_cmd->add_option("--results", stats.results_path, "results csv")->required();
    stats_cmd->add_option("--out", stats.out, "rankings csv output")->required();
    stats_cmd->add_option("--bootstraps", stats.bootstraps, "bootstrap resamples");
    stats_cmd->add_option("--conf", stats.conf, "confidence level");
    stats_cmd->add_option("--seed", stats.seed, "random seed");

    // report
    cli::ReportOptions report;
    auto* report_cmd = app.add_subcommand("report", "markdown report from results + rankings");
    report_cmd->add_option("--results", report.results_path, "results csv")->required();
    report_cmd->add_option("--rankings", report.rankings_path, "rankings csv")->required();
    report_cmd->add_option("--out", report.out, "report markdown output")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (prep_cmd->parsed()) {
            cli::cmd_prep(prep, std::cout);
        } else if (features_cmd->parsed()) {
            cli::apply_env_seed(features.seed);
            cli::cmd_features(features, std::cout);
        } else if (train_cmd->parsed()) {
            cli::apply_env_seed(train.seed);
            cli::cmd_train(train, std::cout);
        } else if (rules_cmd->parsed()) {
            cli::apply_env_seed(rules.seed);
            cli::cmd_rules(rules, std::cout);
        } else if (exp_cmd->parsed()) {
            cli::ExperimentConfig config;
            if (!config_path.empty()) config = cli::parse_config_text(read_text_file(config_path));
            for (const auto& entry : dataset_flags) {
                auto colon = entry.find(':');
                if (colon == std::string::npos)
                    throw std::runtime_error("--dataset expects name:path");
                config.datasets.emplace_back(entry.substr(0, colon), entry.substr(colon + 1));
            }
            if (!methods_flag.empty()) {
                config.methods.clear();
                std::size_t begin = 0;
                while (begin <= methods_flag.size()) {
                    auto end = methods_flag.find(',', begin);
                    if (end == std::string::npos) end = methods_flag.size();
                    auto name = methods_flag.substr(begin, end - begin);
                    if (!name.empty()) {
                        auto kind = parse_method(name);
                        if (!kind) throw std::runtime_error("unknown method: " + name);
                        config.methods.push_back(*kind);
                    }
                    begin = end + 1;
                }
            }
            if (!goal_flag.empty()) {
                auto goal = parse_goal(goal_flag);
                if (!goal) throw std::runtime_error("unknown goal: " + goal_flag);
                config.rig.goal = *goal;
            }
            if (repeats_flag > 0) config.repeats = repeats_flag;
            if (bins_flag > 0) config.bins = bins_flag;
            if (seed_flag >= 0) config.seed = static_cast<std::uint64_t>(seed_flag);
            if (!out_flag.empty()) config.out_dir = out_flag;
            cli::apply_env_seed(config.seed);
            return cli::cmd_experiment(config, std::cout);
        } else if (stats_cmd->parsed()) {
            cli::apply_env_seed(stats.seed);
            cli::cmd_stats(stats, std::cout);
        } else if (report_cmd->parsed()) {
            cli::cmd_report(report, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
