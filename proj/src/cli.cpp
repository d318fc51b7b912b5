#include "frugal/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "frugal/parallel.hpp"
#include "frugal/rng.hpp"

namespace frugal::cli {

namespace {

std::uint64_t hash_name(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;  // fnv-1a
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    while (begin <= s.size()) {
        std::size_t end = s.find(sep, begin);
        if (end == std::string_view::npos) end = s.size();
        std::string part = trim(s.substr(begin, end - begin));
        if (!part.empty()) parts.push_back(std::move(part));
        begin = end + 1;
    }
    return parts;
}

StopwordSet load_stopword_file(const std::string& path) {
    return parse_stopwords(read_text_file(path));
}

Corpus load_corpus(const std::string& path, int min_doc_freq, const std::string& stopwords_path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        return corpus_from_json(read_text_file(path));
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    auto raw = read_raw_documents_csv(in);
    CorpusOptions options;
    options.min_doc_freq = min_doc_freq;
    StopwordSet custom;
    if (!stopwords_path.empty()) {
        custom = load_stopword_file(stopwords_path);
        options.stopwords = &custom;
    }
    return build_corpus(raw, options);
}

std::string summary_line(const Corpus& corpus) {
    return std::to_string(corpus.documents.size()) + " documents, " +
           std::to_string(corpus.vocabulary.size()) + " terms, " +
           std::to_string(static_cast<int>(std::lround(corpus.positive_fraction * 100.0))) +
           "% severe";
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
    ExperimentConfig config;
    bool methods_given = false;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string entry = trim(line);
        if (entry.empty()) continue;
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));

        if (key == "dataset") {
            auto colon = value.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(line_no) +
                                         ": dataset expects name:path");
            config.datasets.emplace_back(trim(value.substr(0, colon)),
                                         trim(value.substr(colon + 1)));
        } else if (key == "methods") {
            if (!methods_given) {
                config.methods.clear();
                methods_given = true;
            }
            for (const auto& name : split(value, ',')) {
                auto kind = parse_method(name);
                if (!kind) throw std::runtime_error("unknown method: " + name);
                config.methods.push_back(*kind);
            }
        } else if (key == "goal") {
            auto goal = parse_goal(value);
            if (!goal) throw std::runtime_error("unknown goal: " + value);
            config.rig.goal = *goal;
        } else if (key == "repeats") config.repeats = std::stoi(value);
        else if (key == "bins") config.bins = std::stoi(value);
        else if (key == "seed") config.seed = std::stoull(value);
        else if (key == "min_doc_freq") config.min_doc_freq = std::stoi(value);
        else if (key == "stopwords") config.stopwords_path = value;
        else if (key == "out") config.out_dir = value;
        else if (key == "bootstraps") config.bootstraps = std::stoi(value);
        else if (key == "conf") config.conf = std::stod(value);
        else if (key == "write_traces") config.write_traces = value == "true" || value == "1";
        else if (key == "lda_iterations") config.rig.lda_iterations = std::stoi(value);
        else if (key == "lda_alpha") config.rig.lda_alpha = std::stod(value);
        else if (key == "lda_beta") config.rig.lda_beta = std::stod(value);
        else if (key == "fold_in_iterations") config.rig.fold_in_iterations = std::stoi(value);
        else if (key == "fft_depth") config.rig.fft_depth = std::stoi(value);
        else if (key == "svm_lambda") config.rig.svm_lambda = std::stod(value);
        else if (key == "svm_epochs") config.rig.svm_epochs = std::stoi(value);
        else if (key == "de_np") config.rig.de.np = std::stoi(value);
        else if (key == "de_f") config.rig.de.f = std::stod(value);
        else if (key == "de_cr") config.rig.de.cr = std::stod(value);
        else if (key == "de_generations") config.rig.de.generations = std::stoi(value);
        else if (key == "de_stability_runs") config.rig.de.stability_runs = std::stoi(value);
        else if (key == "de_k_min") config.rig.de.k_min = std::stoi(value);
        else if (key == "de_k_max") config.rig.de.k_max = std::stoi(value);
        else if (key == "de_lda_iterations") config.rig.de_lda_iterations = std::stoi(value);
        else if (key == "de_fitness") {
            if (value == "stability") config.rig.de_fitness = RigConfig::DeFitness::stability;
            else if (value == "classification")
                config.rig.de_fitness = RigConfig::DeFitness::classification;
            else throw std::runtime_error("unknown de_fitness: " + value);
        } else if (key == "threads") config.rig.threads = static_cast<unsigned>(std::stoul(value));
        else throw std::runtime_error("config line " + std::to_string(line_no) +
                                      ": unknown key '" + key + "'");
    }
    return config;
}

bool apply_env_seed(std::uint64_t& seed) {
    const char* env = std::getenv("FRUGAL_SEED");
    if (!env || !*env) return false;
    seed = std::stoull(env);
    return true;
}

void cmd_prep(const PrepOptions& options, std::ostream& log) {
    std::ifstream in(options.input, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + options.input);
    auto raw = read_raw_documents_csv(in);
    CorpusOptions corpus_options;
    corpus_options.min_doc_freq = options.min_doc_freq;
    StopwordSet custom;
    if (!options.stopwords_path.empty()) {
        custom = load_stopword_file(options.stopwords_path);
        corpus_options.stopwords = &custom;
    }
    Corpus corpus = build_corpus(raw, corpus_options);
    atomic_write_file(options.out, corpus_to_json(corpus));
    log << summary_line(corpus) << "\n";
}

void cmd_features(const FeaturesOptions& options, std::ostream& log) {
    Corpus corpus = corpus_from_json(read_text_file(options.corpus_path));
    std::vector<std::string> doc_ids;
    doc_ids.reserve(corpus.documents.size());
    for (const auto& d : corpus.documents) doc_ids.push_back(d.id);

    if (options.kind == "tfidf") {
        FeatureMatrix matrix = tfidf(corpus);
        atomic_write_file(options.out, feature_matrix_to_csv(matrix, doc_ids));
        log << "tfidf features: " << matrix.n_docs << " x " << matrix.n_features << "\n";
        return;
    }
    if (options.kind != "lda") throw std::runtime_error("unknown feature kind: " + options.kind);

    LdaConfig cfg;
    cfg.topics = options.topics;
    cfg.alpha = options.alpha;
    cfg.beta = options.beta;
    cfg.iterations = options.iterations;
    cfg.seed = options.seed;
    TopicModel model = lda_fit(corpus, cfg);
    FeatureMatrix matrix = topic_feature_matrix(model);
    atomic_write_file(options.out, feature_matrix_to_csv(matrix, doc_ids));
    if (!options.model_out.empty()) {
        atomic_write_file(options.model_out, topic_model_to_json(model));
    }
    log << "lda features: " << matrix.n_docs << " x " << matrix.n_features << "\n";
}

void cmd_train(const TrainOptions& options, std::ostream& log) {
    Corpus corpus = corpus_from_json(read_text_file(options.corpus_path));
    std::vector<bool> labels;
    labels.reserve(corpus.documents.size());
    for (const auto& d : corpus.documents) labels.push_back(d.label);

    auto goal = parse_goal(options.goal);
    if (!goal) throw std::runtime_error("unknown goal: " + options.goal);

    FeatureMatrix rows;
    if (options.topic_model_path.empty()) {
        rows = tfidf(corpus);
    } else {
        TopicModel model = topic_model_from_json(read_text_file(options.topic_model_path));
        if (model.n_docs != corpus.documents.size())
            throw std::runtime_error("topic model rows do not match corpus documents");
        rows = topic_feature_matrix(model);
    }

    if (options.classifier == "fft") {
        unsigned threads = options.threads == 0 ? default_thread_count() : options.threads;
        FrugalTree tree = train_best(rows, labels, options.depth, *goal, threads);
        atomic_write_file(options.out, tree_to_json(tree));
        log << "fft policy " << tree.policy.to_string() << " training " << goal_name(*goal)
            << " " << format_double(tree.training_score, 4) << "\n";
    } else if (options.classifier == "svm") {
        LinearModel model =
            svm_fit(rows, labels, options.svm_lambda, options.svm_epochs, options.seed);
        atomic_write_file(options.out, linear_model_to_json(model));
        log << "svm trained on " << rows.n_docs << " rows\n";
    } else {
        throw std::runtime_error("unknown classifier: " + options.classifier);
    }
}

void cmd_rules(const RulesOptions& options, std::ostream& log) {
    Corpus corpus = corpus_from_json(read_text_file(options.corpus_path));
    auto kind = parse_method(options.method);
    if (!kind || !method_uses_fft(*kind) || method_is_tuned(*kind))
        throw std::runtime_error("rules expects a fixed-K fft method, got: " + options.method);
    auto goal = parse_goal(options.goal);
    if (!goal) throw std::runtime_error("unknown goal: " + options.goal);

    std::vector<bool> labels;
    labels.reserve(corpus.documents.size());
    for (const auto& d : corpus.documents) labels.push_back(d.label);

    LdaConfig cfg;
    cfg.topics = method_topic_count(*kind);
    cfg.iterations = options.iterations;
    cfg.seed = options.seed;
    TopicModel model = lda_fit(corpus, cfg);
    FeatureMatrix rows = topic_feature_matrix(model);

    unsigned threads = options.threads == 0 ? default_thread_count() : options.threads;
    FrugalTree tree = train_best(rows, labels, options.depth, *goal, threads);

    std::vector<std::vector<std::string>> words;
    words.reserve(static_cast<std::size_t>(model.config.topics));
    for (int k = 0; k < model.config.topics; ++k) words.push_back(top_words(model, k, 8));

    atomic_write_file(options.out, render_rules(tree, rows.feature_names, &words));
    log << "rules written: policy " << tree.policy.to_string() << ", training "
        << goal_name(*goal) << " " << format_double(tree.training_score, 4) << "\n";
}

int cmd_experiment(const ExperimentConfig& config, std::ostream& log) {
    if (config.datasets.empty()) throw std::runtime_error("no datasets configured");
    if (config.methods.empty()) throw std::runtime_error("no methods configured");

    std::filesystem::path out_dir(config.out_dir);
    std::filesystem::create_directories(out_dir);

    RigConfig rig = config.rig;
    rig.seed = config.seed;

    std::vector<RunRecord> all_records;
    bool all_ok = true;
    for (const auto& [name, path] : config.datasets) {
        try {
            Corpus corpus = load_corpus(path, config.min_doc_freq, config.stopwords_path);
            log << name << ": " << summary_line(corpus) << "\n";
            std::vector<bool> labels;
            labels.reserve(corpus.documents.size());
            for (const auto& d : corpus.documents) labels.push_back(d.label);

            FoldPlan plan = stratified_folds(labels, config.repeats, config.bins,
                                             mix_seed(config.seed, hash_name(name)));
            rig.keep_tuning_traces = config.write_traces;
            RunMatrixResult result = run_matrix(corpus, name, config.methods, plan, rig);
            for (const auto& warning : result.warnings) log << "warning: " << warning << "\n";
            if (config.write_traces) {
                for (const auto& [key, csv] : result.tuning_traces) {
                    atomic_write_file(out_dir / "traces" / (name + "_" + key + ".csv"), csv);
                }
            }
            all_records.insert(all_records.end(), result.records.begin(), result.records.end());
            log << name << ": " << result.records.size() << " records\n";
        } catch (const std::exception& e) {
            log << "dataset " << name << " failed: " << e.what() << "\n";
            all_ok = false;
        }
    }

    atomic_write_file(out_dir / "results.csv", records_to_csv(all_records));

    // rankings and report are derived from the file just written, so
    // `frugal stats` / `frugal report` rebuild them byte-identically offline
    auto records_back = records_from_csv(read_csv_file(out_dir / "results.csv"));
    auto rankings = compute_rankings(records_back, config.bootstraps, config.conf, config.seed);
    atomic_write_file(out_dir / "rankings.csv", rankings_to_csv(rankings));
    auto rankings_back = rankings_from_csv(read_csv_file(out_dir / "rankings.csv"));
    atomic_write_file(out_dir / "report.md", markdown_report(records_back, rankings_back));

    log << "wrote " << (out_dir / "results.csv").string() << ", "
        << (out_dir / "rankings.csv").string() << ", " << (out_dir / "report.md").string()
        << "\n";
    return all_ok ? 0 : 1;
}

void cmd_stats(const StatsOptions& options, std::ostream& log) {
    auto records = records_from_csv(read_csv_file(options.results_path));
    auto rankings = compute_rankings(records, options.bootstraps, options.conf, options.seed);
    atomic_write_file(options.out, rankings_to_csv(rankings));
    log << rankings.size() << " ranking rows\n";
}

void cmd_report(const ReportOptions& options, std::ostream& log) {
    auto records = records_from_csv(read_csv_file(options.results_path));
    auto rankings = rankings_from_csv(read_csv_file(options.rankings_path));
    atomic_write_file(options.out, markdown_report(records, rankings));
    log << "report written to " << options.out << "\n";
}

}  // namespace frugal::cli
