#include "frugal/evalrig.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include <json.hpp>

#include "frugal/parallel.hpp"
#include "frugal/rng.hpp"

namespace frugal {

std::string method_name(MethodKind kind) {
    switch (kind) {
        case MethodKind::tfidf_svm: return "tfidf_svm";
        case MethodKind::fft_k10: return "fft_k10";
        case MethodKind::fft_k25: return "fft_k25";
        case MethodKind::fft_k50: return "fft_k50";
        case MethodKind::fft_k100: return "fft_k100";
        case MethodKind::ldade_svm: return "ldade_svm";
        case MethodKind::ldade_fft: return "ldade_fft";
    }
    return "unknown";
}

std::optional<MethodKind> parse_method(std::string_view name) {
    for (MethodKind kind : kAllMethods) {
        if (method_name(kind) == name) return kind;
    }
    return std::nullopt;
}

bool method_is_tuned(MethodKind kind) {
    return kind == MethodKind::ldade_svm || kind == MethodKind::ldade_fft;
}

bool method_uses_fft(MethodKind kind) {
    switch (kind) {
        case MethodKind::fft_k10:
        case MethodKind::fft_k25:
        case MethodKind::fft_k50:
        case MethodKind::fft_k100:
        case MethodKind::ldade_fft:
            return true;
        default:
            return false;
    }
}

int method_topic_count(MethodKind kind) {
    switch (kind) {
        case MethodKind::fft_k10: return 10;
        case MethodKind::fft_k25: return 25;
        case MethodKind::fft_k50: return 50;
        case MethodKind::fft_k100: return 100;
        default: return 0;
    }
}

FoldPlan stratified_folds(const std::vector<bool>& labels, int repeats, int bins,
                          std::uint64_t seed) {
    if (repeats < 1 || bins < 2) throw std::invalid_argument("folds: need repeats >= 1, bins >= 2");
    std::vector<int> positives, negatives;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] ? positives : negatives).push_back(static_cast<int>(i));
    }
    if (static_cast<int>(positives.size()) < bins || static_cast<int>(negatives.size()) < bins)
        throw std::invalid_argument("cannot stratify: a class has fewer members than bins");

    FoldPlan plan;
    plan.repeats = repeats;
    plan.bins = bins;
    plan.seed = seed;
    plan.assignment.assign(static_cast<std::size_t>(repeats), std::vector<int>(labels.size(), 0));
    for (int r = 0; r < repeats; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        for (std::vector<int>* cls : {&positives, &negatives}) {
            std::vector<int> order = *cls;
            shuffle(order, rng);
            for (std::size_t i = 0; i < order.size(); ++i) {
                plan.assignment[static_cast<std::size_t>(r)][static_cast<std::size_t>(order[i])] =
                    static_cast<int>(i % static_cast<std::size_t>(bins));
            }
        }
    }
    return plan;
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
    std::string out = "dataset,method,repeat,fold,metric,value,runtime_ms\n";
    for (const auto& r : records) {
        out += csv_row({r.dataset, r.method, std::to_string(r.repeat), std::to_string(r.fold),
                        r.metric, format_double(r.value, 6), format_double(r.runtime_ms, 3)});
    }
    return out;
}

std::vector<RunRecord> records_from_csv(const CsvTable& table) {
    const std::vector<std::string> expected = {"dataset", "method", "repeat", "fold",
                                               "metric",  "value",  "runtime_ms"};
    if (table.header != expected) throw std::runtime_error("results csv: unexpected header");
    std::vector<RunRecord> records;
    records.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        if (row.size() != expected.size()) throw std::runtime_error("results csv: short row");
        RunRecord r;
        r.dataset = row[0];
        r.method = row[1];
        r.repeat = std::stoi(row[2]);
        r.fold = std::stoi(row[3]);
        r.metric = row[4];
        r.value = std::stod(row[5]);
        r.runtime_ms = std::stod(row[6]);
        records.push_back(std::move(r));
    }
    return records;
}

namespace {

LdaConfig lda_config_for(int topics, const RigConfig& cfg, std::uint64_t seed) {
    LdaConfig lda;
    lda.topics = topics;
    lda.alpha = cfg.lda_alpha;  // <= 0 resolves to 50/K inside lda_fit
    lda.beta = cfg.lda_beta;
    lda.iterations = cfg.lda_iterations;
    lda.seed = seed;
    return lda.resolved();
}

std::vector<bool> labels_of(const Corpus& corpus, std::span<const int> docs) {
    std::vector<bool> labels;
    labels.reserve(docs.size());
    for (int d : docs) labels.push_back(corpus.documents[static_cast<std::size_t>(d)].label);
    return labels;
}

bool has_both_classes(const std::vector<bool>& labels) {
    bool any_true = false, any_false = false;
    for (bool l : labels) (l ? any_true : any_false) = true;
    return any_true && any_false;
}

void train_classifier(TrainedCell& cell, const FeatureMatrix& rows,
                      const std::vector<bool>& labels, const RigConfig& cfg,
                      std::uint64_t seed) {
    if (method_uses_fft(cell.kind)) {
        cell.tree = train_best(rows, labels, cfg.fft_depth, cfg.goal, 1);
    } else {
        cell.linear = svm_fit(rows, labels, cfg.svm_lambda, cfg.svm_epochs, seed);
    }
}

// Classification-mode DE fitness: fit LDA with the candidate's parameters on
// the training bins, train the downstream classifier, score the validation bin.
double classification_fitness(const Corpus& corpus, std::span<const int> train_docs,
                              std::span<const int> validation_docs, MethodKind kind,
                              const RigConfig& cfg, std::uint64_t seed, const Candidate& cand) {
    LdaConfig lda = lda_config_for(cand.topics, cfg, mix_seed(seed, 0xf17ull));
    lda.alpha = cand.alpha;
    lda.beta = cand.beta;
    int iterations = cfg.de_lda_iterations > 0 ? cfg.de_lda_iterations : cfg.lda_iterations;
    lda.iterations = iterations;

    LdaFeatureModel features = LdaFeatureModel::fit(corpus, train_docs, lda, cfg.fold_in_iterations);
    FeatureMatrix rows = features.train_matrix();
    std::vector<bool> labels = labels_of(corpus, train_docs);

    TrainedCell probe;
    probe.kind = kind;
    train_classifier(probe, rows, labels, cfg, mix_seed(seed, 0xc1full));
    probe.lda = std::move(features);

    ConfusionMatrix cm;
    for (int d : validation_docs) {
        const Document& doc = corpus.documents[static_cast<std::size_t>(d)];
        cm.add(probe.predict(doc, static_cast<std::uint64_t>(d)), doc.label);
    }
    return metrics(cm).get(cfg.goal);
}

}  // namespace

bool TrainedCell::predict(const Document& parent_doc, std::uint64_t stream) const {
    std::vector<double> row;
    if (tfidf) {
        row = tfidf->transform(parent_doc);
    } else {
        row = lda->transform(parent_doc, stream);
    }
    if (tree) return frugal::predict(*tree, row);
    return svm_predict(*linear, row);
}

std::string TrainedCell::params_json() const {
    nlohmann::json j;
    j["method"] = method_name(kind);
    if (tfidf) {
        j["extractor"] = {{"kind", "tfidf"},
                          {"terms", tfidf->vocab.terms},
                          {"doc_freq", tfidf->vocab.doc_freq},
                          {"total_docs", tfidf->vocab.total_docs}};
    }
    if (lda) {
        j["extractor"] = nlohmann::json::parse(topic_model_to_json(lda->model));
    }
    if (tree) j["classifier"] = nlohmann::json::parse(tree_to_json(*tree));
    if (linear) j["classifier"] = nlohmann::json::parse(linear_model_to_json(*linear));
    if (tuned) {
        j["tuned"] = {{"K", tuned->topics}, {"alpha", tuned->alpha}, {"beta", tuned->beta},
                      {"fitness", tuned->fitness}};
    }
    return j.dump();
}

TrainedCell train_method_cell(const Corpus& corpus, MethodKind kind,
                              std::span<const int> train_docs,
                              std::span<const int> validation_docs, const RigConfig& cfg,
                              std::uint64_t seed, std::vector<TuneTraceRow>* tuning_trace) {
    TrainedCell cell;
    cell.kind = kind;

    std::vector<bool> labels = labels_of(corpus, train_docs);
    if (!has_both_classes(labels)) throw DegenerateFoldError{};

    if (kind == MethodKind::tfidf_svm) {
        cell.tfidf = TfidfModel::fit(corpus, train_docs);
        FeatureMatrix rows = cell.tfidf->train_matrix(corpus, train_docs);
        cell.linear = svm_fit(rows, labels, cfg.svm_lambda, cfg.svm_epochs, mix_seed(seed, 1));
        return cell;
    }

    LdaConfig lda;
    if (method_is_tuned(kind)) {
        if (validation_docs.empty())
            throw std::invalid_argument("tuned method needs a validation bin");

        DEConfig de = cfg.de;
        de.seed = mix_seed(seed, 2);
        // the stability precondition needs K <= V on the training vocabulary
        SubCorpus tuning_sub = restrict_corpus(corpus, train_docs);
        de.k_max = std::min(de.k_max, tuning_sub.corpus.vocabulary.size());
        de.k_min = std::min(de.k_min, de.k_max);

        int de_iterations = cfg.de_lda_iterations > 0 ? cfg.de_lda_iterations : cfg.lda_iterations;
        FitnessFn fitness;
        if (cfg.de_fitness == RigConfig::DeFitness::stability) {
            fitness = make_stability_fitness(tuning_sub.corpus, de.stability_runs,
                                             mix_seed(seed, 3), de_iterations);
        } else {
            fitness = [&](const Candidate& cand) {
                return classification_fitness(corpus, train_docs, validation_docs, kind, cfg,
                                              mix_seed(seed, 4), cand);
            };
        }
        DEResult tuned = de_optimize(de, fitness);
        cell.tuned = tuned.best;
        if (tuning_trace) *tuning_trace = std::move(tuned.trace);
        lda = lda_config_for(tuned.best.topics, cfg, mix_seed(seed, 5));
        lda.alpha = tuned.best.alpha;
        lda.beta = tuned.best.beta;
    } else {
        lda = lda_config_for(method_topic_count(kind), cfg, mix_seed(seed, 5));
    }

    cell.lda = LdaFeatureModel::fit(corpus, train_docs, lda, cfg.fold_in_iterations);
    FeatureMatrix rows = cell.lda->train_matrix();
    train_classifier(cell, rows, labels, cfg, mix_seed(seed, 6));
    return cell;
}

RunMatrixResult run_matrix(const Corpus& corpus, const std::string& dataset_name,
                           const std::vector<MethodKind>& methods, const FoldPlan& plan,
                           const RigConfig& cfg) {
    for (const auto& repeat_assignment : plan.assignment) {
        if (repeat_assignment.size() != corpus.documents.size())
            throw std::invalid_argument("run_matrix: fold plan does not match corpus");
    }

    struct CellOutcome {
        std::vector<RunRecord> records;
        std::optional<std::string> warning;
        std::optional<std::pair<std::string, std::string>> trace;
    };

    const std::size_t cells_per_method =
        static_cast<std::size_t>(plan.repeats) * static_cast<std::size_t>(plan.bins);
    const std::size_t total_cells = cells_per_method * methods.size();
    std::vector<CellOutcome> outcomes(total_cells);

    unsigned threads = cfg.threads == 0 ? default_thread_count() : cfg.threads;
    parallel_for(total_cells, threads, [&](std::size_t cell_idx) {
        const std::size_t method_idx = cell_idx / cells_per_method;
        const std::size_t within = cell_idx % cells_per_method;
        const int repeat = static_cast<int>(within) / plan.bins;
        const int fold = static_cast<int>(within) % plan.bins;
        const MethodKind kind = methods[method_idx];

        const auto& assignment = plan.assignment[static_cast<std::size_t>(repeat)];
        std::vector<int> test_docs, train_docs, validation_docs;
        const int validation_bin = method_is_tuned(kind) ? (fold + 1) % plan.bins : -1;
        for (std::size_t d = 0; d < assignment.size(); ++d) {
            if (assignment[d] == fold) test_docs.push_back(static_cast<int>(d));
            else if (assignment[d] == validation_bin) validation_docs.push_back(static_cast<int>(d));
            else train_docs.push_back(static_cast<int>(d));
        }

        const std::uint64_t cell_seed =
            mix_seed(cfg.seed, static_cast<std::uint64_t>(kind),
                     static_cast<std::uint64_t>(repeat * plan.bins + fold));

        const auto started = std::chrono::steady_clock::now();
        TrainedCell trained;
        std::vector<TuneTraceRow> trace;
        try {
            trained = train_method_cell(corpus, kind, train_docs, validation_docs, cfg, cell_seed,
                                        cfg.keep_tuning_traces ? &trace : nullptr);
        } catch (const DegenerateFoldError&) {
            outcomes[cell_idx].warning = dataset_name + "/" + method_name(kind) + " repeat " +
                                         std::to_string(repeat) + " fold " + std::to_string(fold) +
                                         ": skipped (degenerate training fold)";
            return;
        }

        ConfusionMatrix cm;
        for (int d : test_docs) {
            const Document& doc = corpus.documents[static_cast<std::size_t>(d)];
            cm.add(trained.predict(doc, static_cast<std::uint64_t>(d)), doc.label);
        }
        if (cm.total() != static_cast<long long>(test_docs.size()))
            throw std::logic_error("run_matrix: confusion counts do not cover the test bin");
        const auto finished = std::chrono::steady_clock::now();
        const double runtime_ms =
            std::chrono::duration<double, std::milli>(finished - started).count();

        Metrics m = metrics(cm);
        for (Goal g : {Goal::precision, Goal::recall}) {
            outcomes[cell_idx].records.push_back({dataset_name, method_name(kind), repeat, fold,
                                                  goal_name(g), m.get(g), runtime_ms});
        }
        if (!trace.empty()) {
            outcomes[cell_idx].trace = {method_name(kind) + "_r" + std::to_string(repeat) + "_f" +
                                            std::to_string(fold),
                                        trace_to_csv(trace)};
        }
    });

    RunMatrixResult result;
    for (auto& outcome : outcomes) {
        for (auto& record : outcome.records) result.records.push_back(std::move(record));
        if (outcome.warning) result.warnings.push_back(std::move(*outcome.warning));
        if (outcome.trace) result.tuning_traces.push_back(std::move(*outcome.trace));
    }
    std::sort(result.records.begin(), result.records.end(),
              [](const RunRecord& a, const RunRecord& b) {
                  return std::tie(a.dataset, a.method, a.repeat, a.fold, a.metric) <
                         std::tie(b.dataset, b.method, b.repeat, b.fold, b.metric);
              });
    return result;
}

}  // namespace frugal
