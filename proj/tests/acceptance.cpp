// Acceptance suite: one criterion per check, one pass/fail line each.
// Exits non-zero if any criterion fails; data-dependent checks print SKIP
// when their inputs are not available.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "frugal/cli.hpp"
#include "frugal/evalrig.hpp"
#include "frugal/fft.hpp"
#include "frugal/rng.hpp"
#include "frugal/stats.hpp"
#include "frugal/tuner.hpp"
#include "helpers.hpp"

using namespace frugal;

namespace {

struct Skip {
    std::string reason;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) { return format_double(v, 3); }

// ---- criterion bodies -------------------------------------------------------

std::string fft_enumeration() {
    FeatureMatrix rows = testutil::random_matrix(200, 6, 101);
    std::vector<bool> labels;
    Rng rng(102);
    for (std::size_t i = 0; i < rows.n_docs; ++i) labels.push_back(rng.next_double() < 0.5);

    auto started = std::chrono::steady_clock::now();
    FrugalTree best = train_best(rows, labels, 4, Goal::recall, 1);
    double seconds = elapsed_seconds(started);

    auto policies = enumerate_policies(4);
    require(policies.size() == 16, "expected 16 policies at depth 4");
    double max_score = -1.0;
    for (const auto& policy : policies) {
        max_score = std::max(max_score, grow_tree(rows, labels, policy, Goal::recall).training_score);
    }
    require(std::fabs(best.training_score - max_score) <= 1e-12,
            "winner is not the exhaustive maximum");
    require(seconds < 1.0, "train_best took " + fmt(seconds) + " s on the 200-row fixture");
    return "16 trees, winner matches exhaustive maximum, " + fmt(seconds) + " s";
}

std::string end_to_end_pipeline() {
    auto started = std::chrono::steady_clock::now();
    Corpus corpus = testutil::synthetic_corpus(400, 2024);
    std::vector<bool> labels;
    for (const auto& d : corpus.documents) labels.push_back(d.label);
    FoldPlan plan = stratified_folds(labels, 5, 5, 7);

    auto median_of = [&](Goal goal, const std::string& metric) {
        RigConfig rig;
        rig.goal = goal;
        rig.seed = 11;
        rig.threads = 0;
        RunMatrixResult result = run_matrix(corpus, "syn", {MethodKind::fft_k10}, plan, rig);
        std::vector<double> values;
        for (const auto& r : result.records) {
            if (r.metric == metric) values.push_back(r.value);
        }
        require(values.size() == 25, "expected 25 " + metric + " records");
        return median(values);
    };

    double recall_median = median_of(Goal::recall, "recall");
    double precision_median = median_of(Goal::precision, "precision");
    double seconds = elapsed_seconds(started);

    require(recall_median >= 0.85,
            "median recall " + fmt(recall_median) + " below 0.85");
    require(precision_median >= 0.85,
            "median precision " + fmt(precision_median) + " below 0.85");
    require(seconds < 60.0, "pipeline took " + fmt(seconds) + " s (limit 60)");
    return "median recall " + fmt(recall_median) + ", median precision " +
           fmt(precision_median) + ", " + fmt(seconds) + " s";
}

std::string tfidf_oracle_check() {
    for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
        Corpus corpus = testutil::synthetic_corpus(50, seed);
        FeatureMatrix m = tfidf(corpus);
        for (std::size_t d = 0; d < m.n_docs; ++d) {
            const auto& ids = corpus.documents[d].token_ids;
            for (std::size_t t = 0; t < m.n_features; ++t) {
                long long w = 0;
                for (int id : ids) {
                    if (id == static_cast<int>(t)) ++w;
                }
                long long df = 0;
                for (const auto& other : corpus.documents) {
                    for (int id : other.token_ids) {
                        if (id == static_cast<int>(t)) {
                            ++df;
                            break;
                        }
                    }
                }
                double expected = 0.0;
                if (w > 0 && df > 0 && !ids.empty()) {
                    expected = (static_cast<double>(w) / static_cast<double>(ids.size())) *
                               std::log(static_cast<double>(corpus.documents.size()) /
                                        static_cast<double>(df));
                }
                require(std::fabs(m.at(d, t) - expected) <= 1e-12,
                        "tfidf mismatch beyond 1e-12 at doc " + std::to_string(d));
            }
        }
    }
    return "3 random corpora match the two-pass recomputation within 1e-12";
}

std::string gibbs_invariants() {
    Corpus corpus = testutil::synthetic_corpus(50, 77);
    const long long total_tokens = corpus.vocabulary.total_terms;
    LdaConfig cfg{.topics = 5, .alpha = 0.0, .beta = 0.01, .iterations = 50, .seed = 21};

    int sweeps = 0;
    auto observer = [&](const GibbsCounts& counts, int) {
        ++sweeps;
        long long nw_sum = 0;
        for (long long v : counts.topic_word_counts) nw_sum += v;
        require(nw_sum == total_tokens, "topic-word counts lost tokens");
        for (std::size_t d = 0; d < counts.doc_lengths.size(); ++d) {
            long long row = 0;
            for (int k = 0; k < counts.topics; ++k) {
                row += counts.doc_topic_counts[d * static_cast<std::size_t>(counts.topics) +
                                               static_cast<std::size_t>(k)];
            }
            require(row == counts.doc_lengths[d], "doc-topic counts lost tokens");
        }
    };
    TopicModel a = lda_fit(corpus, cfg, observer);
    require(sweeps == 50, "observer missed sweeps");
    for (std::size_t d = 0; d < a.n_docs; ++d) {
        double sum = 0.0;
        for (double v : a.doc_row(d)) sum += v;
        require(std::fabs(sum - 1.0) <= 1e-9, "doc_topic row does not sum to 1");
    }
    TopicModel b = lda_fit(corpus, cfg);
    require(topic_model_to_json(a) == topic_model_to_json(b), "fixed seed not bit-identical");
    return "counts conserved across 50 sweeps, rows normalized, reruns bit-identical";
}

std::string metric_formulas() {
    Rng rng(55);
    for (int i = 0; i < 100; ++i) {
        ConfusionMatrix cm{.tp = static_cast<long long>(rng.next_index(40)),
                           .fp = static_cast<long long>(rng.next_index(40)),
                           .tn = static_cast<long long>(rng.next_index(40)),
                           .fn = static_cast<long long>(rng.next_index(40))};
        Metrics m = metrics(cm);
        double p = cm.tp + cm.fp > 0 ? double(cm.tp) / double(cm.tp + cm.fp) : 0.0;
        double r = cm.tp + cm.fn > 0 ? double(cm.tp) / double(cm.tp + cm.fn) : 0.0;
        require(m.precision == p && m.recall == r, "metric formula mismatch");
    }
    return "100 random confusion matrices match TP/(TP+FP) and TP/(TP+FN) exactly";
}

std::string stratification_check() {
    Rng rng(66);
    const int bins = 5;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 30 + static_cast<int>(rng.next_index(120));
        std::vector<bool> labels;
        int positives = 0;
        for (int i = 0; i < n; ++i) {
            bool label = rng.next_double() < 0.4;
            labels.push_back(label);
            positives += label ? 1 : 0;
        }
        // both classes need at least `bins` members for stratification
        if (positives < bins || n - positives < bins) {
            --trial;
            continue;
        }
        const int repeats = 2;
        FoldPlan plan = stratified_folds(labels, repeats, bins,
                                         static_cast<std::uint64_t>(trial + 1));
        for (int r = 0; r < repeats; ++r) {
            std::map<int, int> pos_count, neg_count, size;
            for (int d = 0; d < n; ++d) {
                int bin = plan.assignment[static_cast<std::size_t>(r)][static_cast<std::size_t>(d)];
                require(bin >= 0 && bin < bins, "bin out of range");
                ++size[bin];
                (labels[static_cast<std::size_t>(d)] ? pos_count : neg_count)[bin]++;
            }
            int docs_seen = 0;
            for (int b = 0; b < bins; ++b) {
                docs_seen += size[b];
                require(std::fabs(pos_count[b] - double(positives) / bins) <= 1.0,
                        "positive count off by more than 1");
                require(std::fabs(neg_count[b] - double(n - positives) / bins) <= 1.0,
                        "negative count off by more than 1");
            }
            require(docs_seen == n, "documents lost or duplicated across bins");
        }
    }
    return "100 random label vectors stay within +-1 per class per bin";
}

std::string statistics_check() {
    std::vector<double> sample = {0.3, 0.5, 0.5, 0.9, 0.1};
    require(a12(sample, sample) == 0.5, "a12 of identical samples must be exactly 0.5");

    int single_rank = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(900 + static_cast<std::uint64_t>(trial));
        std::map<std::string, std::vector<double>> groups;
        for (const char* name : {"g1", "g2", "g3", "g4"}) {
            for (int i = 0; i < 25; ++i) groups[name].push_back(rng.next_double());
        }
        Ranking r = scott_knott(groups, 1000, 0.95, static_cast<std::uint64_t>(trial));
        if (r.group_count() == 1) ++single_rank;
    }
    require(single_rank >= 90, "same-distribution groups split in " +
                                   std::to_string(100 - single_rank) + "/100 trials");

    for (int trial = 0; trial < 50; ++trial) {
        Rng rng(1700 + static_cast<std::uint64_t>(trial));
        std::map<std::string, std::vector<double>> groups;
        for (int i = 0; i < 25; ++i) {
            groups["hi"].push_back(0.9 + 0.05 * (rng.next_double() - 0.5));
            groups["lo"].push_back(0.1 + 0.05 * (rng.next_double() - 0.5));
        }
        Ranking r = scott_knott(groups, 1000, 0.95, static_cast<std::uint64_t>(trial));
        require(r.group_count() == 2, "separated groups failed to split");
    }
    return "a12 exact, " + std::to_string(single_rank) +
           "/100 null trials single-ranked, separated groups always split";
}

std::string runtime_ordering() {
    auto started = std::chrono::steady_clock::now();
    Corpus corpus = testutil::synthetic_corpus(400, 2024);
    std::vector<bool> labels;
    for (const auto& d : corpus.documents) labels.push_back(d.label);
    FoldPlan plan = stratified_folds(labels, 1, 5, 5);

    RigConfig rig;
    rig.seed = 9;
    rig.de.np = 10;
    rig.de.generations = 3;
    rig.de.stability_runs = 5;

    auto timed = [&](MethodKind kind) {
        auto t0 = std::chrono::steady_clock::now();
        RunMatrixResult result = run_matrix(corpus, "syn", {kind}, plan, rig);
        require(!result.records.empty(), "no records for " + method_name(kind));
        return elapsed_seconds(t0);
    };

    double t_svm = timed(MethodKind::tfidf_svm);
    double t_fft = timed(MethodKind::fft_k10);
    double t_ldade = timed(MethodKind::ldade_svm);
    double total = elapsed_seconds(started);

    require(t_svm < t_fft, "expected tfidf_svm (" + fmt(t_svm) + " s) < lda10+fft (" +
                               fmt(t_fft) + " s)");
    require(t_ldade > 10.0 * t_fft, "expected ldade_svm (" + fmt(t_ldade) +
                                        " s) > 10 x lda10+fft (" + fmt(t_fft) + " s)");
    require(total < 1800.0, "runtime check exceeded 30 minutes");
    return "tfidf_svm " + fmt(t_svm) + " s < fft_k10 " + fmt(t_fft) + " s; ldade_svm " +
           fmt(t_ldade) + " s > 10x fft_k10; total " + fmt(total) + " s";
}

std::string rule_rendering() {
    Corpus corpus = testutil::synthetic_corpus(120, 31);
    std::vector<bool> labels;
    for (const auto& d : corpus.documents) labels.push_back(d.label);

    LdaConfig cfg{.topics = 10, .alpha = 0.5, .beta = 0.01, .iterations = 100, .seed = 13};
    TopicModel model = lda_fit(corpus, cfg);
    FeatureMatrix rows = topic_feature_matrix(model);
    FrugalTree tree = train_best(rows, labels, 4, Goal::precision, 1);

    std::vector<std::vector<std::string>> words;
    for (int k = 0; k < 10; ++k) words.push_back(top_words(model, k, 8));
    std::string text = render_rules(tree, rows.feature_names, &words);

    std::istringstream in(text);
    std::string line;
    int rule_lines = 0;
    while (std::getline(in, line) && !line.empty()) ++rule_lines;
    require(rule_lines == 5, "expected exactly 5 rule lines, got " + std::to_string(rule_lines));

    std::vector<int> features;
    for (const Cue& c : tree.cues) {
        if (std::find(features.begin(), features.end(), c.feature) == features.end())
            features.push_back(c.feature);
    }
    require(features.size() <= 4, "tree references more than 4 topics");

    TopicModel model2 = lda_fit(corpus, cfg);
    FeatureMatrix rows2 = topic_feature_matrix(model2);
    FrugalTree tree2 = train_best(rows2, labels, 4, Goal::precision, 1);
    std::vector<std::vector<std::string>> words2;
    for (int k = 0; k < 10; ++k) words2.push_back(top_words(model2, k, 8));
    require(render_rules(tree2, rows2.feature_names, &words2) == text,
            "fixed seed did not reproduce the rule text");

    auto golden_path = testutil::source_dir() / "tests/data/golden_rules.txt";
    require(std::filesystem::exists(golden_path), "golden file missing: " + golden_path.string());
    require(read_text_file(golden_path) == text, "rendered rules differ from the golden file");
    return "5 rule lines, " + std::to_string(features.size()) +
           " topics referenced, stable + golden match";
}

std::string pits_reproduction() {
    const char* env = std::getenv("PITS_DIR");
    if (!env || !*env) throw Skip{"set PITS_DIR to the directory holding PitsA.csv..PitsF.csv"};
    std::filesystem::path dir(env);

    const std::vector<std::tuple<std::string, std::size_t, int>> expected = {
        {"PitsA", 965, 39}, {"PitsB", 1650, 40}, {"PitsC", 323, 56},
        {"PitsD", 182, 92}, {"PitsE", 825, 63},  {"PitsF", 744, 64},
    };
    std::string details;
    std::string pitsc_path;
    for (const auto& [name, docs, severe] : expected) {
        auto path = dir / (name + ".csv");
        if (!std::filesystem::exists(path)) throw Skip{"missing " + path.string()};
        std::ifstream in(path, std::ios::binary);
        auto raw = read_raw_documents_csv(in);
        Corpus corpus = build_corpus(raw);
        require(corpus.documents.size() == docs,
                name + ": expected " + std::to_string(docs) + " documents, got " +
                    std::to_string(corpus.documents.size()));
        int severe_pct = static_cast<int>(std::lround(corpus.positive_fraction * 100.0));
        require(std::abs(severe_pct - severe) <= 2,
                name + ": severe% " + std::to_string(severe_pct) + " vs table " +
                    std::to_string(severe));
        details += name + " ok; ";
        if (name == "PitsC") pitsc_path = path.string();
    }

    // full 7-method experiment on PitsC at desk scale
    auto started = std::chrono::steady_clock::now();
    cli::ExperimentConfig config;
    config.datasets = {{"PitsC", pitsc_path}};
    config.repeats = 5;
    config.bins = 5;
    config.seed = 1;
    config.out_dir = (std::filesystem::temp_directory_path() / "frugal_pitsc_out").string();
    config.rig.de_lda_iterations = 50;  // desk-scale tuning fits
    std::ostringstream log;
    int code = cli::cmd_experiment(config, log);
    double seconds = elapsed_seconds(started);
    require(code == 0, "experiment exited non-zero");
    require(seconds < 1800.0, "PitsC experiment took " + fmt(seconds) + " s (limit 1800)");

    auto rankings = rankings_from_csv(
        read_csv_file(std::filesystem::path(config.out_dir) / "rankings.csv"));
    auto rank_of = [&](const std::string& metric, const std::string& method) {
        for (const auto& row : rankings) {
            if (row.dataset == "PitsC" && row.metric == metric && row.method == method)
                return row.rank;
        }
        return -1;
    };
    // directional Figure-5 style observation, reported but not gated
    details += "precision ranks: fft_k10=" + std::to_string(rank_of("precision", "fft_k10")) +
               " ldade_svm=" + std::to_string(rank_of("precision", "ldade_svm")) +
               "; experiment " + fmt(seconds) + " s";
    return details;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        std::string name;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "FFT enumeration (16 trees, exhaustive maximum, <1 s)", fft_enumeration},
        {2, "End-to-end synthetic pipeline (recall/precision >= 0.85, <60 s)", end_to_end_pipeline},
        {3, "TFIDF oracle (<=1e-12 vs two-pass recomputation)", tfidf_oracle_check},
        {4, "Gibbs invariants (count conservation, normalization, determinism)", gibbs_invariants},
        {5, "Metric formulas (100 random confusion matrices, exact)", metric_formulas},
        {6, "Stratification (+-1 per class per bin, full test coverage)", stratification_check},
        {7, "Statistics (a12 exact, null single-rank >=90/100, separation splits)", statistics_check},
        {8, "Runtime ordering (tfidf_svm < fft_k10, ldade_svm > 10x fft_k10)", runtime_ordering},
        {9, "Rule rendering (5 lines, <=4 topics, golden snapshot)", rule_rendering},
        {10, "PITS reproduction (optional, needs PITS_DIR)", pits_reproduction},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            std::string detail = criterion.run();
            std::cout << "[PASS] " << criterion.number << ". " << criterion.name << " -- "
                      << detail << "\n";
        } catch (const Skip& skip) {
            std::cout << "[SKIP] " << criterion.number << ". " << criterion.name << " -- "
                      << skip.reason << "\n";
        } catch (const std::exception& e) {
            std::cout << "[FAIL] " << criterion.number << ". " << criterion.name << " -- "
                      << e.what() << "\n";
            ++failures;
        }
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed (skips excluded)\n";
    return 0;
}
