#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "frugal/evalrig.hpp"
#include "frugal/rng.hpp"
#include "helpers.hpp"

using namespace frugal;

TEST_SUITE_BEGIN("evalrig");

namespace {

RigConfig fast_rig() {
    RigConfig rig;
    rig.lda_iterations = 20;
    rig.fold_in_iterations = 20;
    rig.svm_epochs = 30;
    rig.de.np = 4;
    rig.de.generations = 1;
    rig.de.stability_runs = 2;
    rig.de.k_min = 2;
    rig.de.k_max = 6;
    rig.de_lda_iterations = 10;
    rig.threads = 2;
    return rig;
}

}  // namespace

TEST_CASE("stratified folds deal evenly with exact divisibility") {
    std::vector<bool> labels = {true, true, true, true, true, false, false, false, false, false};
    FoldPlan plan = stratified_folds(labels, 1, 5, 1);
    std::map<int, int> true_count, false_count;
    for (std::size_t d = 0; d < labels.size(); ++d) {
        (labels[d] ? true_count : false_count)[plan.assignment[0][d]]++;
    }
    for (int b = 0; b < 5; ++b) {
        CHECK(true_count[b] == 1);
        CHECK(false_count[b] == 1);
    }
}

TEST_CASE("stratified folds stay within one of perfect proportion") {
    std::vector<bool> labels;
    for (int i = 0; i < 6; ++i) labels.push_back(true);
    for (int i = 0; i < 5; ++i) labels.push_back(false);
    FoldPlan plan = stratified_folds(labels, 1, 5, 3);
    std::map<int, int> sizes, trues;
    for (std::size_t d = 0; d < labels.size(); ++d) {
        sizes[plan.assignment[0][d]]++;
        if (labels[d]) trues[plan.assignment[0][d]]++;
    }
    int min_size = 999, max_size = 0;
    for (int b = 0; b < 5; ++b) {
        min_size = std::min(min_size, sizes[b]);
        max_size = std::max(max_size, sizes[b]);
        CHECK(trues[b] >= 1);
        CHECK(trues[b] <= 2);
    }
    CHECK(max_size - min_size <= 1);
}

TEST_CASE("five repeats give distinct assignments with identical marginals") {
    std::vector<bool> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i % 3 == 0);
    FoldPlan plan = stratified_folds(labels, 5, 5, 7);
    std::set<std::vector<int>> distinct(plan.assignment.begin(), plan.assignment.end());
    CHECK(distinct.size() == 5);
    for (int r = 0; r < 5; ++r) {
        std::map<int, int> trues;
        for (std::size_t d = 0; d < labels.size(); ++d) {
            if (labels[d]) trues[plan.assignment[static_cast<std::size_t>(r)][d]]++;
        }
        for (int b = 0; b < 5; ++b)

            CHECK(std::abs(trues[b] - 14.0 / 5.0) <= 1.0);
    }
}

TEST_CASE("every document tests exactly once per repeat") {
    std::vector<bool> labels;
    for (int i = 0; i < 33; ++i) labels.push_back(i % 2 == 0);
    FoldPlan plan = stratified_folds(labels, 3, 5, 11);
    for (int r = 0; r < 3; ++r) {
        for (std::size_t d = 0; d < labels.size(); ++d) {
            int bin = plan.assignment[static_cast<std::size_t>(r)][d];
            CHECK(bin >= 0);
            CHECK(bin < 5);
        }
    }
}

TEST_CASE("stratification refuses classes smaller than the bin count") {
    std::vector<bool> labels = {true, true, false, false, false, false, false};
    CHECK_THROWS_WITH_AS(stratified_folds(labels, 1, 5, 1),
                         "cannot stratify: a class has fewer members than bins",
                         std::invalid_argument);
}

TEST_CASE("metrics formulas and the zero-denominator convention") {
    CHECK(metrics({.tp = 0, .fp = 0, .tn = 5, .fn = 0}).recall == 0.0);
    CHECK(metrics({.tp = 3, .fp = 0, .tn = 0, .fn = 1}).recall == doctest::Approx(0.75));
    CHECK(metrics({.tp = 3, .fp = 3, .tn = 0, .fn = 0}).precision == doctest::Approx(0.5));
    CHECK(metrics({.tp = 0, .fp = 0, .tn = 1, .fn = 2}).precision == 0.0);

    Rng rng(15);
    for (int i = 0; i < 100; ++i) {
        ConfusionMatrix cm{.tp = static_cast<long long>(rng.next_index(50)),
                           .fp = static_cast<long long>(rng.next_index(50)),
                           .tn = static_cast<long long>(rng.next_index(50)),
                           .fn = static_cast<long long>(rng.next_index(50))};
        Metrics m = metrics(cm);
        double expected_p = cm.tp + cm.fp > 0 ? double(cm.tp) / double(cm.tp + cm.fp) : 0.0;
        double expected_r = cm.tp + cm.fn > 0 ? double(cm.tp) / double(cm.tp + cm.fn) : 0.0;
        CHECK(m.precision == expected_p);
        CHECK(m.recall == expected_r);
    }
}

TEST_CASE("records csv round-trip") {
    std::vector<RunRecord> records = {
        {"ds", "tfidf_svm", 0, 1, "precision", 0.75, 12.5},
        {"ds", "tfidf_svm", 0, 1, "recall", 0.5, 12.5},
    };
    std::string csv = records_to_csv(records);
    std::istringstream in(csv);
    auto back = records_from_csv(read_csv(in));
    REQUIRE(back.size() == 2);
    CHECK(back[0].method == "tfidf_svm");
    CHECK(back[0].value == doctest::Approx(0.75));
    CHECK(back[1].metric == "recall");
}

TEST_CASE("run_matrix record counting") {
    Corpus corpus = testutil::synthetic_corpus(40, 31);
    std::vector<bool> labels;
    for (const auto& d : corpus.documents) labels.push_back(d.label);
    FoldPlan plan = stratified_folds(labels, 2, 4, 5);
    RigConfig rig = fast_rig();
    auto result = run_matrix(corpus, "syn", {MethodKind::tfidf_svm}, plan, rig);
    CHECK(result.records.size() == 2u * 4u * 2u);  // repeats * bins * metrics
    CHECK(result.warnings.empty());
    for (const auto& r : result.records) {
        CHECK(r.value >= 0.0);
        CHECK(r.value <= 1.0);
        CHECK(r.runtime_ms >= 0.0);
    }
}

TEST_CASE("rerun is bit-identical except runtime") {
    Corpus corpus = testutil::synthetic_corpus(40, 32);
    std::vector<bool> labels;
    for (const auto& d : corpus.documents) labels.push_back(d.label);
    FoldPlan plan = stratified_folds(labels, 1, 4, 5);
    RigConfig rig = fast_rig();
    auto a = run_matrix(corpus, "syn", {MethodKind::fft_k10}, plan, rig);
    auto b = run_matrix(corpus, "syn", {MethodKind::fft_k10}, plan, rig);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].dataset == b.records[i].dataset);
        CHECK(a.records[i].method == b.records[i].method);
        CHECK(a.records[i].repeat == b.records[i].repeat);
        CHECK(a.records[i].fold == b.records[i].fold);
        CHECK(a.records[i].metric == b.records[i].metric);
        CHECK(a.records[i].value == b.records[i].value);
    }
}

TEST_CASE("a method's records do not depend on which other methods run") {
    Corpus corpus = testutil::synthetic_corpus(40, 38);
    std::vector<bool> labels;
    for (const auto& d : corpus.documents) labels.push_back(d.label);
    FoldPlan plan = stratified_folds(labels, 1, 4, 9);
    RigConfig rig = fast_rig();

    auto alone = run_matrix(corpus, "syn", {MethodKind::fft_k10}, plan, rig);
    auto paired = run_matrix(corpus, "syn", {MethodKind::tfidf_svm, MethodKind::fft_k10}, plan, rig);
    std::vector<RunRecord> fft_only;
    for (const auto& r : paired.records) {
        if (r.method == "fft_k10") fft_only.push_back(r);
    }
    REQUIRE(alone.records.size() == fft_only.size());
    for (std::size_t i = 0; i < fft_only.size(); ++i) {
        CHECK(alone.records[i].value == fft_only[i].value);
        CHECK(alone.records[i].metric == fft_only[i].metric);
    }
}

TEST_CASE("degenerate training folds are skipped with a warning") {
    Corpus corpus = testutil::synthetic_corpus(12, 33);
    // hand-built plan: bin 0 holds every positive document
    FoldPlan plan;
    plan.repeats = 1;
    plan.bins = 3;
    plan.assignment.resize(1);
    plan.assignment[0].resize(corpus.documents.size());
    int negative_cursor = 0;
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
        if (corpus.documents[d].label) plan.assignment[0][d] = 0;
        else plan.assignment[0][d] = 1 + (negative_cursor++ % 2);
    }
    RigConfig rig = fast_rig();
    auto result = run_matrix(corpus, "syn", {MethodKind::tfidf_svm}, plan, rig);
    // folds 1 and 2 train without negatives? no: fold 1 trains on bins {0,2} (mixed);
    // fold 0 trains on bins {1,2} which hold no positives -> skipped
    CHECK(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("degenerate") != std::string::npos);
    CHECK(result.records.size() == 2u * 2u);
}

TEST_CASE("perturbing held-out documents never changes fitted parameters") {
    auto raw = testutil::synthetic_raw_docs(30, 34);
    auto perturbed = raw;
    std::vector<int> train_docs, test_docs;
    for (int i = 0; i < 30; ++i) (i < 20 ? train_docs : test_docs).push_back(i);
    for (int i : test_docs) {
        perturbed[static_cast<std::size_t>(i)].text = "unrelated brandnew wording nr" +
                                                      std::to_string(i) + " flux";
    }
    Corpus base = build_corpus(raw);
    Corpus variant = build_corpus(perturbed);
    RigConfig rig = fast_rig();

    for (MethodKind kind : {MethodKind::tfidf_svm, MethodKind::fft_k10}) {
        TrainedCell a = train_method_cell(base, kind, train_docs, {}, rig, 99);
        TrainedCell b = train_method_cell(variant, kind, train_docs, {}, rig, 99);
        CHECK(a.params_json() == b.params_json());
    }
}

TEST_CASE("tuned methods run with a validation bin and record the winner") {
    Corpus corpus = testutil::synthetic_corpus(40, 35);
    std::vector<int> train_docs, validation_docs;
    for (int i = 0; i < 30; ++i) train_docs.push_back(i);
    for (int i = 30; i < 40; ++i) validation_docs.push_back(i);
    RigConfig rig = fast_rig();

    TrainedCell cell = train_method_cell(corpus, MethodKind::ldade_fft, train_docs,
                                         validation_docs, rig, 7);
    REQUIRE(cell.tuned.has_value());
    CHECK(cell.tuned->topics >= rig.de.k_min);
    CHECK(cell.tuned->topics <= rig.de.k_max);
    CHECK(cell.tree.has_value());

    CHECK_THROWS_AS(
        train_method_cell(corpus, MethodKind::ldade_svm, train_docs, {}, rig, 7),
        std::invalid_argument);
}

TEST_CASE("classification fitness mode trains against the validation bin") {
    Corpus corpus = testutil::synthetic_corpus(40, 36);
    std::vector<int> train_docs, validation_docs;
    for (int i = 0; i < 30; ++i) train_docs.push_back(i);
    for (int i = 30; i < 40; ++i) validation_docs.push_back(i);
    RigConfig rig = fast_rig();
    rig.de_fitness = RigConfig::DeFitness::classification;
    rig.de.np = 4;
    rig.de.generations = 0;

    TrainedCell cell = train_method_cell(corpus, MethodKind::ldade_svm, train_docs,
                                         validation_docs, rig, 8);
    REQUIRE(cell.tuned.has_value());
    CHECK(cell.linear.has_value());
    CHECK(cell.tuned->fitness >= 0.0);
    CHECK(cell.tuned->fitness <= 1.0);
}

TEST_CASE("tuning trace is exposed when requested") {
    Corpus corpus = testutil::synthetic_corpus(30, 37);
    std::vector<bool> labels;
    for (const auto& d : corpus.documents) labels.push_back(d.label);
    FoldPlan plan = stratified_folds(labels, 1, 3, 2);
    RigConfig rig = fast_rig();
    rig.keep_tuning_traces = true;
    auto result = run_matrix(corpus, "syn", {MethodKind::ldade_svm}, plan, rig);
    CHECK(result.tuning_traces.size() == 3);  // one per fold
    for (const auto& [key, csv] : result.tuning_traces) {
        CHECK(key.find("ldade_svm") == 0);
        CHECK(csv.rfind("generation,candidate,K,alpha,beta,fitness\n", 0) == 0);
    }
}

TEST_SUITE_END();
