#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "frugal/corpus.hpp"
#include "frugal/features.hpp"

namespace frugal {

struct DEConfig {
    int np = 10;              // population size, >= 4
    double f = 0.7;           // differential weight
    double cr = 0.3;          // crossover probability
    int generations = 3;
    int k_min = 10, k_max = 100;
    double alpha_min = 1e-3, alpha_max = 1.0;
    double beta_min = 1e-3, beta_max = 1.0;
    int stability_runs = 5;   // m
    std::uint64_t seed = 1;
};

struct Candidate {
    int topics = 10;
    double alpha = 0.1;
    double beta = 0.1;
    double fitness = 0.0;
};

struct TuneTraceRow {
    int generation = 0;  // 0 = initial population
    int candidate = 0;
    int topics = 0;
    double alpha = 0.0, beta = 0.0, fitness = 0.0;
};

// generation,candidate,K,alpha,beta,fitness
std::string trace_to_csv(const std::vector<TuneTraceRow>& trace);

struct DEResult {
    Candidate best;
    std::vector<TuneTraceRow> trace;
    int evaluations = 0;  // np * (generations + 1)
};

using FitnessFn = std::function<double(const Candidate&)>;

// DE/rand/1/bin with bound clamping (K rounds to the nearest integer); a
// trial replaces its target only on strict fitness improvement.
DEResult de_optimize(const DEConfig& cfg, const FitnessFn& fitness);

// Per-run top word sets for the stability score: element [k][n-1] is the
// id set of the n highest-count words of topic k (n = 1..max_n).
using TopWordSets = std::vector<std::vector<std::vector<int>>>;

TopWordSets topic_top_word_sets(const TopicModel& model, int max_n = 9);

// Topic-stability score in [0, 9]: for n = 1..9, topics of each run pair are
// greedily matched by top-n word overlap, topics with overlap >= floor(0.9n)
// are counted, the median count over pairs is taken, and the mean over n is
// scaled by 9/K.
double stability_from_runs(const std::vector<TopWordSets>& runs, int topics);

// Fits LDA `runs` times on document orders shuffled by derived seeds, then
// scores the stability of the resulting topics. The optional counter tracks
// how many LDA fits were performed.
double stability_score(const Corpus& corpus, const Candidate& candidate, int runs,
                       std::uint64_t seed, int lda_iterations = 200,
                       long long* lda_fit_counter = nullptr);

// Fitness hook maximizing topic stability; the default LDADE objective.
FitnessFn make_stability_fitness(const Corpus& corpus, int runs, std::uint64_t seed,
                                 int lda_iterations = 200, long long* lda_fit_counter = nullptr);

}  // namespace frugal
