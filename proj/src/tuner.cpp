#include "frugal/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "frugal/rng.hpp"
#include "frugal/textio.hpp"

namespace frugal {

std::string trace_to_csv(const std::vector<TuneTraceRow>& trace) {
    std::string out = "generation,candidate,K,alpha,beta,fitness\n";
    for (const auto& row : trace) {
        out += csv_row({std::to_string(row.generation), std::to_string(row.candidate),
                        std::to_string(row.topics), format_double(row.alpha, 6),
                        format_double(row.beta, 6), format_double(row.fitness, 6)});
    }
    return out;
}

namespace {

int clamp_int(double v, int lo, int hi) {
    int r = static_cast<int>(std::lround(v));
    return std::clamp(r, lo, hi);
}

double clamp_real(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

void validate(const DEConfig& cfg) {
    if (cfg.np < 4) throw std::invalid_argument("de: population must be >= 4");
    if (cfg.f <= 0.0 || cfg.f > 2.0) throw std::invalid_argument("de: f must be in (0, 2]");
    if (cfg.cr < 0.0 || cfg.cr > 1.0) throw std::invalid_argument("de: cr must be in [0, 1]");
    if (cfg.generations < 0) throw std::invalid_argument("de: generations must be >= 0");
    if (cfg.k_min > cfg.k_max) throw std::invalid_argument("de: empty K range");
}

}  // namespace

DEResult de_optimize(const DEConfig& cfg, const FitnessFn& fitness) {
    validate(cfg);
    Rng rng(mix_seed(cfg.seed, 0xde0ull));

    const std::size_t np = static_cast<std::size_t>(cfg.np);
    std::vector<Candidate> population(np);
    DEResult result;
    result.trace.reserve(np * static_cast<std::size_t>(cfg.generations + 1));

    for (std::size_t i = 0; i < np; ++i) {
        Candidate& c = population[i];
        c.topics = rng.next_int(cfg.k_min, cfg.k_max);
        c.alpha = rng.next_double(cfg.alpha_min, cfg.alpha_max);
        c.beta = rng.next_double(cfg.beta_min, cfg.beta_max);
        c.fitness = fitness(c);
        ++result.evaluations;
        result.trace.push_back({0, static_cast<int>(i), c.topics, c.alpha, c.beta, c.fitness});
    }

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        for (std::size_t i = 0; i < np; ++i) {
            // three distinct partners, none equal to the target
            std::size_t a, b, c;
            do { a = rng.next_index(np); } while (a == i);
            do { b = rng.next_index(np); } while (b == i || b == a);
            do { c = rng.next_index(np); } while (c == i || c == a || c == b);

            const double mutant[3] = {
                static_cast<double>(population[a].topics) +
                    cfg.f * static_cast<double>(population[b].topics - population[c].topics),
                population[a].alpha + cfg.f * (population[b].alpha - population[c].alpha),
                population[a].beta + cfg.f * (population[b].beta - population[c].beta),
            };
            const double target[3] = {static_cast<double>(population[i].topics),
                                      population[i].alpha, population[i].beta};

            double trial_dims[3];
            const std::size_t forced = rng.next_index(3);
            for (std::size_t dim = 0; dim < 3; ++dim) {
                trial_dims[dim] =
                    (dim == forced || rng.next_double() < cfg.cr) ? mutant[dim] : target[dim];
            }

            Candidate trial;
            trial.topics = clamp_int(trial_dims[0], cfg.k_min, cfg.k_max);
            trial.alpha = clamp_real(trial_dims[1], cfg.alpha_min, cfg.alpha_max);
            trial.beta = clamp_real(trial_dims[2], cfg.beta_min, cfg.beta_max);
            trial.fitness = fitness(trial);
            ++result.evaluations;
            result.trace.push_back({gen, static_cast<int>(i), trial.topics, trial.alpha,
                                    trial.beta, trial.fitness});

            if (trial.fitness > population[i].fitness) population[i] = trial;
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < np; ++i) {
        if (population[i].fitness > population[best].fitness) best = i;
    }
    result.best = population[best];
    return result;
}

TopWordSets topic_top_word_sets(const TopicModel& model, int max_n) {
    const int K = model.config.topics;
    const int V = model.vocab_size;
    const int depth = std::min(max_n, V);

    TopWordSets sets(static_cast<std::size_t>(K));
    std::vector<int> order(static_cast<std::size_t>(V));
    for (int k = 0; k < K; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return model.word_count(k, a) > model.word_count(k, b);
        });
        auto& per_n = sets[static_cast<std::size_t>(k)];
        per_n.resize(static_cast<std::size_t>(max_n));
        std::vector<int> prefix;
        for (int n = 1; n <= max_n; ++n) {
            if (n <= depth) prefix.push_back(order[static_cast<std::size_t>(n - 1)]);
            auto sorted_prefix = prefix;
            std::sort(sorted_prefix.begin(), sorted_prefix.end());
            per_n[static_cast<std::size_t>(n - 1)] = std::move(sorted_prefix);
        }
    }
    return sets;
}

namespace {

int set_overlap(const std::vector<int>& a, const std::vector<int>& b) {
    int count = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) { ++count; ++i; ++j; }
        else if (a[i] < b[j]) ++i;
        else ++j;
    }
    return count;
}

// Pairs topics of two runs greedily by descending overlap and counts matches
// meeting the threshold.
int matched_topics(const TopWordSets& run_a, const TopWordSets& run_b, int n, int threshold) {
    const int K = static_cast<int>(run_a.size());
    std::vector<std::vector<int>> overlap(static_cast<std::size_t>(K),
                                          std::vector<int>(static_cast<std::size_t>(K)));
    for (int a = 0; a < K; ++a) {
        for (int b = 0; b < K; ++b) {
            overlap[a][b] = set_overlap(run_a[static_cast<std::size_t>(a)][static_cast<std::size_t>(n - 1)],
                                        run_b[static_cast<std::size_t>(b)][static_cast<std::size_t>(n - 1)]);
        }
    }
    std::vector<bool> used_a(static_cast<std::size_t>(K), false);
    std::vector<bool> used_b(static_cast<std::size_t>(K), false);
    int matches = 0;
    for (int step = 0; step < K; ++step) {
        int best_a = -1, best_b = -1, best = -1;
        for (int a = 0; a < K; ++a) {
            if (used_a[static_cast<std::size_t>(a)]) continue;
            for (int b = 0; b < K; ++b) {
                if (used_b[static_cast<std::size_t>(b)]) continue;
                if (overlap[a][b] > best) {  // ties keep the lowest (a, b)
                    best = overlap[a][b];
                    best_a = a;
                    best_b = b;
                }
            }
        }
        used_a[static_cast<std::size_t>(best_a)] = true;
        used_b[static_cast<std::size_t>(best_b)] = true;
        if (best >= threshold) ++matches;
    }
    return matches;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double stability_from_runs(const std::vector<TopWordSets>& runs, int topics) {
    if (runs.size() < 2) throw std::invalid_argument("stability: need at least 2 runs");
    double sum_over_n = 0.0;
    for (int n = 1; n <= 9; ++n) {
        const int threshold = static_cast<int>(std::floor(0.9 * n));
        std::vector<double> pair_counts;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            for (std::size_t j = i + 1; j < runs.size(); ++j) {
                pair_counts.push_back(static_cast<double>(matched_topics(runs[i], runs[j], n, threshold)));
            }
        }
        sum_over_n += median_of(std::move(pair_counts));
    }
    const double mean_over_n = sum_over_n / 9.0;
    return mean_over_n * 9.0 / static_cast<double>(topics);
}

double stability_score(const Corpus& corpus, const Candidate& candidate, int runs,
                       std::uint64_t seed, int lda_iterations, long long* lda_fit_counter) {
    if (runs < 2) throw std::invalid_argument("stability: need at least 2 runs");
    if (candidate.topics > corpus.vocabulary.size())
        throw std::invalid_argument("stability: more topics than vocabulary terms");

    std::vector<TopWordSets> run_sets;
    run_sets.reserve(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r) {
        const std::uint64_t run_seed = mix_seed(seed, static_cast<std::uint64_t>(r));
        // shuffled document order: the instability LDADE guards against
        std::vector<int> order(corpus.documents.size());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(mix_seed(run_seed, 0x0d0cull));
        shuffle(order, rng);

        Corpus shuffled;
        shuffled.vocabulary = corpus.vocabulary;
        shuffled.positive_class = corpus.positive_class;
        shuffled.positive_fraction = corpus.positive_fraction;
        shuffled.documents.reserve(order.size());
        for (int idx : order) shuffled.documents.push_back(corpus.documents[static_cast<std::size_t>(idx)]);

        LdaConfig cfg;
        cfg.topics = candidate.topics;
        cfg.alpha = candidate.alpha;
        cfg.beta = candidate.beta;
        cfg.iterations = lda_iterations;
        cfg.seed = run_seed;
        TopicModel model = lda_fit(shuffled, cfg);
        if (lda_fit_counter) ++*lda_fit_counter;
        run_sets.push_back(topic_top_word_sets(model));
    }
    return stability_from_runs(run_sets, candidate.topics);
}

FitnessFn make_stability_fitness(const Corpus& corpus, int runs, std::uint64_t seed,
                                 int lda_iterations, long long* lda_fit_counter) {
    return [&corpus, runs, seed, lda_iterations, lda_fit_counter](const Candidate& c) {
        return stability_score(corpus, c, runs, mix_seed(seed, static_cast<std::uint64_t>(c.topics)),
                               lda_iterations, lda_fit_counter);
    };
}

}  // namespace frugal
