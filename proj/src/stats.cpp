#include "frugal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "frugal/rng.hpp"

namespace frugal {

double a12(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("a12: empty sample");
    long long greater = 0, equal = 0;
    for (double xi : x) {
        for (double yj : y) {
            if (xi > yj) ++greater;
            else if (xi == yj) ++equal;
        }
    }
    return (static_cast<double>(greater) + 0.5 * static_cast<double>(equal)) /
           (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

namespace {

double percentile(std::vector<double> sorted_copy, double q) {
    std::sort(sorted_copy.begin(), sorted_copy.end());
    const std::size_t n = sorted_copy.size();
    if (n == 1) return sorted_copy[0];
    double pos = q * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted_copy[n - 1];
    return sorted_copy[lo] * (1.0 - frac) + sorted_copy[lo + 1] * frac;
}

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double median(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty sample");
    return percentile(std::vector<double>(values.begin(), values.end()), 0.5);
}

double iqr(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("iqr: empty sample");
    std::vector<double> copy(values.begin(), values.end());
    return percentile(copy, 0.75) - percentile(copy, 0.25);
}

bool significant_split(std::span<const double> left, std::span<const double> right,
                       int bootstraps, double conf, std::uint64_t seed) {
    if (left.empty() || right.empty()) throw std::invalid_argument("significant_split: empty sample");

    double effect = std::max(a12(left, right), a12(right, left));
    if (effect < 0.6) return false;

    // bootstrap hypothesis test on the mean difference: both samples are
    // recentered onto the pooled mean, then resampled under that null
    const double mean_l = mean(left);
    const double mean_r = mean(right);
    const double observed = std::fabs(mean_l - mean_r);

    double pooled = 0.0;
    for (double v : left) pooled += v;
    for (double v : right) pooled += v;
    pooled /= static_cast<double>(left.size() + right.size());

    std::vector<double> null_l(left.begin(), left.end());
    std::vector<double> null_r(right.begin(), right.end());
    for (double& v : null_l) v += pooled - mean_l;
    for (double& v : null_r) v += pooled - mean_r;

    Rng rng(seed);
    int at_least_as_large = 0;
    for (int b = 0; b < bootstraps; ++b) {
        double sum_l = 0.0, sum_r = 0.0;
        for (std::size_t i = 0; i < null_l.size(); ++i)
            sum_l += null_l[rng.next_index(null_l.size())];
        for (std::size_t i = 0; i < null_r.size(); ++i)
            sum_r += null_r[rng.next_index(null_r.size())];
        double diff = std::fabs(sum_l / static_cast<double>(null_l.size()) -
                                sum_r / static_cast<double>(null_r.size()));
        if (diff >= observed) ++at_least_as_large;
    }
    double p = static_cast<double>(at_least_as_large) / static_cast<double>(bootstraps);
    return p < 1.0 - conf;
}

namespace {

struct MethodSamples {
    std::string name;
    std::vector<double> samples;
    double med;
};

// between-group sum of squares of the best contiguous split of a
// median-sorted sequence of groups; sizes gives samples per group
double best_split_ss(const std::vector<std::vector<double>>& groups, std::size_t* split_out) {
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> medians(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i)
        medians[i] = median(groups[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return medians[a] > medians[b]; });

    double total = 0.0;
    std::size_t count = 0;
    for (const auto& g : groups) {
        for (double v : g) total += v;
        count += g.size();
    }
    const double grand = total / static_cast<double>(count);

    double best = -1.0;
    std::size_t best_split = 1;
    double sum_l = 0.0;
    std::size_t n_l = 0;
    for (std::size_t split = 1; split < groups.size(); ++split) {
        const auto& g = groups[order[split - 1]];
        for (double v : g) sum_l += v;
        n_l += g.size();
        const double mean_l = sum_l / static_cast<double>(n_l);
        const double mean_r = (total - sum_l) / static_cast<double>(count - n_l);
        const double ss =
            static_cast<double>(n_l) * (mean_l - grand) * (mean_l - grand) +
            static_cast<double>(count - n_l) * (mean_r - grand) * (mean_r - grand);
        if (ss > best) {
            best = ss;
            best_split = split;
        }
    }
    if (split_out) *split_out = best_split;
    return best;
}

// The max-SS split is a maximized statistic, so its size is checked against a
// permutation null (samples reshuffled across the segment's methods, the whole
// sort-and-split procedure re-run) on top of the left/right significance test.
bool split_beats_permutation(const std::vector<MethodSamples>& methods, std::size_t begin,
                             std::size_t end, double observed_ss, int permutations, double conf,
                             std::uint64_t seed) {
    std::vector<double> pool;
    std::vector<std::size_t> sizes;
    for (std::size_t i = begin; i < end; ++i) {
        pool.insert(pool.end(), methods[i].samples.begin(), methods[i].samples.end());
        sizes.push_back(methods[i].samples.size());
    }
    Rng rng(seed);
    int at_least_as_large = 0;
    std::vector<std::vector<double>> regrouped(sizes.size());
    for (int p = 0; p < permutations; ++p) {
        shuffle(pool, rng);
        std::size_t cursor = 0;
        for (std::size_t g = 0; g < sizes.size(); ++g) {
            regrouped[g].assign(pool.begin() + static_cast<std::ptrdiff_t>(cursor),
                                pool.begin() + static_cast<std::ptrdiff_t>(cursor + sizes[g]));
            cursor += sizes[g];
        }
        if (best_split_ss(regrouped, nullptr) >= observed_ss) ++at_least_as_large;
    }
    double pvalue = static_cast<double>(at_least_as_large) / static_cast<double>(permutations);
    return pvalue < 1.0 - conf;
}

void rank_segment(const std::vector<MethodSamples>& methods, std::size_t begin, std::size_t end,
                  int bootstraps, double conf, std::uint64_t seed, int& next_rank,
                  std::vector<int>& ranks) {
    if (end - begin <= 1) {
        ranks[begin] = next_rank++;
        return;
    }

    std::vector<std::vector<double>> segment;
    for (std::size_t i = begin; i < end; ++i) segment.push_back(methods[i].samples);
    std::size_t split_offset = 1;
    const double observed_ss = best_split_ss(segment, &split_offset);
    const std::size_t best_split = begin + split_offset;

    std::vector<double> left_pool, right_pool;
    for (std::size_t i = begin; i < best_split; ++i)
        left_pool.insert(left_pool.end(), methods[i].samples.begin(), methods[i].samples.end());
    for (std::size_t i = best_split; i < end; ++i)
        right_pool.insert(right_pool.end(), methods[i].samples.begin(), methods[i].samples.end());

    if (significant_split(left_pool, right_pool, bootstraps, conf,
                          mix_seed(seed, begin, best_split)) &&
        split_beats_permutation(methods, begin, end, observed_ss, bootstraps, conf,
                                mix_seed(seed, end, best_split))) {
        rank_segment(methods, begin, best_split, bootstraps, conf, seed, next_rank, ranks);
        rank_segment(methods, best_split, end, bootstraps, conf, seed, next_rank, ranks);
    } else {
        int rank = next_rank++;
        for (std::size_t i = begin; i < end; ++i) ranks[i] = rank;
    }
}

}  // namespace

Ranking scott_knott(const std::map<std::string, std::vector<double>>& groups, int bootstraps,
                    double conf, std::uint64_t seed) {
    if (groups.empty()) return {};

    std::vector<MethodSamples> methods;
    methods.reserve(groups.size());
    for (const auto& [name, samples] : groups) {
        if (samples.empty()) throw std::invalid_argument("scott_knott: empty sample for " + name);
        methods.push_back({name, samples, median(samples)});
    }
    // best median first; name as the deterministic tie-break
    std::sort(methods.begin(), methods.end(), [](const MethodSamples& a, const MethodSamples& b) {
        if (a.med != b.med) return a.med > b.med;
        return a.name < b.name;
    });

    std::vector<int> ranks(methods.size(), 0);
    int next_rank = 0;
    rank_segment(methods, 0, methods.size(), bootstraps, conf, seed, next_rank, ranks);

    Ranking ranking;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        ranking.entries.push_back(
            {ranks[i], methods[i].name, methods[i].med, iqr(methods[i].samples)});
    }
    return ranking;
}

}  // namespace frugal
