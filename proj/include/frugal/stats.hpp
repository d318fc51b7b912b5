#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace frugal {

// Vargha-Delaney effect size: P(x > y) + 0.5*P(x = y) over all pairs.
double a12(std::span<const double> x, std::span<const double> y);

double median(std::span<const double> values);
double iqr(std::span<const double> values);  // 75th - 25th percentile

// True when a seeded bootstrap test on the mean difference rejects equality
// at `conf` AND the A12 effect in either direction reaches 0.6.
bool significant_split(std::span<const double> left, std::span<const double> right,
                       int bootstraps, double conf, std::uint64_t seed);

struct RankingEntry {
    int rank = 0;  // contiguous from 0, best median first
    std::string method;
    double median = 0.0;
    double iqr = 0.0;
};

struct Ranking {
    std::vector<RankingEntry> entries;  // ordered by rank, then median desc
    int group_count() const {
        int max_rank = -1;
        for (const auto& e : entries) max_rank = std::max(max_rank, e.rank);
        return max_rank + 1;
    }
};

// Scott-Knott clustering: methods are ordered by median (best first), the
// split maximizing the between-group sum of squares of means is taken, and
// each side is recursed only while significant_split passes.
Ranking scott_knott(const std::map<std::string, std::vector<double>>& groups,
                    int bootstraps = 1000, double conf = 0.95, std::uint64_t seed = 1);

}  // namespace frugal
