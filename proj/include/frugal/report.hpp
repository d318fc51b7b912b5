#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frugal/evalrig.hpp"
#include "frugal/stats.hpp"
#include "frugal/textio.hpp"

namespace frugal {

struct RankingRow {
    std::string dataset;
    std::string metric;
    int rank = 0;
    std::string method;
    double median = 0.0;
    double iqr = 0.0;
};

// Scott-Knott per (dataset, metric) over the run records.
std::vector<RankingRow> compute_rankings(const std::vector<RunRecord>& records,
                                         int bootstraps = 1000, double conf = 0.95,
                                         std::uint64_t seed = 1);

// dataset,metric,rank,method,median,iqr
std::string rankings_to_csv(const std::vector<RankingRow>& rows);
std::vector<RankingRow> rankings_from_csv(const CsvTable& table);

// "<N" minute bucket, never below "<1"
std::string runtime_cell(double minutes);

// Markdown report: one median/IQR table per (dataset, metric) shaded by rank
// column, a per-method runtime table in minutes, and directional observations.
// Everything is derived from the two CSVs so it can be rebuilt offline.
std::string markdown_report(const std::vector<RunRecord>& records,
                            const std::vector<RankingRow>& rankings);

}  // namespace frugal
