#include "frugal/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "frugal/rng.hpp"

namespace frugal {

std::vector<RankingRow> compute_rankings(const std::vector<RunRecord>& records, int bootstraps,
                                         double conf, std::uint64_t seed) {
    // (dataset, metric) -> method -> samples
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>> cells;
    for (const auto& r : records) {
        cells[{r.dataset, r.metric}][r.method].push_back(r.value);
    }

    std::vector<RankingRow> rows;
    std::uint64_t stream = 0;
    for (const auto& [key, groups] : cells) {
        Ranking ranking = scott_knott(groups, bootstraps, conf, mix_seed(seed, stream++));
        for (const auto& entry : ranking.entries) {
            rows.push_back({key.first, key.second, entry.rank, entry.method, entry.median,
                            entry.iqr});
        }
    }
    return rows;
}

std::string rankings_to_csv(const std::vector<RankingRow>& rows) {
    std::string out = "dataset,metric,rank,method,median,iqr\n";
    for (const auto& r : rows) {
        out += csv_row({r.dataset, r.metric, std::to_string(r.rank), r.method,
                        format_double(r.median, 6), format_double(r.iqr, 6)});
    }
    return out;
}

std::vector<RankingRow> rankings_from_csv(const CsvTable& table) {
    const std::vector<std::string> expected = {"dataset", "metric", "rank",
                                               "method",  "median", "iqr"};
    if (table.header != expected) throw std::runtime_error("rankings csv: unexpected header");
    std::vector<RankingRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        if (row.size() != expected.size()) throw std::runtime_error("rankings csv: short row");
        rows.push_back({row[0], row[1], std::stoi(row[2]), row[3], std::stod(row[4]),
                        std::stod(row[5])});
    }
    return rows;
}

std::string runtime_cell(double minutes) {
    double bucket = std::ceil(minutes);
    if (bucket < 1.0) bucket = 1.0;
    return "<" + std::to_string(static_cast<long long>(bucket));
}

namespace {

// per (dataset, method) total wall time across cells; each cell carries the
// same runtime on both metric records, so only recall rows are summed
std::map<std::pair<std::string, std::string>, double> runtime_minutes(
    const std::vector<RunRecord>& records) {
    std::map<std::pair<std::string, std::string>, double> totals;
    for (const auto& r : records) {
        if (r.metric != "recall") continue;
        totals[{r.dataset, r.method}] += r.runtime_ms / 60000.0;
    }
    return totals;
}

}  // namespace

std::string markdown_report(const std::vector<RunRecord>& records,
                            const std::vector<RankingRow>& rankings) {
    std::string out = "# Experiment report\n\n";
    out += "Scott-Knott ranks per dataset and metric; rank 0 is the statistically best\n";
    out += "group (groups are split only when a bootstrap test at 95% confidence and an\n";
    out += "A12 effect >= 0.6 both separate them). Medians order and label the groups;\n";
    out += "the split criterion itself uses group means.\n";

    std::set<std::string> datasets;
    std::set<std::string> methods;
    for (const auto& row : rankings) datasets.insert(row.dataset);
    for (const auto& row : rankings) methods.insert(row.method);

    for (const auto& dataset : datasets) {
        for (const std::string metric : {"precision", "recall"}) {
            std::vector<RankingRow> rows;
            for (const auto& row : rankings) {
                if (row.dataset == dataset && row.metric == metric) rows.push_back(row);
            }
            if (rows.empty()) continue;
            std::sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
                if (a.rank != b.rank) return a.rank < b.rank;
                return a.median > b.median;
            });
            out += "\n## " + dataset + " - " + metric + "\n\n";
            out += "| Rank | Method | Median | IQR |\n|---|---|---|---|\n";
            for (const auto& row : rows) {
                out += "| " + std::to_string(row.rank) + " | " + row.method + " | " +
                       format_double(row.median, 3) + " | " + format_double(row.iqr, 3) + " |\n";
            }
        }
    }

    auto totals = runtime_minutes(records);
    if (!totals.empty()) {
        std::set<std::string> runtime_methods;
        std::set<std::string> runtime_datasets;
        for (const auto& [key, _] : totals) {
            runtime_datasets.insert(key.first);
            runtime_methods.insert(key.second);
        }
        out += "\n## Runtimes (minutes)\n\n| Dataset |";
        for (const auto& m : runtime_methods) out += " " + m + " |";
        out += "\n|---|";
        for (std::size_t i = 0; i < runtime_methods.size(); ++i) out += "---|";
        out += "\n";
        for (const auto& dataset : runtime_datasets) {
            out += "| " + dataset + " |";
            for (const auto& m : runtime_methods) {
                auto it = totals.find({dataset, m});
                out += it == totals.end() ? " - |" : " " + runtime_cell(it->second) + " |";
            }
            out += "\n";
        }
    }

    // directional comparisons (reported, not gated): rank wins per dataset
    auto rank_of = [&](const std::string& dataset, const std::string& metric,
                       const std::string& method) -> int {
        for (const auto& row : rankings) {
            if (row.dataset == dataset && row.metric == metric && row.method == method)
                return row.rank;
        }
        return -1;
    };
    std::vector<std::pair<std::string, std::string>> duels = {
        {"fft_k10", "ldade_svm"}, {"fft_k10", "tfidf_svm"}, {"fft_k10", "ldade_fft"}};
    std::string observations;
    for (const std::string metric : {"precision", "recall"}) {
        for (const auto& [left, right] : duels) {
            if (!methods.contains(left) || !methods.contains(right)) continue;
            int wins = 0, losses = 0, ties = 0, compared = 0;
            for (const auto& dataset : datasets) {
                int rl = rank_of(dataset, metric, left);
                int rr = rank_of(dataset, metric, right);
                if (rl < 0 || rr < 0) continue;
                ++compared;
                if (rl < rr) ++wins;
                else if (rl > rr) ++losses;
                else ++ties;
            }
            if (compared == 0) continue;
            observations += "- " + metric + ": " + left + " vs " + right + " - wins " +
                            std::to_string(wins) + ", ties " + std::to_string(ties) +
                            ", losses " + std::to_string(losses) + " of " +
                            std::to_string(compared) + " datasets (by Scott-Knott rank)\n";
        }
    }
    if (!observations.empty()) {
        out += "\n## Observations\n\n" + observations;
    }
    return out;
}

}  // namespace frugal
