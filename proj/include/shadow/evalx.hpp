#pragma once
// Detection-vs-ground-truth evaluation: one-to-one matching, extraction and
// false-positive rates, and size/aspect distribution histograms.

#include <optional>
#include <string>
#include <vector>

#include "shadow/measure.hpp"
#include "shadow/synth.hpp"

namespace shadow::evalx {

struct MatchPair {
    size_t gt_id;        // index into the ground-truth list
    size_t pred_index;   // index into the prediction list
    double centroid_distance;
};

struct MatchResult {
    std::vector<MatchPair> pairs;
    std::vector<size_t> unmatched_gt;
    std::vector<size_t> unmatched_pred;
};

struct Histogram {
    double lo = 0;
    double bin_width = 1;
    std::vector<long> counts;
    std::vector<double> densities;  // sum(density * bin_width) == 1 for non-empty input
};

struct EvalReport {
    std::optional<double> extraction_rate;  // empty when there is no ground truth
    double false_positive_rate = 0;
    Histogram size_hist;    // over predicted r_eq
    Histogram aspect_hist;  // over predicted aspect, bin width 0.1
    size_t n_gt = 0, n_pred = 0;
};

struct MatchGates {
    double centroid_floor = 2.0;   // centroid gate: max(floor, r_gt)
    double radius_floor = 2.0;     // radius gate: max(floor, radius_frac * r_gt)
    double radius_frac = 0.5;
};

/// Greedy one-to-one matching in ascending centroid distance, ties broken by
/// (gt id, prediction index); a candidate pair must pass both gates.
MatchResult match_regions(const std::vector<measure::Region>& pred,
                          const std::vector<synth::BubbleSpec>& gt,
                          const MatchGates& gates = {});

Histogram make_histogram(const std::vector<double>& values, double bin_width, double lo = 0.0);

EvalReport compute_metrics(const MatchResult& m, const std::vector<measure::Region>& pred,
                           const std::vector<synth::BubbleSpec>& gt, double size_bin_width = 1.0);

struct ComparisonRow {
    double bin_lo, bin_hi;
    double density_a, density_b, difference;
};

struct ComparisonTable {
    double extraction_a = 0, extraction_b = 0;
    double fp_a = 0, fp_b = 0;
    std::vector<ComparisonRow> size_rows;
    std::vector<ComparisonRow> aspect_rows;
    int better_report = 0;  // 0 if a has the higher extraction rate, else 1
};

/// Side-by-side rates and per-bin density differences; bin widths must agree.
ComparisonTable compare_methods(const EvalReport& a, const EvalReport& b);

/// Accumulates per-image match results into one dataset-level report.
class Aggregate {
public:
    void add(const MatchResult& m, const std::vector<measure::Region>& pred,
             const std::vector<synth::BubbleSpec>& gt);
    EvalReport finalize(double size_bin_width = 1.0) const;

private:
    size_t n_gt_ = 0, n_matched_ = 0, n_pred_ = 0, n_fp_ = 0;
    std::vector<double> sizes_, aspects_;
};

void write_report_csv(const EvalReport& report, const std::string& path);
EvalReport read_report_csv(const std::string& path);
void write_comparison_csv(const ComparisonTable& table, const std::string& path);

}  // namespace shadow::evalx
