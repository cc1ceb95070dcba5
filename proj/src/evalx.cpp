#include "shadow/evalx.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace shadow::evalx {

MatchResult match_regions(const std::vector<measure::Region>& pred,
                          const std::vector<synth::BubbleSpec>& gt, const MatchGates& gates) {
    struct Candidate {
        double dist;
        size_t gi, pi;
    };
    std::vector<Candidate> candidates;
    for (size_t gi = 0; gi < gt.size(); ++gi) {
        double r = gt[gi].r_eq;
        double cgate = std::max(gates.centroid_floor, r);
        double rgate = std::max(gates.radius_floor, gates.radius_frac * r);
        for (size_t pi = 0; pi < pred.size(); ++pi) {
            double d = std::hypot(pred[pi].cx - gt[gi].cx, pred[pi].cy - gt[gi].cy);
            if (d <= cgate && std::abs(pred[pi].r_eq - r) <= rgate)
                candidates.push_back({d, gi, pi});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.gi != b.gi) return a.gi < b.gi;
        return a.pi < b.pi;
    });

    MatchResult out;
    std::vector<uint8_t> gt_used(gt.size(), 0), pred_used(pred.size(), 0);
    for (const auto& c : candidates) {
        if (gt_used[c.gi] || pred_used[c.pi]) continue;
        gt_used[c.gi] = pred_used[c.pi] = 1;
        out.pairs.push_back({c.gi, c.pi, c.dist});
    }
    for (size_t gi = 0; gi < gt.size(); ++gi)
        if (!gt_used[gi]) out.unmatched_gt.push_back(gi);
    for (size_t pi = 0; pi < pred.size(); ++pi)
        if (!pred_used[pi]) out.unmatched_pred.push_back(pi);
    return out;
}

Histogram make_histogram(const std::vector<double>& values, double bin_width, double lo) {
    if (!(bin_width > 0)) throw ConfigError("histogram: bin_width must be > 0");
    Histogram h;
    h.lo = lo;
    h.bin_width = bin_width;
    for (double v : values) {
        long k = static_cast<long>(std::floor((v - lo) / bin_width));
        if (k < 0) k = 0;
        if (static_cast<size_t>(k) >= h.counts.size()) h.counts.resize(k + 1, 0);
        ++h.counts[k];
    }
    h.densities.resize(h.counts.size(), 0.0);
    if (!values.empty())
        for (size_t i = 0; i < h.counts.size(); ++i)
            h.densities[i] = static_cast<double>(h.counts[i]) /
                             (static_cast<double>(values.size()) * bin_width);
    return h;
}

EvalReport compute_metrics(const MatchResult& m, const std::vector<measure::Region>& pred,
                           const std::vector<synth::BubbleSpec>& gt, double size_bin_width) {
    EvalReport r;
    r.n_gt = gt.size();
    r.n_pred = pred.size();
    if (!gt.empty())
        r.extraction_rate = static_cast<double>(m.pairs.size()) / static_cast<double>(gt.size());
    r.false_positive_rate = pred.empty() ? 0.0
                                         : static_cast<double>(m.unmatched_pred.size()) /
                                               static_cast<double>(pred.size());
    std::vector<double> sizes, aspects;
    sizes.reserve(pred.size());
    aspects.reserve(pred.size());
    for (const auto& p : pred) {
        sizes.push_back(p.r_eq);
        aspects.push_back(p.aspect);
    }
    r.size_hist = make_histogram(sizes, size_bin_width);
    r.aspect_hist = make_histogram(aspects, 0.1, 1.0);
    return r;
}

namespace {
std::vector<ComparisonRow> diff_rows(const Histogram& a, const Histogram& b) {
    if (a.bin_width != b.bin_width || a.lo != b.lo)
        throw ContractError("compare_methods: histogram binning mismatch");
    size_t n = std::max(a.densities.size(), b.densities.size());
    std::vector<ComparisonRow> rows;
    rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        double da = i < a.densities.size() ? a.densities[i] : 0.0;
        double db = i < b.densities.size() ? b.densities[i] : 0.0;
        rows.push_back({a.lo + i * a.bin_width, a.lo + (i + 1) * a.bin_width, da, db, da - db});
    }
    return rows;
}
}  // namespace

ComparisonTable compare_methods(const EvalReport& a, const EvalReport& b) {
    ComparisonTable t;
    t.extraction_a = a.extraction_rate.value_or(0.0);
    t.extraction_b = b.extraction_rate.value_or(0.0);
    t.fp_a = a.false_positive_rate;
    t.fp_b = b.false_positive_rate;
    t.size_rows = diff_rows(a.size_hist, b.size_hist);
    t.aspect_rows = diff_rows(a.aspect_hist, b.aspect_hist);
    t.better_report = t.extraction_a >= t.extraction_b ? 0 : 1;
    return t;
}

void Aggregate::add(const MatchResult& m, const std::vector<measure::Region>& pred,
                    const std::vector<synth::BubbleSpec>& gt) {
    n_gt_ += gt.size();
    n_matched_ += m.pairs.size();
    n_pred_ += pred.size();
    n_fp_ += m.unmatched_pred.size();
    for (const auto& p : pred) {
        sizes_.push_back(p.r_eq);
        aspects_.push_back(p.aspect);
    }
}

EvalReport Aggregate::finalize(double size_bin_width) const {
    EvalReport r;
    r.n_gt = n_gt_;
    r.n_pred = n_pred_;
    if (n_gt_ > 0) r.extraction_rate = static_cast<double>(n_matched_) / static_cast<double>(n_gt_);
    r.false_positive_rate =
        n_pred_ ? static_cast<double>(n_fp_) / static_cast<double>(n_pred_) : 0.0;
    r.size_hist = make_histogram(sizes_, size_bin_width);
    r.aspect_hist = make_histogram(aspects_, 0.1, 1.0);
    return r;
}

namespace {
void write_hist_rows(std::ostream& out, const char* name, const Histogram& h) {
    char buf[200];
    for (size_t i = 0; i < h.counts.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "hist,%s,%.10g,%.10g,%ld,%.10g\n", name,
                      h.lo + i * h.bin_width, h.lo + (i + 1) * h.bin_width, h.counts[i],
                      h.densities[i]);
        out << buf;
    }
}
}  // namespace

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    char buf[120];
    if (report.extraction_rate) {
        std::snprintf(buf, sizeof(buf), "extraction_rate,%.10g\n", *report.extraction_rate);
        out << buf;
    } else {
        out << "extraction_rate,no_ground_truth\n";
    }
    std::snprintf(buf, sizeof(buf), "false_positive_rate,%.10g\n", report.false_positive_rate);
    out << buf;
    out << "n_gt," << report.n_gt << "\n";
    out << "n_pred," << report.n_pred << "\n";
    write_hist_rows(out, "size", report.size_hist);
    write_hist_rows(out, "aspect", report.aspect_hist);
    if (!out) throw IoError(path + ": write failed");
}

EvalReport read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open for reading");
    EvalReport r;
    bool size_init = false, aspect_init = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("extraction_rate,", 0) == 0) {
            std::string v = line.substr(16);
            if (v != "no_ground_truth") r.extraction_rate = std::stod(v);
        } else if (line.rfind("false_positive_rate,", 0) == 0) {
            r.false_positive_rate = std::stod(line.substr(20));
        } else if (line.rfind("n_gt,", 0) == 0) {
            r.n_gt = std::stoul(line.substr(5));
        } else if (line.rfind("n_pred,", 0) == 0) {
            r.n_pred = std::stoul(line.substr(7));
        } else if (line.rfind("hist,", 0) == 0) {
            char name[32];
            double lo, hi, density;
            long count;
            if (std::sscanf(line.c_str(), "hist,%31[^,],%lf,%lf,%ld,%lf", name, &lo, &hi, &count,
                            &density) != 5)
                throw FormatError(path + ": malformed hist row: " + line);
            Histogram* h = std::string(name) == "size" ? &r.size_hist : &r.aspect_hist;
            bool* init = std::string(name) == "size" ? &size_init : &aspect_init;
            if (!*init) {
                h->lo = lo;
                h->bin_width = hi - lo;
                h->counts.clear();
                h->densities.clear();
                *init = true;
            }
            h->counts.push_back(count);
            h->densities.push_back(density);
        } else {
            throw FormatError(path + ": unrecognized report row: " + line);
        }
    }
    return r;
}

void write_comparison_csv(const ComparisonTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    char buf[200];
    const char* first = table.better_report == 0 ? "a" : "b";
    std::snprintf(buf, sizeof(buf),
                  "extraction_a,%.10g\nextraction_b,%.10g\nfp_a,%.10g\nfp_b,%.10g\nbetter,%s\n",
                  table.extraction_a, table.extraction_b, table.fp_a, table.fp_b, first);
    out << buf;
    auto rows = [&](const char* name, const std::vector<ComparisonRow>& rs) {
        for (const auto& r : rs) {
            std::snprintf(buf, sizeof(buf), "diff,%s,%.10g,%.10g,%.10g,%.10g,%.10g\n", name,
                          r.bin_lo, r.bin_hi, r.density_a, r.density_b, r.difference);
            out << buf;
        }
    };
    rows("size", table.size_rows);
    rows("aspect", table.aspect_rows);
    if (!out) throw IoError(path + ": write failed");
}

}  // namespace shadow::evalx
