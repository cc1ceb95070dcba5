// Batch front-end for the shadowgraph pipeline: dataset generation, training,
// inference, segmentation, measurement, evaluation, comparison, and reports.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "shadow/baseline.hpp"
#include "shadow/config.hpp"
#include "shadow/evalx.hpp"
#include "shadow/imgio.hpp"
#include "shadow/measure.hpp"
#include "shadow/segment.hpp"
#include "shadow/svg.hpp"
#include "shadow/train.hpp"

namespace fs = std::filesystem;
using namespace shadow;

namespace {

RunConfig load_config(const std::string& path) {
    return path.empty() ? RunConfig{} : parse_config_file(path);
}

std::vector<measure::Region> run_learned(const ModelParams& params, const UNetConfig& ucfg,
                                         const segment::SegmentConfig& scfg, const GrayImage& img,
                                         LabelMap* out_lm = nullptr) {
    auto [binary, centroid] = infer(params, ucfg, img);
    LabelMap lm = segment::segment_image(binary, centroid, scfg);
    if (out_lm) *out_lm = lm;
    return measure::region_props(lm);
}

void emit_report_svgs(const evalx::EvalReport& rep, const std::string& prefix,
                      const evalx::EvalReport* overlay = nullptr,
                      const std::string& overlay_name = "") {
    std::vector<svg::Series> size_series{{"measured", rep.size_hist.densities, "#1f77b4"}};
    std::vector<svg::Series> aspect_series{{"measured", rep.aspect_hist.densities, "#1f77b4"}};
    if (overlay) {
        size_series.push_back({overlay_name, overlay->size_hist.densities, "#d62728"});
        aspect_series.push_back({overlay_name, overlay->aspect_hist.densities, "#d62728"});
    }
    svg::write_svg(svg::histogram_chart("Equivalent radius distribution", "r_eq (px)",
                                        rep.size_hist.lo, rep.size_hist.bin_width, size_series),
                   prefix + "_size.svg");
    svg::write_svg(svg::histogram_chart("Aspect ratio distribution", "aspect",
                                        rep.aspect_hist.lo, rep.aspect_hist.bin_width,
                                        aspect_series),
                   prefix + "_aspect.svg");
}

int run(int argc, char** argv) {
    CLI::App app{"learning-based shadowgraph particle analysis"};
    app.require_subcommand(1);

    std::string config_path, out_path, data_dir, model_path, image_path;
    std::string binary_path, centroid_path, labels_path, pred_csv, gt_csv;
    std::string loss_csv, checkpoint_dir, report_path, overlay_report;
    int n_samples = 10;

    auto* gen = app.add_subcommand("gen", "generate a synthetic labeled dataset");
    gen->add_option("--config", config_path);
    gen->add_option("--out", out_path)->required();
    gen->add_option("--n", n_samples)->required();

    auto* train_cmd = app.add_subcommand("train", "train the model on a generated dataset");
    train_cmd->add_option("--config", config_path);
    train_cmd->add_option("--data", data_dir)->required();
    train_cmd->add_option("--out", out_path)->required();
    train_cmd->add_option("--loss-csv", loss_csv);
    train_cmd->add_option("--checkpoint-dir", checkpoint_dir);

    auto* infer_cmd = app.add_subcommand("infer", "forward pass producing channel images");
    infer_cmd->add_option("--model", model_path)->required();
    infer_cmd->add_option("--image", image_path)->required();
    infer_cmd->add_option("--out-binary", binary_path)->required();
    infer_cmd->add_option("--out-centroid", centroid_path)->required();

    auto* seg = app.add_subcommand("segment", "channels to label map");
    seg->add_option("--config", config_path);
    seg->add_option("--binary", binary_path)->required();
    seg->add_option("--centroid", centroid_path)->required();
    seg->add_option("--out", out_path)->required();
    seg->add_option("--image", image_path);

    auto* meas = app.add_subcommand("measure", "label map to region property CSV");
    meas->add_option("--labels", labels_path)->required();
    meas->add_option("--out", out_path)->required();

    auto* eval_cmd = app.add_subcommand("eval", "predictions vs ground truth report");
    eval_cmd->add_option("--config", config_path);
    eval_cmd->add_option("--pred", pred_csv)->required();
    eval_cmd->add_option("--gt", gt_csv)->required();
    eval_cmd->add_option("--out", out_path)->required();

    auto* cmp = app.add_subcommand("compare", "learned vs baseline on a dataset");
    cmp->add_option("--config", config_path);
    cmp->add_option("--data", data_dir)->required();
    cmp->add_option("--model", model_path)->required();
    cmp->add_option("--out", out_path)->required();

    auto* rep = app.add_subcommand("report", "report CSV to SVG charts");
    rep->add_option("--in", report_path)->required();
    rep->add_option("--out-prefix", out_path)->required();
    rep->add_option("--overlay", overlay_report);

    auto* cref = app.add_subcommand("config-reference", "print all accepted config keys");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        if (e.get_exit_code() == 0) {
            std::cerr << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    if (gen->parsed()) {
        RunConfig cfg = load_config(config_path);
        std::string manifest = synth::generate_dataset(cfg.synth, n_samples, out_path);
        std::cerr << "wrote " << n_samples << " samples, manifest " << manifest << "\n";
    } else if (train_cmd->parsed()) {
        RunConfig cfg = load_config(config_path);
        auto dataset = synth::load_dataset((fs::path(data_dir) / "manifest.txt").string());
        ModelParams params = init_params(cfg.unet, cfg.train.seed);
        std::optional<std::string> ckdir;
        if (!checkpoint_dir.empty()) ckdir = checkpoint_dir;
        auto history = train_epochs(params, cfg.unet, dataset, cfg.train, cfg.loss, ckdir);
        save_checkpoint(params, cfg.unet, out_path);
        if (!loss_csv.empty()) write_loss_history_csv(history, loss_csv);
        std::cerr << "trained " << history.size() << " epochs, final loss "
                  << history.back().mean_loss << ", checkpoint " << out_path << "\n";
    } else if (infer_cmd->parsed()) {
        auto [params, ucfg] = load_checkpoint(model_path);
        GrayImage img = imgio::load_image(image_path);
        auto [binary, centroid] = infer(params, ucfg, img);
        imgio::save_image(binary, binary_path);
        imgio::save_image(centroid, centroid_path);
    } else if (seg->parsed()) {
        RunConfig cfg = load_config(config_path);
        GrayImage binary = imgio::load_image(binary_path);
        GrayImage centroid = imgio::load_image(centroid_path);
        LabelMap lm = segment::segment_image(binary, centroid, cfg.segment);
        imgio::save_label_map(lm, out_path);
        if (!image_path.empty()) {
            GrayImage img = imgio::load_image(image_path);
            imgio::save_image(segment::edge_overlay(img, lm),
                              out_path + ".overlay.pgm");
        }
    } else if (meas->parsed()) {
        LabelMap lm = imgio::load_label_map(labels_path);
        measure::write_measure_csv(measure::region_props(lm), out_path);
    } else if (eval_cmd->parsed()) {
        RunConfig cfg = load_config(config_path);
        auto pred = measure::read_measure_csv(pred_csv);
        auto gt = synth::read_bubble_csv(gt_csv);
        auto m = evalx::match_regions(pred, gt);
        auto report = evalx::compute_metrics(m, pred, gt, cfg.eval_size_bin_width);
        evalx::write_report_csv(report, out_path);
    } else if (cmp->parsed()) {
        RunConfig cfg = load_config(config_path);
        auto [params, ucfg] = load_checkpoint(model_path);
        auto dataset = synth::load_dataset((fs::path(data_dir) / "manifest.txt").string());
        fs::create_directories(out_path);
        evalx::Aggregate learned_agg, baseline_agg, gt_agg;
        for (const auto& s : dataset) {
            auto learned = run_learned(params, ucfg, cfg.segment, s.image);
            learned_agg.add(evalx::match_regions(learned, s.bubbles), learned, s.bubbles);
            auto base = measure::region_props(baseline::baseline_segment(s.image, cfg.baseline));
            baseline_agg.add(evalx::match_regions(base, s.bubbles), base, s.bubbles);
        }
        auto learned_rep = learned_agg.finalize(cfg.eval_size_bin_width);
        auto baseline_rep = baseline_agg.finalize(cfg.eval_size_bin_width);
        evalx::write_report_csv(learned_rep, (fs::path(out_path) / "learned_report.csv").string());
        evalx::write_report_csv(baseline_rep,
                                (fs::path(out_path) / "baseline_report.csv").string());
        auto table = evalx::compare_methods(learned_rep, baseline_rep);
        evalx::write_comparison_csv(table, (fs::path(out_path) / "comparison.csv").string());
        emit_report_svgs(learned_rep, (fs::path(out_path) / "learned").string(), &baseline_rep,
                         "baseline");
        std::cerr << "learned extraction " << table.extraction_a << " fp " << table.fp_a
                  << " | baseline extraction " << table.extraction_b << " fp " << table.fp_b
                  << "\n";
    } else if (rep->parsed()) {
        auto report = evalx::read_report_csv(report_path);
        if (!overlay_report.empty()) {
            auto ov = evalx::read_report_csv(overlay_report);
            emit_report_svgs(report, out_path, &ov, "overlay");
        } else {
            emit_report_svgs(report, out_path);
        }
    } else if (cref->parsed()) {
        std::cout << config_reference();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
