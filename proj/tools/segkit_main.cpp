#include "segkit/assign.hpp"
#include "segkit/atomic_file.hpp"
#include "segkit/checkpoint.hpp"
#include "segkit/confidence.hpp"
#include "segkit/error.hpp"
#include "segkit/everything.hpp"
#include "segkit/loss_checks.hpp"
#include "segkit/parallel.hpp"
#include "segkit/png_io.hpp"
#include "segkit/synth.hpp"
#include "segkit/toy_encoder.hpp"
#include "segkit/trainer.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace segkit;

namespace {

constexpr char const* kVersion = "0.1.0";

// Flags shared by the commands that need images plus features.
struct InputOptions {
    std::string manifest;
    std::string features;
    int stride = 1;
    int canvas = 0;
    int grid = 32;
    unsigned threads = 0;
};

void add_inputs(CLI::App* cmd, InputOptions& in, bool with_grid = true) {
    cmd->add_option("--manifest", in.manifest, "Dataset manifest JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--features", in.features, "Directory of <image_id>.feat files (default: toy encoder)");
    cmd->add_option("--stride", in.stride, "Toy encoder cell size in pixels")->check(CLI::PositiveNumber);
    cmd->add_option("--canvas", in.canvas, "Resize images to a square canvas of this side (0 keeps native)")
        ->check(CLI::NonNegativeNumber);
    if (with_grid) {
        cmd->add_option("--grid", in.grid, "Points per side of the prompt grid")->check(CLI::PositiveNumber);
    }
    cmd->add_option("--threads", in.threads, "Worker threads (default: SEGKIT_THREADS or all cores)");
}

json inputs_json(InputOptions const& in, unsigned threads) {
    return {{"manifest", in.manifest},
            {"features", in.features.empty() ? json(nullptr) : json(in.features)},
            {"stride", in.stride},
            {"canvas", in.canvas},
            {"grid", in.grid},
            {"threads", threads}};
}

struct Inputs {
    Manifest manifest;
    std::unique_ptr<FeatureProvider> features;
    unsigned threads = 1;
};

Inputs load_inputs(InputOptions const& in) {
    Inputs out;
    out.manifest = resize_manifest(load_manifest(in.manifest), in.canvas);
    if (in.features.empty()) {
        out.features = std::make_unique<ToyEncoder>(in.stride);
    } else {
        auto dir = std::make_unique<FeatureDirectory>(in.features);
        dir->require(out.manifest.images);
        out.features = std::move(dir);
    }
    out.threads = resolve_thread_count(in.threads);
    return out;
}

Canvas common_canvas(Manifest const& m) {
    if (m.images.empty()) {
        throw ValidationError("manifest has no images");
    }
    auto const c = m.images.front().frame.canvas();
    for (auto const& img : m.images) {
        if (img.frame.canvas() != c) {
            throw ValidationError(fmt::format(
                "image '{}' is {}x{} but '{}' is {}x{}; use --canvas to resample", img.id(),
                img.frame.width, img.frame.height, m.images.front().id(), c.width, c.height));
        }
    }
    return c;
}

void write_json(fs::path const& path, json const& doc) { write_file_atomic(path, doc.dump(2) + "\n"); }

void write_run_manifest(fs::path const& out, std::string const& command, json config) {
    json doc{{"tool", "segkit"}, {"version", kVersion}, {"command", command}, {"config", std::move(config)}};
    write_json(out / "run.json", doc);
}

json filter_json(FilterConfig const& f) {
    return {{"pred_iou_threshold", f.pred_iou_threshold},
            {"box_iou_cutoff", f.box_iou_cutoff},
            {"min_region_area", f.min_region_area}};
}

void add_filter(CLI::App* cmd, FilterConfig& f) {
    cmd->add_option("--pred-iou", f.pred_iou_threshold, "Predicted-IoU threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--box-nms", f.box_iou_cutoff, "Box IoU cutoff for NMS")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--min-area", f.min_region_area, "Minimum region area for hole filling and island removal");
}

AccuracyDefinition parse_accuracy(std::string const& s) {
    if (s == "recall") return AccuracyDefinition::foreground_recall;
    if (s == "pixel") return AccuracyDefinition::pixel_accuracy;
    throw ArgumentError("--accuracy must be 'recall' or 'pixel', got '" + s + "'");
}

// survivor masks: <dir>/<image_id>/<k>.png plus index.json
void write_survivors(fs::path const& dir, std::string const& image_id,
                     std::vector<MaskCandidate> const& masks) {
    auto const sub = dir / image_id;
    fs::create_directories(sub);
    json list = json::array();
    for (std::size_t k = 0; k < masks.size(); ++k) {
        auto const& m = masks[k];
        auto const file = fmt::format("{}.png", k);
        write_mask_png(sub / file, m.mask);
        json entry{{"file", file},
                   {"predicted_iou", m.predicted_iou},
                   {"prompt_point", {m.prompt_point.x, m.prompt_point.y}},
                   {"candidate_index", m.candidate_index}};
        entry["label"] = m.label_logits.empty() ? json(nullptr) : json(argmax_lowest(m.label_logits));
        list.push_back(std::move(entry));
    }
    write_json(sub / "index.json", json{{"image_id", image_id}, {"masks", std::move(list)}});
}

std::vector<MaskCandidate> read_survivors(fs::path const& sub) {
    auto const doc = json::parse(read_text_file(sub / "index.json"));
    std::vector<MaskCandidate> out;
    for (auto const& e : doc.at("masks")) {
        MaskCandidate c;
        c.mask = read_mask_png(sub / e.at("file").get<std::string>());
        c.predicted_iou = e.at("predicted_iou").get<double>();
        c.prompt_point = {e.at("prompt_point")[0].get<double>(), e.at("prompt_point")[1].get<double>()};
        c.candidate_index = e.at("candidate_index").get<std::size_t>();
        out.push_back(std::move(c));
    }
    return out;
}

// ---- synth -----------------------------------------------------------------

int cmd_synth(SynthConfig const& cfg, std::size_t classes, std::string const& out) {
    SynthConfig c = cfg;
    c.class_table = ClassTable::toy(classes);
    auto const manifest = synth_generate(c);
    fs::create_directories(out);
    save_manifest(manifest, fs::path(out) / "manifest.json");
    write_run_manifest(out, "synth",
                       {{"count", c.image_count},
                        {"width", c.width},
                        {"height", c.height},
                        {"classes", classes},
                        {"min_shapes", c.min_shapes},
                        {"max_shapes", c.max_shapes},
                        {"seed", c.seed},
                        {"prefix", c.id_prefix}});
    fmt::print("{} images, {} masks -> {}\n", manifest.image_count(), manifest.mask_count(),
               (fs::path(out) / "manifest.json").string());
    return 0;
}

// ---- stats -----------------------------------------------------------------

int cmd_stats(std::string const& manifest_path, std::string const& json_out) {
    auto const report = dataset_stats(load_manifest(manifest_path));
    std::cout << render_stats_table(report);
    if (!json_out.empty()) {
        write_file_atomic(json_out, stats_to_json(report));
    }
    return 0;
}

// ---- assign ----------------------------------------------------------------

int cmd_assign(InputOptions const& in, std::string const& out) {
    auto const inputs = load_inputs(in);
    auto const canvas = common_canvas(inputs.manifest);
    auto const grid = build_grid(in.grid, canvas.width, canvas.height);
    auto const assignments = assign_dataset(inputs.manifest, *inputs.features, grid, inputs.threads);
    write_file_atomic(out, assignments_to_json(assignments));
    fmt::print("{} assignments on a {}x{} grid -> {}\n", assignments.size(), in.grid, in.grid, out);
    return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainOptions {
    InputOptions in;
    std::string assignments;
    std::string out;
    TrainConfig train;
    std::uint64_t init_seed = 0;
    double init_scale = 0.1;
};

int cmd_train(TrainOptions const& o) {
    auto const inputs = load_inputs(o.in);
    auto const canvas = common_canvas(inputs.manifest);
    std::vector<Assignment> assignments;
    if (o.assignments.empty()) {
        auto const grid = build_grid(o.in.grid, canvas.width, canvas.height);
        assignments = assign_dataset(inputs.manifest, *inputs.features, grid, inputs.threads);
    } else {
        assignments = assignments_from_json(read_text_file(o.assignments));
    }
    auto const channels = inputs.features->features_for(inputs.manifest.images.front()).channels();
    auto head = ToyHead::random(channels, inputs.manifest.class_table.size(), o.init_seed, o.init_scale);
    auto const result = train(std::move(head), inputs.manifest, assignments, *inputs.features, o.train);

    fs::create_directories(o.out);
    save_checkpoint(fs::path(o.out) / "head.ckpt", result.head);
    write_file_atomic(fs::path(o.out) / "train_log.csv", result.log.to_csv());
    auto cfg = inputs_json(o.in, inputs.threads);
    cfg["assignments"] = o.assignments.empty() ? json(nullptr) : json(o.assignments);
    cfg["learning_rate"] = o.train.learning_rate;
    cfg["epochs"] = o.train.epochs;
    cfg["weight_decay"] = o.train.optimizer.weight_decay;
    cfg["beta1"] = o.train.optimizer.beta1;
    cfg["beta2"] = o.train.optimizer.beta2;
    cfg["seed"] = o.train.seed;
    cfg["init_seed"] = o.init_seed;
    cfg["init_scale"] = o.init_scale;
    cfg["loss_weights"] = {{"ce", o.train.loss_weights.ce},
                           {"focal", o.train.loss_weights.focal},
                           {"dice", o.train.loss_weights.dice}};
    write_run_manifest(o.out, "train", std::move(cfg));
    auto const& first = result.log.epochs.front();
    auto const& last = result.log.epochs.back();
    fmt::print("epochs {}  mean total {:.6f} -> {:.6f}  checkpoint {}\n", result.log.epochs.size(),
               first.mean_total, last.mean_total, (fs::path(o.out) / "head.ckpt").string());
    return 0;
}

// ---- predict / eval --------------------------------------------------------

struct PredictOptions {
    InputOptions in;
    std::string checkpoint;
    std::string out;
    FilterConfig filter;
    bool compare_vanilla = false;
    bool save_masks = true;
    std::string accuracy = "recall";
    std::string baseline;
    double min_miou = -1.0;
    double min_cls_acc = -1.0;
};

int run_predict(PredictOptions const& o, std::string const& command) {
    if (!fs::exists(o.checkpoint)) {
        throw LoadError("--checkpoint: file '" + o.checkpoint + "' does not exist");
    }
    o.filter.validate();
    auto const head = load_checkpoint(o.checkpoint);
    auto const inputs = load_inputs(o.in);
    std::optional<EvalReport> baseline;
    if (!o.baseline.empty()) {
        baseline = report_from_json(read_text_file(o.baseline));
    }

    EverythingConfig cfg;
    cfg.grid_per_side = o.in.grid;
    cfg.pipelines = {{"filtered", o.filter}};
    if (o.compare_vanilla) {
        cfg.pipelines.push_back({"vanilla", FilterConfig::vanilla()});
    }
    cfg.accuracy = parse_accuracy(o.accuracy);
    cfg.threads = inputs.threads;
    auto const result = run_everything_mode(head, inputs.manifest, *inputs.features, cfg);

    std::vector<InstanceEval> evals;
    for (auto const& r : result.images) evals.insert(evals.end(), r.evals.begin(), r.evals.end());
    auto const cls = classification_accuracy(evals, inputs.manifest.class_table);
    auto const rendered = render_report(result.report, baseline ? &*baseline : nullptr);

    fs::create_directories(o.out);
    write_file_atomic(fs::path(o.out) / "report.json", report_to_json(result.report));
    write_file_atomic(fs::path(o.out) / "report.txt", rendered.text);
    write_file_atomic(fs::path(o.out) / "counts.json", mask_counts_to_json(result.counts));
    write_file_atomic(fs::path(o.out) / "counts.txt", render_mask_counts(result.counts));
    if (o.save_masks) {
        for (auto const& r : result.images) {
            write_survivors(fs::path(o.out) / "masks", r.image_id, r.survivors.front());
        }
    }
    auto run = inputs_json(o.in, inputs.threads);
    run["checkpoint"] = o.checkpoint;
    run["filter"] = filter_json(o.filter);
    run["compare_vanilla"] = o.compare_vanilla;
    run["accuracy"] = o.accuracy;
    run["save_masks"] = o.save_masks;
    if (command == "eval") {
        run["baseline"] = o.baseline.empty() ? json(nullptr) : json(o.baseline);
        run["min_miou"] = o.min_miou;
        run["min_cls_acc"] = o.min_cls_acc;
    }
    write_run_manifest(o.out, command, std::move(run));

    std::cout << rendered.text << "\n" << render_mask_counts(result.counts);
    fmt::print("mIoU {:.4f}  mAcc {:.4f}  classification accuracy {:.4f}\n", result.report.miou,
               result.report.macc, cls.mean);

    int status = 0;
    if (o.min_miou >= 0.0 && result.report.miou < o.min_miou) {
        fmt::print(stderr, "mIoU {:.4f} is below --min-miou {:.4f}\n", result.report.miou, o.min_miou);
        status = 1;
    }
    if (o.min_cls_acc >= 0.0 && cls.mean < o.min_cls_acc) {
        fmt::print(stderr, "classification accuracy {:.4f} is below --min-cls-acc {:.4f}\n", cls.mean,
                   o.min_cls_acc);
        status = 1;
    }
    return status;
}

// ---- filter ----------------------------------------------------------------

int cmd_filter(std::string const& input, std::string const& out, FilterConfig const& filter) {
    filter.validate();
    auto const masks_dir = fs::path(input) / "masks";
    if (!fs::is_directory(masks_dir)) {
        throw LoadError("--input: '" + input + "' has no masks/ directory");
    }
    std::vector<fs::path> subs;
    for (auto const& e : fs::directory_iterator(masks_dir)) {
        if (e.is_directory()) subs.push_back(e.path());
    }
    std::sort(subs.begin(), subs.end());

    std::vector<std::size_t> before, after;
    for (auto const& sub : subs) {
        auto candidates = read_survivors(sub);
        before.push_back(candidates.size());
        auto kept = run_pipeline(std::move(candidates), filter);
        after.push_back(kept.size());
        write_survivors(fs::path(out) / "masks", sub.filename().string(), kept);
    }
    std::vector<MaskCountReport> counts{count_masks("input", before), count_masks("filtered", after)};
    write_file_atomic(fs::path(out) / "counts.json", mask_counts_to_json(counts));
    write_run_manifest(out, "filter", {{"input", input}, {"filter", filter_json(filter)}});
    std::cout << render_mask_counts(counts);
    return 0;
}

// ---- gradcheck -------------------------------------------------------------

int cmd_gradcheck(std::uint64_t seed, double tolerance) {
    auto const checks = check_loss_gradients(seed);
    bool ok = true;
    for (auto const& c : checks) {
        bool const pass = c.result.max_rel_error < tolerance;
        ok = ok && pass;
        fmt::print("{:<14} max_rel_error {:.3e} (coordinate {})  {}\n", c.name, c.result.max_rel_error,
                   c.result.worst_coordinate, pass ? "ok" : "FAIL");
    }
    auto const control = sign_flipped_dice_check(seed);
    fmt::print("{:<14} max_rel_error {:.3e}  {}\n", "control", control.result.max_rel_error,
               control.result.max_rel_error >= 0.5 ? "flagged" : "NOT FLAGGED");
    return ok ? 0 : 1;
}

// ---- report ----------------------------------------------------------------

int cmd_report(std::string const& eval, std::string const& baseline, std::vector<std::string> const& counts,
               std::string const& out) {
    if (eval.empty() && counts.empty()) {
        throw ArgumentError("report needs --eval and/or --counts");
    }
    std::string text;
    std::string json_text;
    if (!eval.empty()) {
        auto const report = report_from_json(read_text_file(eval));
        std::optional<EvalReport> base;
        if (!baseline.empty()) base = report_from_json(read_text_file(baseline));
        auto const r = render_report(report, base ? &*base : nullptr);
        text += r.text;
        json_text = r.json;
    }
    if (!counts.empty()) {
        std::vector<MaskCountReport> all;
        for (auto const& f : counts) {
            auto part = mask_counts_from_json(read_text_file(f));
            all.insert(all.end(), part.begin(), part.end());
        }
        if (!text.empty()) text += "\n";
        text += render_mask_counts(all);
    }
    std::cout << text;
    if (!out.empty()) {
        fs::create_directories(out);
        write_file_atomic(fs::path(out) / "report.txt", text);
        if (!json_text.empty()) write_file_atomic(fs::path(out) / "report.json", json_text);
    }
    return 0;
}

// ---- feat ------------------------------------------------------------------

int cmd_feat_export(InputOptions const& in, std::string const& out) {
    auto const manifest = resize_manifest(load_manifest(in.manifest), in.canvas);
    ToyEncoder const enc(in.stride);
    std::vector<FeatureMap> maps(manifest.images.size());
    parallel_for(maps.size(), resolve_thread_count(in.threads),
                 [&](std::size_t i) { maps[i] = enc.encode(manifest.images[i].frame); });
    fs::create_directories(out);
    for (auto const& m : maps) {
        write_feat(fs::path(out) / (m.image_id() + ".feat"), m);
    }
    fmt::print("{} feature maps ({} channels) -> {}\n", maps.size(), ToyEncoder::kChannels, out);
    return 0;
}

int cmd_feat_cosine(std::string const& feat, std::string const& mask_path, int row, int col) {
    auto const features = read_feat(feat, fs::path(feat).stem().string());
    if (row < 0 || row >= features.fh() || col < 0 || col >= features.fw()) {
        throw ArgumentError(fmt::format("--cell {},{} is outside the {}x{} feature grid", row, col,
                                        features.fh(), features.fw()));
    }
    InstanceMask mask{read_mask_png(mask_path), 0, fs::path(mask_path).stem().string(), mask_path};
    auto const embedding = mask_pooled_embedding(features, mask);
    auto const cell = features.cell(row, col);
    fmt::print("{:.17g}\n", cosine_similarity(cell, embedding.vector));
    return 0;
}

int cmd_feat_check(std::string const& feat) {
    auto const bytes = read_binary_file(feat);
    std::size_t consumed = 0;
    auto const tensor = decode_tensor(bytes, &consumed);
    if (consumed != bytes.size()) {
        throw LoadError(fmt::format("'{}' has {} trailing bytes", feat, bytes.size() - consumed));
    }
    bool const same = encode_tensor(tensor) == bytes;
    std::string dims;
    for (auto d : tensor.dims) dims += (dims.empty() ? "" : "x") + std::to_string(d);
    fmt::print("{}: {} round-trip {}\n", feat, dims, same ? "identical" : "DIFFERS");
    return same ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale everything-mode segmentation toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    SynthConfig synth;
    std::size_t synth_classes = 8;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic shape dataset");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--count", synth.image_count, "Number of images")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--width", synth.width, "Image width")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--height", synth.height, "Image height")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--classes", synth_classes, "Number of classes")->check(CLI::Range(1, 54));
    synth_cmd->add_option("--min-shapes", synth.min_shapes, "Fewest shapes per image");
    synth_cmd->add_option("--max-shapes", synth.max_shapes, "Most shapes per image");
    synth_cmd->add_option("--seed", synth.seed, "Random seed");
    synth_cmd->add_option("--prefix", synth.id_prefix, "Image id prefix");

    std::string stats_manifest, stats_json;
    auto* stats_cmd = app.add_subcommand("stats", "Print dataset statistics");
    stats_cmd->add_option("--manifest", stats_manifest, "Dataset manifest JSON")->required()->check(CLI::ExistingFile);
    stats_cmd->add_option("--json", stats_json, "Also write the statistics as JSON");

    InputOptions assign_in;
    std::string assign_out;
    auto* assign_cmd = app.add_subcommand("assign", "Assign each mask a grid prompt point");
    add_inputs(assign_cmd, assign_in);
    assign_cmd->add_option("--out", assign_out, "Assignments JSON")->required();

    TrainOptions tr;
    auto* train_cmd = app.add_subcommand("train", "Train the toy head");
    add_inputs(train_cmd, tr.in);
    train_cmd->add_option("--assignments", tr.assignments, "Precomputed assignments JSON")->check(CLI::ExistingFile);
    train_cmd->add_option("--out", tr.out, "Output directory")->required();
    train_cmd->add_option("--lr", tr.train.learning_rate, "Initial learning rate")->check(CLI::PositiveNumber);
    train_cmd->add_option("--epochs", tr.train.epochs, "Epochs")->check(CLI::PositiveNumber);
    train_cmd->add_option("--weight-decay", tr.train.optimizer.weight_decay, "AdamW weight decay")
        ->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--seed", tr.train.seed, "Shuffle seed");
    train_cmd->add_option("--init-seed", tr.init_seed, "Head initialization seed");
    train_cmd->add_option("--init-scale", tr.init_scale, "Head initialization range")->check(CLI::PositiveNumber);
    train_cmd->add_option("--ce-weight", tr.train.loss_weights.ce, "Cross-entropy weight")->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--focal-weight", tr.train.loss_weights.focal, "Focal weight")->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--dice-weight", tr.train.loss_weights.dice, "Dice weight")->check(CLI::NonNegativeNumber);

    PredictOptions pr;
    auto* predict_cmd = app.add_subcommand("predict", "Everything-mode prediction with filtering and evaluation");
    add_inputs(predict_cmd, pr.in);
    predict_cmd->add_option("--checkpoint", pr.checkpoint, "Head checkpoint")->required();
    predict_cmd->add_option("--out", pr.out, "Output directory")->required();
    add_filter(predict_cmd, pr.filter);
    predict_cmd->add_flag("--compare-vanilla", pr.compare_vanilla, "Also count masks under the untuned settings");
    predict_cmd->add_flag("!--no-masks", pr.save_masks, "Skip writing survivor masks");
    predict_cmd->add_option("--accuracy", pr.accuracy, "Acc definition: recall or pixel");

    PredictOptions ev;
    ev.save_masks = false;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint; nonzero exit when a threshold fails");
    add_inputs(eval_cmd, ev.in);
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "Head checkpoint")->required();
    eval_cmd->add_option("--out", ev.out, "Output directory")->required();
    add_filter(eval_cmd, ev.filter);
    eval_cmd->add_option("--accuracy", ev.accuracy, "Acc definition: recall or pixel");
    eval_cmd->add_option("--baseline", ev.baseline, "Baseline report JSON for delta columns")->check(CLI::ExistingFile);
    eval_cmd->add_option("--min-miou", ev.min_miou, "Fail below this mIoU");
    eval_cmd->add_option("--min-cls-acc", ev.min_cls_acc, "Fail below this classification accuracy");

    std::string filter_in, filter_out;
    FilterConfig filter_cfg;
    auto* filter_cmd = app.add_subcommand("filter", "Re-run post-processing on saved masks");
    filter_cmd->add_option("--input", filter_in, "Directory written by predict")->required();
    filter_cmd->add_option("--out", filter_out, "Output directory")->required();
    add_filter(filter_cmd, filter_cfg);

    std::uint64_t gc_seed = 0;
    double gc_tol = 1e-6;
    auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference checks of the loss gradients");
    gc_cmd->add_option("--seed", gc_seed, "Random seed");
    gc_cmd->add_option("--tolerance", gc_tol, "Maximum relative error")->check(CLI::PositiveNumber);

    std::string rep_eval, rep_base, rep_out;
    std::vector<std::string> rep_counts;
    auto* report_cmd = app.add_subcommand("report", "Render evaluation and mask-count tables");
    report_cmd->add_option("--eval", rep_eval, "Report JSON")->check(CLI::ExistingFile);
    report_cmd->add_option("--baseline", rep_base, "Baseline report JSON")->check(CLI::ExistingFile);
    report_cmd->add_option("--counts", rep_counts, "Mask-count JSON files")->check(CLI::ExistingFile);
    report_cmd->add_option("--out", rep_out, "Also write the tables here");

    auto* feat_cmd = app.add_subcommand("feat", "Feature file utilities");
    feat_cmd->require_subcommand(1);
    InputOptions fe_in;
    std::string fe_out;
    auto* fe_export = feat_cmd->add_subcommand("export", "Write toy-encoder features as .feat files");
    add_inputs(fe_export, fe_in, false);
    fe_export->add_option("--out", fe_out, "Output directory")->required();
    std::string fc_feat, fc_mask;
    std::vector<int> fc_cell{0, 0};
    auto* fe_cosine = feat_cmd->add_subcommand("cosine", "Cosine between a cell and a mask-pooled embedding");
    fe_cosine->add_option("--feat", fc_feat, ".feat file")->required()->check(CLI::ExistingFile);
    fe_cosine->add_option("--mask", fc_mask, "Mask PNG on the image canvas")->required()->check(CLI::ExistingFile);
    fe_cosine->add_option("--cell", fc_cell, "Row and column")->expected(2)->delimiter(',');
    std::string fk_feat;
    auto* fe_check = feat_cmd->add_subcommand("check", "Parse and re-encode a .feat file");
    fe_check->add_option("--feat", fk_feat, ".feat file")->required()->check(CLI::ExistingFile);

    if (argc < 2) {
        std::cerr << app.help();
        return 2;
    }
    if (argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
        std::cerr << "unknown subcommand '" << argv[1] << "'\n\n" << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForVersion const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        if (app.get_subcommands().empty()) std::cerr << "\n" << app.help();
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    try {
        if (*synth_cmd) return cmd_synth(synth, synth_classes, synth_out);
        if (*stats_cmd) return cmd_stats(stats_manifest, stats_json);
        if (*assign_cmd) return cmd_assign(assign_in, assign_out);
        if (*train_cmd) return cmd_train(tr);
        if (*predict_cmd) return run_predict(pr, "predict");
        if (*eval_cmd) return run_predict(ev, "eval");
        if (*filter_cmd) return cmd_filter(filter_in, filter_out, filter_cfg);
        if (*gc_cmd) return cmd_gradcheck(gc_seed, gc_tol);
        if (*report_cmd) return cmd_report(rep_eval, rep_base, rep_counts, rep_out);
        if (*fe_export) return cmd_feat_export(fe_in, fe_out);
        if (*fe_cosine) return cmd_feat_cosine(fc_feat, fc_mask, fc_cell[0], fc_cell[1]);
        if (*fe_check) return cmd_feat_check(fk_feat);
    } catch (std::exception const& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 2;
}
