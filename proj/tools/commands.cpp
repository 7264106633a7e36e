#include "commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "xray/binary_io.hpp"
#include "xray/checkpoint.hpp"
#include "xray/cross_validation.hpp"
#include "xray/dataset.hpp"
#include "xray/error.hpp"
#include "xray/losses.hpp"
#include "xray/report.hpp"
#include "xray/serialization.hpp"
#include "xray/synthetic.hpp"

namespace fs = std::filesystem;
using xray::binary::read_text;
using xray::binary::write_text;

namespace xray::cli {
namespace {

constexpr std::uint64_t fallback_seed = 42;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("XRAYCNN_SEED"); env && *env) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (*end != '\0') throw Error(ErrorCode::usage, std::string("XRAYCNN_SEED is not an integer: ") + env);
        return v;
    }
    return fallback_seed;
}

std::vector<std::size_t> parse_widths(const std::string& text, const char* flag) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v <= 0) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::usage, std::string(flag) + " expects comma-separated positive integers, got '" +
                                              text + "'");
        }
    }
    return out;
}

void print_metrics(std::ostream& os, const MetricsReport& r) {
    char line[256];
    std::snprintf(line, sizeof line, "TP=%zu TN=%zu FP=%zu FN=%zu\n", r.counts.tp, r.counts.tn, r.counts.fp,
                  r.counts.fn);
    os << line;
    std::snprintf(line, sizeof line,
                  "accuracy=%.4f sensitivity=%.4f precision=%.4f f1=%.4f specificity=%.4f auc=%.4f loss=%.6f\n",
                  r.accuracy, r.sensitivity, r.precision, r.f1, r.specificity, r.auc, r.loss);
    os << line;
    if (!r.degenerate.empty()) {
        os << "undefined (reported as 0):";
        for (const auto& d : r.degenerate) os << ' ' << d;
        os << '\n';
    }
}

ordered_json read_json_file(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::io, "malformed JSON in " + path.string() + ": " + e.what());
    }
}

void set_threads(int threads) {
    if (threads < 1) throw Error(ErrorCode::usage, "--threads must be at least 1");
    omp_set_num_threads(threads);
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
    std::string input, output;
    std::uint64_t seed = 0;
    bool no_augment = false;
    std::size_t input_size = 64;
};

int cmd_prepare(const PrepareArgs& a) {
    PrepareOptions opts;
    opts.seed = a.seed;
    opts.augment = !a.no_augment;
    opts.input_side = a.input_size;
    const LabeledDataset ds = prepare_dataset(a.input, opts);
    save_prepared(ds, a.output, opts.augment);

    const auto c = ds.counts();
    std::cout << "prepared " << c.total() << " samples in " << a.output << "\n"
              << "  covid:  " << c.positive << "\n"
              << "  normal: " << c.negative << "\n";
    for (Lineage l : {Lineage::original, Lineage::shift_x, Lineage::shift_y, Lineage::rotation}) {
        std::cout << "  " << lineage_name(l) << ": " << ds.count(l) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string data, out, config_file;
    std::string head = "sigmoid", sobel = "off", mode = "leak-free";
    std::size_t folds = 10, epochs = 100, batch = 32, input_size = 64;
    double lr = 0.001, val = 0.2, dropout = 0.2;
    std::uint64_t seed = 0;
    std::string conv = "128,256", dense = "64,32,16";
    bool no_augment = false, no_stratify = false;
    int threads = 1;

    CLI::App* app = nullptr;
    bool given(const char* name) const { return app->count(name) > 0; }
};

struct RunPlan {
    NetworkSpec spec;
    TrainConfig config;
    std::string data;
    bool augment = true;
};

RunPlan plan_from_args(const TrainArgs& a) {
    RunPlan p;
    bool input_size_fixed = a.given("--input-size");
    if (!a.config_file.empty()) {
        const ordered_json j = read_json_file(a.config_file);
        try {
            p.spec = network_spec_from_json(j.at("network"));
            p.config = train_config_from_json(j.at("config"));
            p.data = j.at("data").get<std::string>();
            p.augment = j.at("augment").get<bool>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::usage, "incomplete run config " + a.config_file + ": " + e.what());
        }
        input_size_fixed = true;
    } else {
        p.config.seed = default_seed();
    }

    auto& c = p.config;
    if (a.given("--data")) p.data = a.data;
    if (a.given("--head")) c.head = parse_head(a.head);
    if (a.given("--sobel")) c.sobel = a.sobel == "on";
    if (a.given("--mode")) c.leakage = parse_leakage_mode(a.mode);
    if (a.given("--folds")) c.folds = a.folds;
    if (a.given("--epochs")) c.epochs = a.epochs;
    if (a.given("--batch")) c.batch_size = a.batch;
    if (a.given("--lr")) c.learning_rate = a.lr;
    if (a.given("--val")) c.validation_fraction = a.val;
    if (a.given("--seed")) c.seed = a.seed;
    if (a.given("--no-stratify")) c.stratified = false;
    if (a.given("--no-augment")) p.augment = false;
    if (a.given("--input-size")) p.spec.input_side = a.input_size;
    if (a.given("--dropout")) p.spec.dropout_rate = a.dropout;
    if (a.given("--conv")) {
        p.spec.conv_blocks.clear();
        for (std::size_t k : parse_widths(a.conv, "--conv")) p.spec.conv_blocks.push_back({k, 3, 2});
    }
    if (a.given("--dense")) p.spec.dense_widths = parse_widths(a.dense, "--dense");
    p.spec.head = c.head;

    if (p.data.empty()) throw Error(ErrorCode::usage, "--data is required");
    c.validate();
    // A prepared cache fixes the input size unless the caller pinned one.
    if (!input_size_fixed && fs::exists(fs::path(p.data) / "manifest.json")) {
        p.spec.input_side = read_json_file(fs::path(p.data) / "manifest.json").value("input_side", p.spec.input_side);
    }
    p.spec.validate();
    return p;
}

LabeledDataset load_training_data(const RunPlan& p) {
    const fs::path dir = p.data;
    if (fs::exists(dir / "manifest.json")) {
        LabeledDataset ds = load_prepared(dir);
        if (ds.input_side != p.spec.input_side) {
            throw Error(ErrorCode::spec_mismatch, "input size mismatch: network expects " +
                                                      std::to_string(p.spec.input_side) + ", data in " +
                                                      dir.string() + " is " + std::to_string(ds.input_side));
        }
        return ds;
    }
    PrepareOptions opts;
    opts.seed = p.config.seed;
    opts.augment = p.augment;
    opts.input_side = p.spec.input_side;
    return prepare_dataset(dir, opts);
}

ordered_json run_config_json(const RunPlan& p, const std::string& status, const std::string& error = {}) {
    ordered_json j = {{"status", status},
                      {"data", p.data},
                      {"augment", p.augment},
                      {"seed", p.config.seed},
                      {"config", to_json(p.config)},
                      {"network", to_json(p.spec)}};
    if (!error.empty()) j["error"] = error;
    return j;
}

std::string fold_checkpoint_name(std::size_t fold) {
    char name[32];
    std::snprintf(name, sizeof name, "fold_%02zu.ckpt", fold);
    return name;
}

int cmd_train(const TrainArgs& a) {
    set_threads(a.threads);
    const RunPlan plan = plan_from_args(a);
    const fs::path out = a.out;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create run directory " + out.string() + ": " + ec.message());
    write_text(out / "config.json", run_config_json(plan, "running").dump(2) + "\n");

    try {
        const LabeledDataset ds = load_training_data(plan);
        const auto counts = ds.counts();
        std::cout << "training " << to_string(plan.config.head) << (plan.config.sobel ? "+sobel" : "") << " on "
                  << counts.total() << " samples (" << counts.positive << " covid, " << counts.negative
                  << " normal), " << plan.config.folds << " folds, " << plan.config.epochs << " epochs, "
                  << to_string(plan.config.leakage) << "\n";

        auto on_fold = [&](std::size_t fold, const FoldOutput& f) {
            save_checkpoint(out / fold_checkpoint_name(fold), {plan.spec, plan.config.sobel, plan.config.seed, fold},
                            f.params);
            double acc = 0.0;
            if (!f.history.empty()) acc = f.history.back().train_accuracy;
            std::cout << "  fold " << fold + 1 << "/" << plan.config.folds << " done, final train accuracy " << acc
                      << "\n";
        };
        const CvResult result = cross_validate(plan.spec, plan.config, ds, on_fold);

        std::vector<RunHistory> histories;
        for (const auto& f : result.folds) histories.push_back(f.history);
        write_text(out / "history.csv", history_csv(histories));
        write_text(out / "report.json", to_json(result).dump(2) + "\n");
        write_text(out / "config.json", run_config_json(plan, "complete").dump(2) + "\n");

        std::cout << "pooled over " << result.folds.size() << " folds:\n";
        print_metrics(std::cout, result.pooled);
        std::cout << "run written to " << out.string() << "\n";
    } catch (const Error& e) {
        write_text(out / "config.json",
                   run_config_json(plan, "incomplete", "error[" + std::string(code_name(e.code())) + "]: " + e.what())
                           .dump(2) +
                       "\n");
        throw;
    }
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string model, data;
    bool json = false;
};

int cmd_evaluate(const EvaluateArgs& a) {
    const Checkpoint ck = load_checkpoint(a.model);
    const auto& spec = ck.meta.spec;
    const fs::path dir = a.data;
    if (!fs::is_directory(dir)) throw Error(ErrorCode::missing_file, "data directory not found: " + dir.string());

    LabeledDataset ds;
    if (fs::exists(dir / "manifest.json")) {
        ds = load_prepared(dir);
        if (ds.input_side != spec.input_side) {
            throw Error(ErrorCode::spec_mismatch, "input size mismatch: model expects " +
                                                      std::to_string(spec.input_side) + ", data in " +
                                                      dir.string() + " is " + std::to_string(ds.input_side));
        }
    } else {
        ds = load_any_dataset(dir, spec.input_side, ck.meta.seed);
    }
    if (ds.samples.empty()) throw Error(ErrorCode::empty_class, "no samples in " + dir.string());

    std::vector<Tensor> inputs;
    inputs.reserve(ds.samples.size());
    for (const auto& s : ds.samples) inputs.push_back(to_tensor(s.image, ck.meta.sobel));
    const auto labels = ds.labels();
    const Evaluation ev = evaluate_inputs(spec, ck.params, inputs, labels);
    const MetricsReport report = fold_metrics(ev.predicted, labels, ev.scores, ev.loss);

    if (a.json) {
        std::cout << to_json(report).dump(2) << "\n";
    } else {
        std::cout << "evaluated " << ds.samples.size() << " samples with " << to_string(spec.head)
                  << (ck.meta.sobel ? "+sobel" : "") << " model\n";
        print_metrics(std::cout, report);
    }
    return 0;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
    std::string model, image;
};

int cmd_predict(const PredictArgs& a) {
    const Checkpoint ck = load_checkpoint(a.model);
    const auto& spec = ck.meta.spec;
    const GrayImage img = resize_bilinear(load_image(a.image), spec.input_side);
    const Tensor input = to_tensor(img, ck.meta.sobel);
    const Tensor out = predict(spec, ck.params, input.reshaped({1, 1, spec.input_side, spec.input_side}));
    const Label label = predicted_label(out, 0);
    char line[128];
    std::snprintf(line, sizeof line, "%s %.9g\n", class_dir(label), static_cast<double>(out.at(0, positive_unit)));
    std::cout << line;
    return 0;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string run, format = "json", out;
};

int cmd_report(const ReportArgs& a) {
    const fs::path run = a.run;
    if (!fs::is_directory(run)) throw Error(ErrorCode::missing_file, "run directory not found: " + run.string());
    const fs::path config_path = run / "config.json";
    if (!fs::exists(config_path)) throw Error(ErrorCode::missing_file, "no config.json in " + run.string());
    const ordered_json config = read_json_file(config_path);
    if (config.value("status", std::string{}) != "complete") {
        throw Error(ErrorCode::io, "run " + run.string() + " is incomplete (status '" +
                                       config.value("status", std::string{}) + "')");
    }
    const fs::path report_path = run / "report.json";
    if (!fs::exists(report_path)) throw Error(ErrorCode::missing_file, "no report.json in " + run.string());
    const ordered_json report = read_json_file(report_path);

    if (a.format == "json") {
        std::cout << report.dump(2) << "\n";
        return 0;
    }
    std::vector<RunHistory> histories;
    try {
        for (const auto& f : report.at("folds")) histories.push_back(run_history_from_json(f.at("history")));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::io, "malformed report " + report_path.string() + ": " + e.what());
    }
    if (a.format == "csv") {
        std::cout << history_csv(histories);
        return 0;
    }
    const fs::path dest = a.out.empty() ? run : fs::path(a.out);
    std::error_code ec;
    fs::create_directories(dest, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + dest.string() + ": " + ec.message());
    write_text(dest / "loss.svg", curves_svg(histories, CurveKind::loss));
    write_text(dest / "accuracy.svg", curves_svg(histories, CurveKind::accuracy));
    std::cout << (dest / "loss.svg").string() << "\n" << (dest / "accuracy.svg").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string output;
    std::size_t positives = 100, negatives = 100, side = 32;
    std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a) {
    SynthOptions opts;
    opts.side = a.side;
    if (a.side < 8) throw Error(ErrorCode::usage, "--side must be at least 8");
    write_synthetic_dataset(a.output, a.positives, a.negatives, a.seed, opts);
    std::cout << "wrote " << a.positives << " covid and " << a.negatives << " normal images to " << a.output
              << "\n";
    return 0;
}

int fail(ErrorCode code, const std::string& message) {
    std::cerr << "error[" << code_name(code) << "]: " << message << "\n";
    return exit_status(code);
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Chest X-ray CNN experiments: prepare, train, evaluate, predict, report."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "xraycnn 1.0.0");

    PrepareArgs prep;
    auto* prepare = app.add_subcommand("prepare", "Load a covid/ normal/ tree, augment, cache resized samples");
    prepare->add_option("--input", prep.input, "Dataset root with covid/ and normal/")->required();
    prepare->add_option("--output", prep.output, "Output directory for the cache")->required();
    prepare->add_option("--seed", prep.seed, "Augmentation seed (default $XRAYCNN_SEED or 42)");
    prepare->add_flag("--no-augment", prep.no_augment, "Keep originals only");
    prepare->add_option("--input-size", prep.input_size, "Side of the resized square images")
        ->check(CLI::Range(8, 4096));

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Cross-validate one experiment arm and write a run directory");
    tr.app = train;
    train->add_option("--data", tr.data, "Prepared cache or raw covid/ normal/ tree");
    train->add_option("--out", tr.out, "Run directory")->required();
    train->add_option("--config", tr.config_file, "Re-run from a previous config.json (flags override)");
    train->add_option("--head", tr.head, "sigmoid or svm")->check(CLI::IsMember({"sigmoid", "svm"}));
    train->add_option("--sobel", tr.sobel, "on or off")->check(CLI::IsMember({"on", "off"}));
    train->add_option("--mode", tr.mode, "leak-free or paper-faithful")
        ->check(CLI::IsMember({"leak-free", "paper-faithful"}));
    train->add_option("--folds", tr.folds, "Cross-validation folds");
    train->add_option("--epochs", tr.epochs, "Epochs per fold");
    train->add_option("--batch", tr.batch, "Mini-batch size");
    train->add_option("--lr", tr.lr, "Adam learning rate");
    train->add_option("--val", tr.val, "Validation fraction of each training fold");
    train->add_option("--seed", tr.seed, "Run seed (default $XRAYCNN_SEED or 42)");
    train->add_option("--threads", tr.threads, "OpenMP threads for the kernels");
    train->add_option("--conv", tr.conv, "Kernels per conv block, e.g. 128,256");
    train->add_option("--dense", tr.dense, "Hidden dense widths, e.g. 64,32,16");
    train->add_option("--dropout", tr.dropout, "Dropout rate after hidden dense layers");
    train->add_option("--input-size", tr.input_size, "Network input side");
    train->add_flag("--no-augment", tr.no_augment, "Skip augmentation when --data is a raw tree");
    train->add_flag("--no-stratify", tr.no_stratify, "Plain instead of stratified folds");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a dataset");
    evaluate->add_option("--model", ev.model, "Checkpoint file")->required();
    evaluate->add_option("--data", ev.data, "Prepared cache or raw covid/ normal/ tree")->required();
    evaluate->add_flag("--json", ev.json, "Print the report as JSON");

    PredictArgs pr;
    auto* predict_cmd = app.add_subcommand("predict", "Classify one image");
    predict_cmd->add_option("--model", pr.model, "Checkpoint file")->required();
    predict_cmd->add_option("--image", pr.image, "PNG or JPEG file")->required();

    ReportArgs rp;
    auto* report = app.add_subcommand("report", "Export a run as csv, json or svg");
    report->add_option("--run", rp.run, "Run directory")->required();
    report->add_option("--format", rp.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
    report->add_option("--out", rp.out, "Directory for svg files (default: the run directory)");

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Write a synthetic two-class image tree");
    synth->add_option("--output", sy.output, "Output root")->required();
    synth->add_option("--positives", sy.positives, "Number of covid/ images");
    synth->add_option("--negatives", sy.negatives, "Number of normal/ images");
    synth->add_option("--side", sy.side, "Image side in pixels");
    synth->add_option("--seed", sy.seed, "Generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        return fail(ErrorCode::usage, msg);
    }

    try {
        if (*prepare) {
            if (prepare->count("--seed") == 0) prep.seed = default_seed();
            return cmd_prepare(prep);
        }
        if (*train) return cmd_train(tr);
        if (*evaluate) return cmd_evaluate(ev);
        if (*predict_cmd) return cmd_predict(pr);
        if (*report) return cmd_report(rp);
        if (*synth) return cmd_synth(sy);
    } catch (const Error& e) {
        return fail(e.code(), e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(ErrorCode::io, e.what());
    } catch (const std::bad_alloc&) {
        return fail(ErrorCode::io, "out of memory");
    } catch (const std::exception& e) {
        return fail(ErrorCode::io, e.what());
    }
    return 0;
}

}  // namespace xray::cli
