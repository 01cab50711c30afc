#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmfuse/dataset.hpp"
#include "mmfuse/gradcheck_suite.hpp"
#include "mmfuse/run_config.hpp"
#include "mmfuse/sweep.hpp"
#include "mmfuse/synth.hpp"
#include "mmfuse/trainer.hpp"

namespace fs = std::filesystem;
using namespace mmfuse;

namespace {

const std::set<std::string> kSynthKeys = {
    "n",       "latent_dim",      "modality_dims", "noise_scales", "distractor_dims",
    "target",  "seq_len",         "base_interval", "shape_tau",    "label_flip_prob",
    "target_noise", "seed",       "out"};

const std::set<std::string> kTrainKeys = {
    "dataset",       "epochs",        "batch_size",   "lr_start",       "lr_end",
    "lambda",        "mc_samples",    "seed",         "decoder",        "deterministic_baseline",
    "include_prior", "encoder_hidden", "latent",      "head_hidden",    "tmp_hidden",
    "split",         "split_seed",    "out"};

std::set<std::string> sweep_keys() {
    std::set<std::string> keys = kTrainKeys;
    keys.insert({"sweep", "lambda_list", "tint_list", "seeds"});
    return keys;
}

struct FlagOverrides {
    std::string config_path;
    std::string out;
    std::string decoder;
    std::string include_prior;
    std::string lambda;
    std::string seed;
    bool deterministic_baseline = false;

    void apply(RunConfig& cfg) const {
        if (!out.empty()) cfg.set("out", out);
        if (!decoder.empty()) cfg.set("decoder", decoder);
        if (!include_prior.empty()) cfg.set("include_prior", include_prior);
        if (!lambda.empty()) cfg.set("lambda", lambda);
        if (!seed.empty()) cfg.set("seed", seed);
        if (deterministic_baseline) cfg.set("deterministic_baseline", "true");
    }
};

RunConfig load_config(const FlagOverrides& flags) {
    RunConfig cfg =
        flags.config_path.empty() ? RunConfig::from_pairs({}) : RunConfig::load(flags.config_path);
    flags.apply(cfg);
    return cfg;
}

std::string out_dir(const RunConfig& cfg) {
    const std::string out = cfg.require_string("out");
    fs::create_directories(out);
    return out;
}

SynthConfig synth_config(const RunConfig& cfg) {
    SynthConfig s;
    s.n = cfg.get_size("n", s.n);
    s.latent_dim = cfg.get_size("latent_dim", s.latent_dim);
    if (cfg.has("modality_dims")) s.modality_dims = cfg.get_size_list("modality_dims");
    const std::size_t k = s.modality_dims.size();
    s.noise_scales.assign(k, 0.0);
    if (cfg.has("noise_scales")) {
        auto ns = cfg.get_double_list("noise_scales");
        if (ns.size() == 1) ns.assign(k, ns[0]);
        s.noise_scales = ns;
    }
    s.distractor_dims.assign(k, 0);
    if (cfg.has("distractor_dims")) {
        auto dd = cfg.get_size_list("distractor_dims");
        if (dd.size() == 1) dd.assign(k, dd[0]);
        s.distractor_dims = dd;
    }
    s.kind = target_kind_from_string(cfg.get_string("target", "reg"));
    s.seq_len = cfg.get_size("seq_len", s.seq_len);
    s.base_interval = cfg.get_double("base_interval", s.base_interval);
    s.shape_tau = cfg.get_double("shape_tau", s.shape_tau);
    s.label_flip_prob = cfg.get_double("label_flip_prob", s.label_flip_prob);
    s.target_noise = cfg.get_double("target_noise", s.target_noise);
    s.seed = cfg.get_seed("seed", s.seed);
    return s;
}

TrainConfig train_config(const RunConfig& cfg, const Dataset& data) {
    TrainConfig t;
    t.epochs = cfg.get_size("epochs", t.epochs);
    t.batch_size = cfg.get_size("batch_size", t.batch_size);
    t.lr_start = cfg.get_double("lr_start", t.lr_start);
    t.lr_end = cfg.get_double("lr_end", t.lr_end);
    t.lambda = cfg.get_double("lambda", t.lambda);
    t.mc_samples = cfg.get_size("mc_samples", t.mc_samples);
    t.seed = cfg.get_seed("seed", t.seed);
    t.decoder = target_kind_from_string(cfg.get_string("decoder", to_string(data.kind)));
    t.deterministic_baseline = cfg.get_bool("deterministic_baseline", false);
    t.include_prior = cfg.get_bool("include_prior", true);
    t.encoder_hidden = cfg.get_size("encoder_hidden", t.encoder_hidden);
    t.latent = cfg.get_size("latent", t.latent);
    t.head_hidden = cfg.get_size("head_hidden", t.head_hidden);
    t.tmp_hidden = cfg.get_size("tmp_hidden", t.tmp_hidden);
    return t;
}

struct SplitRatios {
    double train = 0.64, val = 0.16, test = 0.20;
};

SplitRatios split_ratios(const RunConfig& cfg) {
    SplitRatios r;
    if (cfg.has("split")) {
        const auto v = cfg.get_double_list("split");
        if (v.size() != 3)
            throw std::invalid_argument("config key 'split': expected three ratios");
        r = {v[0], v[1], v[2]};
    }
    return r;
}

int cmd_synth(const FlagOverrides& flags) {
    RunConfig cfg = load_config(flags);
    cfg.validate_keys(kSynthKeys);
    const std::string out = out_dir(cfg);
    SynthResult result = synth_generate(synth_config(cfg));
    save_dataset(out + "/dataset.jsonl", result.dataset);
    save_synth_meta(out + "/dataset.meta.json", result.meta);
    std::cout << "dataset = " << out << "/dataset.jsonl\n";
    std::cout << "metadata = " << out << "/dataset.meta.json\n";
    std::cout << "samples = " << result.dataset.size() << "\n";
    return 0;
}

int cmd_train(const FlagOverrides& flags) {
    RunConfig cfg = load_config(flags);
    cfg.validate_keys(kTrainKeys);
    const std::string out = out_dir(cfg);
    Dataset data = load_dataset(cfg.require_string("dataset"));
    const TrainConfig tc = train_config(cfg, data);
    const SplitRatios ratios = split_ratios(cfg);
    const std::uint64_t split_seed = cfg.get_seed("split_seed", tc.seed);

    DatasetSplits splits = split_dataset(data, ratios.train, ratios.val, ratios.test, split_seed);
    StandardizationStats stats = standardize_fit(splits.train);
    standardize_apply(stats, splits.train);
    standardize_apply(stats, splits.val);
    standardize_apply(stats, splits.test);

    TrainResult result = train(splits.train, splits.val, stats, tc);
    save_model(out + "/model.json", result.model);
    save_history(out + "/history.csv", result.history);
    std::cout << "model = " << out << "/model.json\n";
    std::cout << "history = " << out << "/history.csv\n";
    std::cout << "final_val_metric = " << format_double(result.history.epochs.back().val_metric)
              << "\n";
    return 0;
}

ModalityMask drop_mask(const TrainedModel& model, const std::vector<std::string>& drop) {
    return mask_dropping(model.spec.encoder, drop);
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::vector<std::string>& drop, bool rank_src) {
    TrainedModel model = load_model(model_path);
    Dataset data = load_dataset(data_path);
    for (const auto& m : data.schema) {
        const int idx = model.spec.encoder.modality_index(m.name);
        if (idx < 0) throw std::invalid_argument("dataset modality '" + m.name +
                                                 "' is unknown to the model");
        if (model.spec.encoder.modalities[static_cast<std::size_t>(idx)].input_dim != m.dim)
            throw std::invalid_argument("modality '" + m.name + "' has dim " +
                                        std::to_string(m.dim) + " but the model expects " +
                                        std::to_string(model.spec.encoder
                                                           .modalities[static_cast<std::size_t>(idx)]
                                                           .input_dim));
    }
    standardize_apply(model.stats, data);
    ModalityMask mask = drop_mask(model, drop);
    const ModalityMask* mask_ptr = drop.empty() ? nullptr : &mask;

    std::cout << "samples = " << data.size() << "\n";
    std::cout << "dropped = ";
    for (std::size_t i = 0; i < drop.size(); ++i) std::cout << (i ? "," : "") << drop[i];
    std::cout << "\n";
    std::cout << primary_metric_name(model.spec.decoder.kind) << " = "
              << format_double(eval_metric(model, data, mask_ptr)) << "\n";
    switch (model.spec.decoder.kind) {
        case TargetKind::Cls:
            std::cout << "accuracy = " << format_double(eval_accuracy(model, data, mask_ptr))
                      << "\n";
            break;
        case TargetKind::Tmp:
            std::cout << "src = " << format_double(eval_src(model, data, mask_ptr, false)) << "\n";
            if (rank_src)
                std::cout << "src_rank = " << format_double(eval_src(model, data, mask_ptr, true))
                          << "\n";
            break;
        case TargetKind::Reg: break;
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out, const std::vector<std::string>& drop) {
    TrainedModel model = load_model(model_path);
    Dataset data = load_dataset(data_path);
    standardize_apply(model.stats, data);
    ModalityMask mask = drop_mask(model, drop);
    const ModalityMask* mask_ptr = drop.empty() ? nullptr : &mask;

    fs::create_directories(out);
    const std::string path = out + "/predictions.jsonl";
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write predictions file: " + path);
    MmvedModel net = instantiate(model);
    for (const auto& s : data.samples) {
        const Prediction p = net.predict(s, mask_ptr);
        nlohmann::json j;
        j["id"] = s.id;
        j["kind"] = to_string(p.kind);
        if (p.kind == TargetKind::Tmp) {
            j["y"] = p.sequence;
            j["t"] = s.target.sequence.timestamps;
        } else {
            j["y"] = p.value;
        }
        file << j.dump() << "\n";
    }
    std::cout << "predictions = " << path << "\n";
    return 0;
}

int cmd_sweep(const FlagOverrides& flags) {
    RunConfig cfg = load_config(flags);
    cfg.validate_keys(sweep_keys());
    const std::string out = out_dir(cfg);
    Dataset data = load_dataset(cfg.require_string("dataset"));

    SweepSpec spec;
    spec.param = cfg.get_string("sweep", "lambda");
    spec.values = cfg.get_double_list(spec.param == "tint" ? "tint_list" : "lambda_list");
    if (spec.values.empty())
        throw std::invalid_argument("sweep: missing or empty " +
                                    std::string(spec.param == "tint" ? "tint_list" : "lambda_list"));
    for (std::uint64_t s : cfg.get_size_list("seeds")) spec.seeds.push_back(s);
    if (spec.seeds.empty()) spec.seeds = {cfg.get_seed("seed", 0)};
    spec.base = train_config(cfg, data);
    const SplitRatios ratios = split_ratios(cfg);
    spec.train_ratio = ratios.train;
    spec.val_ratio = ratios.val;
    spec.test_ratio = ratios.test;

    std::vector<SweepRun> runs = run_sweep(spec, data);
    std::vector<SweepSummary> summary = summarize_sweep(spec, runs);
    write_sweep_runs_csv(out + "/sweep_runs.csv", spec, runs);
    write_sweep_summary_csv(out + "/sweep_summary.csv", spec, summary);
    std::cout << "runs = " << out << "/sweep_runs.csv\n";
    std::cout << "summary = " << out << "/sweep_summary.csv\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed) {
    const auto rows = run_gradcheck_suite(seed);
    bool ok = true;
    for (const auto& r : rows) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  max_err "
                  << format_double(r.max_err) << "  threshold " << format_double(r.threshold)
                  << "\n";
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmfuse: multimodal variational encoder-decoder toolkit"};
    app.require_subcommand(1);

    FlagOverrides flags;
    std::string model_path, data_path, predict_out;
    std::vector<std::string> drop;
    bool rank_src = false;
    std::uint64_t gradcheck_seed = 7;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "flat key = value config file");
        sub->add_option("--seed", flags.seed, "override the run seed");
        sub->add_option("--out", flags.out, "output directory");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic multimodal dataset");
    add_common(synth);

    CLI::App* train_cmd = app.add_subcommand("train", "train a model on a dataset");
    add_common(train_cmd);
    train_cmd->add_option("--lambda", flags.lambda, "override the KL weight");
    train_cmd->add_option("--decoder", flags.decoder, "decoder kind: cls|reg|tmp");
    train_cmd->add_flag("--deterministic-baseline", flags.deterministic_baseline,
                        "train the deterministic (MMDED) ablation");
    train_cmd->add_option("--include-prior", flags.include_prior,
                          "include the unit-Gaussian prior expert: true|false");

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a trained model on a dataset");
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--data", data_path, "dataset file")->required();
    eval_cmd->add_option("--drop-modalities", drop, "modalities to drop at evaluation")
        ->delimiter(',');
    eval_cmd->add_flag("--rank-src", rank_src, "also report the rank-based SRC variant");

    CLI::App* predict_cmd = app.add_subcommand("predict", "write per-sample predictions");
    predict_cmd->add_option("--model", model_path, "model file")->required();
    predict_cmd->add_option("--data", data_path, "dataset file")->required();
    predict_cmd->add_option("--out", predict_out, "output directory")->required();
    predict_cmd->add_option("--drop-modalities", drop, "modalities to drop")->delimiter(',');

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "train over a lambda or resample-interval grid");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--lambda", flags.lambda, "override the KL weight");
    sweep_cmd->add_option("--decoder", flags.decoder, "decoder kind: cls|reg|tmp");
    sweep_cmd->add_flag("--deterministic-baseline", flags.deterministic_baseline,
                        "sweep the deterministic (MMDED) ablation");
    sweep_cmd->add_option("--include-prior", flags.include_prior,
                          "include the prior expert: true|false");

    CLI::App* gradcheck_cmd =
        app.add_subcommand("gradcheck", "finite-difference verification of all gradients");
    gradcheck_cmd->add_option("--seed", gradcheck_seed, "seed for the random checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(flags);
        if (train_cmd->parsed()) return cmd_train(flags);
        if (eval_cmd->parsed()) return cmd_eval(model_path, data_path, drop, rank_src);
        if (predict_cmd->parsed()) return cmd_predict(model_path, data_path, predict_out, drop);
        if (sweep_cmd->parsed()) return cmd_sweep(flags);
        if (gradcheck_cmd->parsed()) return cmd_gradcheck(gradcheck_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
