#include "mmfuse/trainer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mmfuse/adam.hpp"
#include "mmfuse/metrics.hpp"

namespace mmfuse {

using nlohmann::json;

void validate(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw std::invalid_argument("train config: epochs >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("train config: batch_size >= 1");
    if (!(cfg.lr_end > 0.0) || !(cfg.lr_end <= cfg.lr_start))
        throw std::invalid_argument("train config: need 0 < lr_end <= lr_start");
    if (cfg.lambda < 0.0) throw std::invalid_argument("train config: lambda >= 0");
    if (cfg.mc_samples < 1) throw std::invalid_argument("train config: mc_samples >= 1");
    if (cfg.latent < 1 || cfg.encoder_hidden < 1 || cfg.head_hidden < 1 || cfg.tmp_hidden < 1)
        throw std::invalid_argument("train config: network dims >= 1");
}

namespace {

ModelSpec build_spec(const Dataset& train_split, const TrainConfig& cfg) {
    ModelSpec spec;
    for (const auto& m : train_split.schema) spec.encoder.modalities.push_back({m.name, m.dim});
    spec.encoder.hidden = cfg.encoder_hidden;
    spec.encoder.latent = cfg.latent;
    spec.encoder.include_prior = cfg.include_prior;
    spec.decoder.kind = cfg.decoder;
    spec.decoder.head_hidden = cfg.head_hidden;
    spec.decoder.tmp_hidden = cfg.tmp_hidden;
    return spec;
}

// population mean/std over every timestamp in the training targets
void fit_time_stats(const Dataset& train_split, double& mean, double& std) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : train_split.samples) {
        for (double t : s.target.sequence.timestamps) sum += t;
        count += s.target.sequence.timestamps.size();
    }
    if (count == 0) throw std::invalid_argument("train: temporal dataset has no timestamps");
    mean = sum / static_cast<double>(count);
    double var = 0.0;
    for (const auto& s : train_split.samples)
        for (double t : s.target.sequence.timestamps) var += (t - mean) * (t - mean);
    std = std::sqrt(var / static_cast<double>(count));
}

double validation_metric(const MmvedModel& model, const Dataset& val) {
    switch (model.spec().decoder.kind) {
        case TargetKind::Cls: {
            double bce = 0.0;
            for (const auto& s : val.samples)
                bce += bce_loss(model.predict(s).value, s.target.scalar);
            return bce / static_cast<double>(val.size());
        }
        case TargetKind::Reg: {
            Vec y, yhat;
            for (const auto& s : val.samples) {
                y.push_back(s.target.scalar);
                yhat.push_back(model.predict(s).value);
            }
            return nmse(y, yhat);
        }
        case TargetKind::Tmp: {
            std::vector<Vec> y, yhat;
            for (const auto& s : val.samples) {
                y.push_back(s.target.sequence.values);
                yhat.push_back(model.predict(s).sequence);
            }
            return nmse_tmp(y, yhat);
        }
    }
    return 0.0;
}

TrainResult run_training(const Dataset& train_split, const Dataset& val_split,
                         const StandardizationStats& stats, const TrainConfig& cfg) {
    validate(cfg);
    if (train_split.empty() || val_split.empty())
        throw std::invalid_argument("train: empty split");
    if (train_split.kind != cfg.decoder)
        throw std::invalid_argument("train: dataset target kind is " +
                                    to_string(train_split.kind) + " but decoder is " +
                                    to_string(cfg.decoder));

    MmvedModel model(build_spec(train_split, cfg));
    if (cfg.decoder == TargetKind::Tmp) {
        double tm = 0.0, ts = 1.0;
        fit_time_stats(train_split, tm, ts);
        model.set_time_stats(tm, ts);
    }

    Rng rng(cfg.seed);
    model.init_params(rng);
    AdamState adam = AdamState::for_store(model.params());

    const std::size_t n = train_split.size();
    const std::size_t latent = model.latent_dim();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    TrainResult result;
    result.history.epochs.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double frac =
            cfg.epochs == 1 ? 0.0
                            : static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
        const double lr = cfg.lr_start * (1.0 - frac) + cfg.lr_end * frac;

        // epoch-level shuffle, then sequential batches
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

        double epoch_dec = 0.0, epoch_kl = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
            const std::size_t end = std::min(start + cfg.batch_size, n);
            if (end == start) continue;
            std::vector<const MultimodalSample*> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i)
                batch.push_back(&train_split.samples[order[i]]);

            std::vector<std::vector<Vec>> noises;
            if (!cfg.deterministic_baseline) {
                noises.resize(batch.size());
                for (auto& per_sample : noises) {
                    per_sample.resize(cfg.mc_samples);
                    for (auto& draw : per_sample) {
                        draw.resize(latent);
                        for (double& v : draw) v = rng.normal();
                    }
                }
            }

            model.params().zero_grads();
            BatchLoss loss = batch_loss_and_grad(model, batch, noises, cfg.lambda,
                                                 cfg.deterministic_baseline);
            if (!std::isfinite(loss.dec_mean) || !std::isfinite(loss.kl_mean))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(batch_index));
            adam_step(model.params(), adam, lr);

            const double w = static_cast<double>(batch.size());
            epoch_dec += loss.dec_mean * w;
            epoch_kl += loss.kl_mean * w;
        }

        const double ell = -epoch_dec / static_cast<double>(n);
        const double kl = epoch_kl / static_cast<double>(n);
        const LossBreakdown breakdown =
            iblbo_loss(ell, kl, cfg.deterministic_baseline ? 0.0 : cfg.lambda);
        EpochRecord rec;
        rec.lr = lr;
        rec.train_total = breakdown.total;
        rec.train_ell = breakdown.ell;
        rec.train_kl = breakdown.kl;
        rec.val_metric = validation_metric(model, val_split);
        result.history.epochs.push_back(rec);
    }

    result.model.spec = model.spec();
    result.model.params = model.params();
    result.model.stats = stats;
    result.model.lambda = cfg.lambda;
    result.model.deterministic_baseline = cfg.deterministic_baseline;
    return result;
}

}  // namespace

TrainResult train(const Dataset& train_split, const Dataset& val_split,
                  const StandardizationStats& stats, const TrainConfig& cfg) {
    return run_training(train_split, val_split, stats, cfg);
}

TrainResult train_deterministic_baseline(const Dataset& train_split, const Dataset& val_split,
                                         const StandardizationStats& stats,
                                         const TrainConfig& cfg) {
    TrainConfig det = cfg;
    det.deterministic_baseline = true;
    return run_training(train_split, val_split, stats, det);
}

MmvedModel instantiate(const TrainedModel& model) {
    MmvedModel net(model.spec);
    net.params() = model.params;
    return net;
}

Prediction predict(const TrainedModel& model, const MultimodalSample& sample,
                   const ModalityMask* mask) {
    return instantiate(model).predict(sample, mask);
}

double eval_metric(const TrainedModel& model, const Dataset& split, const ModalityMask* mask) {
    MmvedModel net = instantiate(model);
    switch (model.spec.decoder.kind) {
        case TargetKind::Cls: {
            double bce = 0.0;
            for (const auto& s : split.samples)
                bce += bce_loss(net.predict(s, mask).value, s.target.scalar);
            return bce / static_cast<double>(split.size());
        }
        case TargetKind::Reg: {
            Vec y, yhat;
            for (const auto& s : split.samples) {
                y.push_back(s.target.scalar);
                yhat.push_back(net.predict(s, mask).value);
            }
            return nmse(y, yhat);
        }
        case TargetKind::Tmp: {
            std::vector<Vec> y, yhat;
            for (const auto& s : split.samples) {
                y.push_back(s.target.sequence.values);
                yhat.push_back(net.predict(s, mask).sequence);
            }
            return nmse_tmp(y, yhat);
        }
    }
    return 0.0;
}

double eval_src(const TrainedModel& model, const Dataset& split, const ModalityMask* mask,
                bool use_ranks) {
    if (model.spec.decoder.kind != TargetKind::Tmp)
        throw std::invalid_argument("eval_src: SRC is defined for temporal predictions");
    MmvedModel net = instantiate(model);
    std::vector<Vec> y, yhat;
    for (const auto& s : split.samples) {
        y.push_back(s.target.sequence.values);
        yhat.push_back(net.predict(s, mask).sequence);
    }
    return src(y, yhat, use_ranks);
}

double eval_accuracy(const TrainedModel& model, const Dataset& split, const ModalityMask* mask) {
    if (model.spec.decoder.kind != TargetKind::Cls)
        throw std::invalid_argument("eval_accuracy: accuracy is defined for classification");
    MmvedModel net = instantiate(model);
    std::size_t correct = 0;
    for (const auto& s : split.samples) {
        const double p = net.predict(s, mask).value;
        if ((p > 0.5 ? 1.0 : 0.0) == s.target.scalar) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.size());
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void save_history(const std::string& path, const TrainHistory& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write history file: " + path);
    out << "epoch,lr,train_total,train_ell,train_kl,val_metric\n";
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        const EpochRecord& r = history.epochs[e];
        out << e << ',' << format_double(r.lr) << ',' << format_double(r.train_total) << ','
            << format_double(r.train_ell) << ',' << format_double(r.train_kl) << ','
            << format_double(r.val_metric) << "\n";
    }
}

void save_model(const std::string& path, const TrainedModel& model) {
    json j;
    j["format"] = "mmfuse-model";
    j["version"] = 1;
    json enc;
    enc["hidden"] = model.spec.encoder.hidden;
    enc["latent"] = model.spec.encoder.latent;
    enc["include_prior"] = model.spec.encoder.include_prior;
    enc["modalities"] = json::array();
    for (const auto& m : model.spec.encoder.modalities)
        enc["modalities"].push_back({{"name", m.name}, {"dim", m.input_dim}});
    j["encoder"] = enc;
    json dec;
    dec["kind"] = to_string(model.spec.decoder.kind);
    dec["head_hidden"] = model.spec.decoder.head_hidden;
    dec["tmp_hidden"] = model.spec.decoder.tmp_hidden;
    dec["time_mean"] = model.spec.decoder.time_mean;
    dec["time_std"] = model.spec.decoder.time_std;
    j["decoder"] = dec;
    j["lambda"] = model.lambda;
    j["deterministic_baseline"] = model.deterministic_baseline;
    json st;
    st["names"] = model.stats.names;
    st["mean"] = model.stats.mean;
    st["std"] = model.stats.std;
    j["standardization"] = st;
    j["params"] = json::array();
    for (const auto& slot : model.params) {
        json pj;
        pj["name"] = slot.name;
        pj["rows"] = slot.value.rows();
        pj["cols"] = slot.value.cols();
        pj["bias"] = slot.is_bias;
        pj["values"] = slot.value.values();
        j["params"].push_back(std::move(pj));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << j.dump() << "\n";
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    json j = json::parse(in);
    if (j.at("format").get<std::string>() != "mmfuse-model")
        throw std::runtime_error(path + ": not a model file");
    if (j.at("version").get<int>() != 1)
        throw std::runtime_error(path + ": unsupported model version");

    TrainedModel tm;
    const json& enc = j.at("encoder");
    tm.spec.encoder.hidden = enc.at("hidden").get<std::size_t>();
    tm.spec.encoder.latent = enc.at("latent").get<std::size_t>();
    tm.spec.encoder.include_prior = enc.at("include_prior").get<bool>();
    for (const auto& m : enc.at("modalities"))
        tm.spec.encoder.modalities.push_back(
            {m.at("name").get<std::string>(), m.at("dim").get<std::size_t>()});
    const json& dec = j.at("decoder");
    tm.spec.decoder.kind = target_kind_from_string(dec.at("kind").get<std::string>());
    tm.spec.decoder.head_hidden = dec.at("head_hidden").get<std::size_t>();
    tm.spec.decoder.tmp_hidden = dec.at("tmp_hidden").get<std::size_t>();
    tm.spec.decoder.time_mean = dec.at("time_mean").get<double>();
    tm.spec.decoder.time_std = dec.at("time_std").get<double>();
    tm.lambda = j.at("lambda").get<double>();
    tm.deterministic_baseline = j.at("deterministic_baseline").get<bool>();
    const json& st = j.at("standardization");
    tm.stats.names = st.at("names").get<std::vector<std::string>>();
    tm.stats.mean = st.at("mean").get<std::vector<Vec>>();
    tm.stats.std = st.at("std").get<std::vector<Vec>>();

    // rebuild the slot layout from the spec, then fill values by name
    MmvedModel net(tm.spec);
    for (const auto& pj : j.at("params")) {
        const std::string name = pj.at("name").get<std::string>();
        if (!net.params().has(name))
            throw std::runtime_error(path + ": unexpected parameter slot '" + name + "'");
        ParamSlot& slot = net.params().slot(name);
        if (slot.value.rows() != pj.at("rows").get<std::size_t>() ||
            slot.value.cols() != pj.at("cols").get<std::size_t>())
            throw std::runtime_error(path + ": shape mismatch for slot '" + name + "'");
        slot.value.values() = pj.at("values").get<Vec>();
    }
    if (j.at("params").size() != net.params().size())
        throw std::runtime_error(path + ": parameter slot count mismatch");
    tm.params = net.params();
    return tm;
}

}  // namespace mmfuse
