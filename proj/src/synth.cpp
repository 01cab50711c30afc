#include "mmfuse/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mmfuse/rng.hpp"

namespace mmfuse {

using nlohmann::json;

void validate(const SynthConfig& cfg) {
    if (cfg.n < 1 || cfg.latent_dim < 1) throw std::invalid_argument("synth: n, latent_dim >= 1");
    if (cfg.modality_dims.empty()) throw std::invalid_argument("synth: need >= 1 modality");
    if (cfg.noise_scales.size() != cfg.modality_count() ||
        cfg.distractor_dims.size() != cfg.modality_count())
        throw std::invalid_argument("synth: noise_scales and distractor_dims must have one entry "
                                    "per modality");
    for (std::size_t d : cfg.modality_dims)
        if (d < 1) throw std::invalid_argument("synth: modality dims >= 1");
    for (double e : cfg.noise_scales)
        if (e < 0.0) throw std::invalid_argument("synth: noise scales >= 0");
    if (cfg.label_flip_prob < 0.0 || cfg.label_flip_prob > 0.5)
        throw std::invalid_argument("synth: label_flip_prob in [0, 0.5]");
    if (cfg.target_noise < 0.0) throw std::invalid_argument("synth: target_noise >= 0");
    if (cfg.kind == TargetKind::Tmp && (cfg.seq_len < 1 || !(cfg.base_interval > 0.0)))
        throw std::invalid_argument("synth: TMP needs seq_len >= 1 and base_interval > 0");
    if (cfg.shape_tau < 0.0) throw std::invalid_argument("synth: shape_tau >= 0");
}

double temporal_shape(double t, double tau) { return (t / tau) * std::exp(1.0 - t / tau); }

namespace {

std::string modality_name(std::size_t i, std::size_t count) {
    std::size_t width = 1;
    for (std::size_t c = count - 1; c >= 10; c /= 10) ++width;
    std::string digits = std::to_string(i);
    return "m" + std::string(width - digits.size(), '0') + digits;
}

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

}  // namespace

SynthResult synth_generate(const SynthConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    const std::size_t k = cfg.modality_count();
    const double latent_scale = 1.0 / std::sqrt(static_cast<double>(cfg.latent_dim));

    SynthResult result;
    SynthMeta& meta = result.meta;
    meta.kind = cfg.kind;
    meta.latent_dim = cfg.latent_dim;
    meta.target_noise = cfg.target_noise;
    meta.label_flip_prob = cfg.label_flip_prob;
    meta.shape_tau = cfg.shape_tau > 0.0 ? cfg.shape_tau : cfg.base_interval;
    meta.seed = cfg.seed;

    // dataset-level draws: mixing maps, offsets, readout
    for (std::size_t i = 0; i < k; ++i) {
        SynthModalityMeta m;
        m.name = modality_name(i, k);
        m.mixing = Matrix(cfg.modality_dims[i], cfg.latent_dim);
        for (double& v : m.mixing.values()) v = rng.normal() * latent_scale;
        m.offset.resize(cfg.modality_dims[i]);
        for (double& v : m.offset) v = rng.normal();
        m.noise_scale = cfg.noise_scales[i];
        m.distractor_dims = cfg.distractor_dims[i];
        meta.modalities.push_back(std::move(m));
    }
    meta.readout.resize(cfg.latent_dim);
    for (double& v : meta.readout) v = rng.normal() * latent_scale;

    Dataset& ds = result.dataset;
    ds.kind = cfg.kind;
    for (std::size_t i = 0; i < k; ++i)
        ds.schema.push_back({meta.modalities[i].name,
                             cfg.modality_dims[i] + cfg.distractor_dims[i]});

    char id_buf[24];
    for (std::size_t s = 0; s < cfg.n; ++s) {
        MultimodalSample sample;
        std::snprintf(id_buf, sizeof(id_buf), "s%06zu", s);
        sample.id = id_buf;

        Vec latent(cfg.latent_dim);
        for (double& v : latent) v = rng.normal();

        for (std::size_t i = 0; i < k; ++i) {
            const SynthModalityMeta& m = meta.modalities[i];
            Vec feat = matvec(m.mixing, latent);
            for (std::size_t d = 0; d < feat.size(); ++d)
                feat[d] += m.offset[d] + m.noise_scale * rng.normal();
            for (std::size_t d = 0; d < m.distractor_dims; ++d) feat.push_back(rng.normal());
            sample.modalities[m.name] = std::move(feat);
        }

        const double score = dot(meta.readout, latent);
        switch (cfg.kind) {
            case TargetKind::Reg:
                sample.target = PopularityTarget::real(score + cfg.target_noise * rng.normal());
                break;
            case TargetKind::Cls: {
                double label = score > 0.0 ? 1.0 : 0.0;
                if (rng.uniform() < cfg.label_flip_prob) label = 1.0 - label;
                sample.target = PopularityTarget::binary(label);
                break;
            }
            case TargetKind::Tmp: {
                SequenceTarget seq;
                const double level = softplus(score);
                for (std::size_t t = 0; t < cfg.seq_len; ++t) {
                    const double ts = cfg.base_interval * static_cast<double>(t + 1);
                    seq.timestamps.push_back(ts);
                    seq.values.push_back(level * temporal_shape(ts, meta.shape_tau) +
                                         cfg.target_noise * rng.normal());
                }
                sample.target = PopularityTarget::temporal(std::move(seq));
                break;
            }
        }
        ds.samples.push_back(std::move(sample));
    }
    return result;
}

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const std::size_t rows = j.size();
    const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

}  // namespace

void save_synth_meta(const std::string& path, const SynthMeta& meta) {
    json j;
    j["kind"] = to_string(meta.kind);
    j["latent_dim"] = meta.latent_dim;
    j["readout"] = meta.readout;
    j["target_noise"] = meta.target_noise;
    j["label_flip_prob"] = meta.label_flip_prob;
    j["shape_tau"] = meta.shape_tau;
    j["seed"] = meta.seed;
    j["modalities"] = json::array();
    for (const auto& m : meta.modalities) {
        json mj;
        mj["name"] = m.name;
        mj["mixing"] = matrix_to_json(m.mixing);
        mj["offset"] = m.offset;
        mj["noise_scale"] = m.noise_scale;
        mj["distractor_dims"] = m.distractor_dims;
        j["modalities"].push_back(std::move(mj));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metadata file: " + path);
    out << j.dump(2) << "\n";
}

SynthMeta load_synth_meta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metadata file: " + path);
    json j = json::parse(in);
    SynthMeta meta;
    meta.kind = target_kind_from_string(j.at("kind").get<std::string>());
    meta.latent_dim = j.at("latent_dim").get<std::size_t>();
    meta.readout = j.at("readout").get<Vec>();
    meta.target_noise = j.at("target_noise").get<double>();
    meta.label_flip_prob = j.at("label_flip_prob").get<double>();
    meta.shape_tau = j.at("shape_tau").get<double>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& mj : j.at("modalities")) {
        SynthModalityMeta m;
        m.name = mj.at("name").get<std::string>();
        m.mixing = matrix_from_json(mj.at("mixing"));
        m.offset = mj.at("offset").get<Vec>();
        m.noise_scale = mj.at("noise_scale").get<double>();
        m.distractor_dims = mj.at("distractor_dims").get<std::size_t>();
        meta.modalities.push_back(std::move(m));
    }
    return meta;
}

}  // namespace mmfuse
