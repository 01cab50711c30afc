#include "mmfuse/model.hpp"

#include <stdexcept>

namespace mmfuse {

ModalityMask mask_dropping(const EncoderSpec& spec, const std::vector<std::string>& dropped) {
    ModalityMask mask(spec.modalities.size(), true);
    for (const auto& name : dropped) {
        const int idx = spec.modality_index(name);
        if (idx < 0)
            throw std::invalid_argument("unknown modality in mask: '" + name + "'");
        mask[static_cast<std::size_t>(idx)] = false;
    }
    return mask;
}

MmvedModel::MmvedModel(const ModelSpec& spec) : spec_(spec) {
    if (spec_.encoder.modalities.empty())
        throw std::invalid_argument("MmvedModel: encoder spec has no modalities");
    if (spec_.encoder.hidden < 1 || spec_.encoder.latent < 1)
        throw std::invalid_argument("MmvedModel: hidden and latent dims must be >= 1");
    for (const auto& m : spec_.encoder.modalities) {
        encoders_.emplace_back("enc/" + m.name, m.input_dim, spec_.encoder.hidden,
                               spec_.encoder.latent);
        encoders_.back().register_params(params_);
    }
    decoder_ = DecoderNet(spec_.decoder, spec_.encoder.latent);
    decoder_.register_params(params_);
}

void MmvedModel::set_time_stats(double mean, double std) {
    decoder_.set_time_stats(mean, std);
    spec_.decoder.time_mean = decoder_.kind().time_mean;
    spec_.decoder.time_std = decoder_.kind().time_std;
}

std::vector<GaussianExpert> MmvedModel::encode_experts(const MultimodalSample& sample,
                                                       const ModalityMask* mask,
                                                       std::vector<std::size_t>* used,
                                                       std::vector<EncoderTrace>* traces) const {
    if (mask) check_dim(mask->size() == encoders_.size(), "modality mask length");
    std::vector<GaussianExpert> experts;
    for (std::size_t i = 0; i < encoders_.size(); ++i) {
        if (mask && !(*mask)[i]) continue;
        auto it = sample.modalities.find(spec_.encoder.modalities[i].name);
        if (it == sample.modalities.end()) continue;
        EncoderTrace trace;
        experts.push_back(encoders_[i].encode(params_, it->second, traces ? &trace : nullptr));
        if (used) used->push_back(i);
        if (traces) traces->push_back(std::move(trace));
    }
    return experts;
}

GaussianEmbedding MmvedModel::embed(const MultimodalSample& sample,
                                    const ModalityMask* mask) const {
    std::vector<GaussianExpert> experts = encode_experts(sample, mask);
    if (experts.empty()) {
        if (!spec_.encoder.include_prior)
            throw std::invalid_argument("sample '" + sample.id +
                                        "': all modalities missing and no prior expert");
        return GaussianEmbedding{Vec(spec_.encoder.latent, 0.0), Vec(spec_.encoder.latent, 1.0)};
    }
    return poe_fuse(experts, spec_.encoder.include_prior);
}

MmvedModel::SampleLoss MmvedModel::train_sample(const MultimodalSample& sample,
                                                const std::vector<Vec>& noises, double lambda,
                                                bool deterministic, double weight) {
    std::vector<std::size_t> used;
    std::vector<EncoderTrace> traces;
    std::vector<GaussianExpert> experts = encode_experts(sample, nullptr, &used, &traces);

    GaussianEmbedding fused;
    if (experts.empty()) {
        if (!spec_.encoder.include_prior)
            throw std::invalid_argument("sample '" + sample.id +
                                        "': all modalities missing and no prior expert");
        fused = GaussianEmbedding{Vec(spec_.encoder.latent, 0.0), Vec(spec_.encoder.latent, 1.0)};
    } else {
        fused = poe_fuse(experts, spec_.encoder.include_prior);
    }

    SampleLoss out;
    out.kl = kl_standard_normal(fused);

    const std::size_t dim = fused.dim();
    Vec dmean(dim, 0.0), dstd(dim, 0.0);

    if (deterministic) {
        DecodeTrace trace;
        out.dec_loss = decoder_.forward_loss(params_, fused.mean, sample.target, trace);
        Vec dz = decoder_.backward(params_, trace, sample.target, weight);
        axpy(1.0, dz, dmean);
    } else {
        if (noises.empty()) throw std::invalid_argument("train_sample: no noise draws given");
        const double inv_draws = 1.0 / static_cast<double>(noises.size());
        for (const Vec& eps : noises) {
            Vec z = reparameterize(fused, eps);
            DecodeTrace trace;
            out.dec_loss +=
                inv_draws * decoder_.forward_loss(params_, z, sample.target, trace);
            Vec dz = decoder_.backward(params_, trace, sample.target, weight * inv_draws);
            for (std::size_t d = 0; d < dim; ++d) {
                dmean[d] += dz[d];
                dstd[d] += dz[d] * eps[d];
            }
        }
        kl_standard_normal_backward(fused, weight * lambda, dmean, dstd);
    }

    if (!experts.empty()) {
        std::vector<GaussianExpert> expert_grads =
            poe_fuse_backward(experts, spec_.encoder.include_prior, fused, dmean, dstd);
        for (std::size_t j = 0; j < used.size(); ++j)
            encoders_[used[j]].backward(params_, traces[j], expert_grads[j].mean,
                                        expert_grads[j].std);
    }
    return out;
}

Prediction MmvedModel::predict(const MultimodalSample& sample, const ModalityMask* mask) const {
    const GaussianEmbedding emb = embed(sample, mask);
    Prediction p;
    p.kind = spec_.decoder.kind;
    switch (spec_.decoder.kind) {
        case TargetKind::Cls: p.value = decoder_.classify(params_, emb.mean); break;
        case TargetKind::Reg: p.value = decoder_.regress(params_, emb.mean); break;
        case TargetKind::Tmp:
            if (sample.target.kind != TargetKind::Tmp)
                throw std::invalid_argument("temporal prediction needs the sample's timestamps");
            p.sequence = decoder_.temporal(params_, emb.mean, sample.target.sequence.timestamps);
            break;
    }
    return p;
}

BatchLoss batch_loss_and_grad(MmvedModel& model, const std::vector<const MultimodalSample*>& batch,
                              const std::vector<std::vector<Vec>>& noises, double lambda,
                              bool deterministic) {
    if (batch.empty()) throw std::invalid_argument("batch_loss_and_grad: empty batch");
    if (!deterministic) check_dim(noises.size() == batch.size(), "batch noise count");
    const double weight = 1.0 / static_cast<double>(batch.size());
    BatchLoss loss;
    static const std::vector<Vec> no_noise;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        MmvedModel::SampleLoss s = model.train_sample(
            *batch[i], deterministic ? no_noise : noises[i], lambda, deterministic, weight);
        loss.dec_mean += weight * s.dec_loss;
        loss.kl_mean += weight * s.kl;
    }
    return loss;
}

}  // namespace mmfuse
