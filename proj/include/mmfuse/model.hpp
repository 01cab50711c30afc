#pragma once

#include <string>
#include <vector>

#include "mmfuse/dataset.hpp"
#include "mmfuse/decoders.hpp"
#include "mmfuse/encoder.hpp"
#include "mmfuse/gaussian.hpp"
#include "mmfuse/ib.hpp"
#include "mmfuse/param_store.hpp"

namespace mmfuse {

struct ModelSpec {
    EncoderSpec encoder;
    DecoderKind decoder;
};

struct Prediction {
    TargetKind kind = TargetKind::Reg;
    double value = 0.0;  // probability for Cls, scalar for Reg
    Vec sequence;        // Tmp
};

// availability mask aligned with the encoder spec's modality order
using ModalityMask = std::vector<bool>;

// Builds a mask that drops the named modalities; errors on names the spec
// does not contain.
ModalityMask mask_dropping(const EncoderSpec& spec, const std::vector<std::string>& dropped);

// The full pipeline: per-modality Gaussian encoders, product-of-experts
// fusion, reparameterized latent, one decoder head. Forward and backward are
// explicit; parameters live in one ParamStore.
class MmvedModel {
public:
    MmvedModel() = default;
    explicit MmvedModel(const ModelSpec& spec);

    void init_params(Rng& rng) { params_.init_glorot(rng); }

    const ModelSpec& spec() const { return spec_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    std::size_t latent_dim() const { return spec_.encoder.latent; }

    void set_time_stats(double mean, double std);

    // Experts for the modalities that are present in the sample and allowed
    // by the mask (nullptr = all). `used` receives spec indices.
    std::vector<GaussianExpert> encode_experts(const MultimodalSample& sample,
                                               const ModalityMask* mask = nullptr,
                                               std::vector<std::size_t>* used = nullptr,
                                               std::vector<EncoderTrace>* traces = nullptr) const;

    // Fused embedding; the prior alone if every modality is missing/masked
    // (include_prior required then).
    GaussianEmbedding embed(const MultimodalSample& sample,
                            const ModalityMask* mask = nullptr) const;

    struct SampleLoss {
        double dec_loss = 0.0;  // decoder loss, averaged over the MC draws
        double kl = 0.0;
    };

    // Forward + backward for one sample. Parameter gradients are accumulated
    // scaled by `weight` (the caller's 1/batch factor). `noises` holds one
    // standard-normal vector per MC draw; when `deterministic` is set the
    // draws are ignored, z is the fused mean and no KL gradient is applied.
    SampleLoss train_sample(const MultimodalSample& sample, const std::vector<Vec>& noises,
                            double lambda, bool deterministic, double weight);

    // Deterministic prediction from the fused mean. Never samples.
    Prediction predict(const MultimodalSample& sample, const ModalityMask* mask = nullptr) const;

    const DecoderNet& decoder() const { return decoder_; }

private:
    ModelSpec spec_;
    std::vector<GaussianEncoderNet> encoders_;  // one per modality, spec order
    DecoderNet decoder_;
    ParamStore params_;
};

// Mean batch loss with gradients, used by the trainer and the gradient
// checker. noises[i] holds the MC draws for batch sample i (ignored when
// deterministic).
struct BatchLoss {
    double dec_mean = 0.0;
    double kl_mean = 0.0;
};
BatchLoss batch_loss_and_grad(MmvedModel& model,
                              const std::vector<const MultimodalSample*>& batch,
                              const std::vector<std::vector<Vec>>& noises, double lambda,
                              bool deterministic);

}  // namespace mmfuse
