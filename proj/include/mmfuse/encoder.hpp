#pragma once

#include <string>
#include <vector>

#include "mmfuse/dense.hpp"
#include "mmfuse/gaussian.hpp"
#include "mmfuse/param_store.hpp"

namespace mmfuse {

// log-std head outputs are clamped to this band before exponentiation so
// precisions in the PoE product stay representable.
inline constexpr double kLogStdClamp = 7.0;

struct ModalitySpec {
    std::string name;
    std::size_t input_dim = 0;
};

struct EncoderSpec {
    std::vector<ModalitySpec> modalities;
    std::size_t hidden = 32;  // width of the one hidden layer
    std::size_t latent = 8;   // D
    bool include_prior = true;

    std::size_t total_input_dim() const;
    // index of a modality by name, -1 if absent
    int modality_index(const std::string& name) const;
};

struct EncoderTrace {
    DenseCache hidden;
    DenseCache mean_head;
    DenseCache logstd_head;
    Vec logstd_raw;  // before the clamp
    GaussianExpert out;
};

// One hidden relu layer, then linear mean and log-std heads;
// std = exp(clamp(log-std, -kLogStdClamp, +kLogStdClamp)).
// Used both per modality (Gaussian expert) and for the early-fusion baseline
// (Gaussian embedding over the concatenated input).
class GaussianEncoderNet {
public:
    GaussianEncoderNet() = default;
    GaussianEncoderNet(const std::string& name, std::size_t input_dim, std::size_t hidden,
                       std::size_t latent);

    void register_params(ParamStore& store) const;

    GaussianExpert encode(const ParamStore& store, const Vec& features,
                          EncoderTrace* trace = nullptr) const;
    // accumulates parameter grads; returns dL/d(features)
    Vec backward(ParamStore& store, const EncoderTrace& trace, const Vec& dmean,
                 const Vec& dstd) const;

    std::size_t input_dim() const { return hidden_.in_dim(); }
    std::size_t latent_dim() const { return mean_head_.out_dim(); }

private:
    DenseLayer hidden_;
    DenseLayer mean_head_;
    DenseLayer logstd_head_;
};

// Baseline encoder over the concatenation of all modality features, in
// modality declaration order.
GaussianEmbedding early_fuse_encode(const GaussianEncoderNet& net, const ParamStore& store,
                                    const Vec& concatenated, EncoderTrace* trace = nullptr);

}  // namespace mmfuse
