#pragma once

#include <vector>

#include "mmfuse/dense.hpp"
#include "mmfuse/lstm.hpp"
#include "mmfuse/param_store.hpp"
#include "mmfuse/target.hpp"

namespace mmfuse {

// sigmoid outputs are clamped into [kProbClamp, 1-kProbClamp] before the
// cross-entropy so the loss stays finite
inline constexpr double kProbClamp = 1e-7;

double bce_loss(double p, double label);

// Decoder family selector plus its settings. time_mean/time_std standardize
// the absolute timestep fed to the temporal decoder; they are fit on the
// training split's timestamps.
struct DecoderKind {
    TargetKind kind = TargetKind::Reg;
    std::size_t head_hidden = 16;  // CLS/REG MLP hidden width
    std::size_t tmp_hidden = 8;    // LSTM state size
    double time_mean = 0.0;
    double time_std = 1.0;
};

struct DecodeTrace {
    // CLS / REG
    DenseCache head_hidden;
    DenseCache head_out;
    double raw_out = 0.0;  // pre-sigmoid logit for CLS, prediction for REG
    // TMP
    DenseCache init_h, init_c;
    std::vector<LstmCache> steps;
    std::vector<DenseCache> out_steps;
    Vec outputs;
    Vec std_times;
};

// The three variational decoder heads behind one parameter namespace.
// CLS: sigmoid(MLP(z)) with binary cross-entropy.
// REG: MLP(z) with squared error.
// TMP: dense tanh layers map z to the LSTM's initial hidden and cell state;
//      each step consumes only the standardized absolute time; a linear map
//      reads the per-step prediction off the hidden state. Per-step squared
//      errors are summed. Predictions are never fed back in.
class DecoderNet {
public:
    DecoderNet() = default;
    DecoderNet(const DecoderKind& kind, std::size_t latent_dim);

    void register_params(ParamStore& store) const;

    const DecoderKind& kind() const { return kind_; }
    void set_time_stats(double mean, double std);

    // deterministic decodes
    double classify(const ParamStore& store, const Vec& z) const;
    double regress(const ParamStore& store, const Vec& z) const;
    Vec temporal(const ParamStore& store, const Vec& z, const Vec& timestamps) const;

    // training-side: loss for one sample with a trace for the backward pass
    double forward_loss(const ParamStore& store, const Vec& z, const PopularityTarget& target,
                        DecodeTrace& trace) const;
    // accumulates parameter grads scaled by `scale`; returns scale * dL/dz
    Vec backward(ParamStore& store, const DecodeTrace& trace, const PopularityTarget& target,
                 double scale) const;

private:
    Vec temporal_forward(const ParamStore& store, const Vec& z, const Vec& timestamps,
                         DecodeTrace* trace) const;

    DecoderKind kind_;
    std::size_t latent_ = 0;
    // CLS / REG
    DenseLayer head_hidden_;
    DenseLayer head_out_;
    // TMP
    DenseLayer init_h_;
    DenseLayer init_c_;
    LstmLayer lstm_;
    DenseLayer step_out_;
};

}  // namespace mmfuse
