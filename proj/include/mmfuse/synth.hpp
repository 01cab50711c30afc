#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmfuse/dataset.hpp"
#include "mmfuse/matrix.hpp"

namespace mmfuse {

// Synthetic multimodal popularity generator. Every modality is a noisy
// linear view of the same latent draw, padded with unit-normal distractor
// dimensions, so the information each modality carries (and how redundant the
// modalities are) is controlled exactly.
struct SynthConfig {
    std::size_t n = 1000;
    std::size_t latent_dim = 4;
    std::vector<std::size_t> modality_dims = {8};   // informative dims per modality
    std::vector<double> noise_scales = {0.0};       // eta_i per modality
    std::vector<std::size_t> distractor_dims = {0}; // pure-noise dims per modality
    TargetKind kind = TargetKind::Reg;
    std::size_t seq_len = 9;       // T (TMP)
    double base_interval = 8.0;    // hours between sequence points (TMP)
    double shape_tau = 0.0;        // peak hour of the temporal shape; 0 = base_interval
    double label_flip_prob = 0.0;  // CLS
    double target_noise = 0.1;     // scale of the target-side noise
    std::uint64_t seed = 0;

    std::size_t modality_count() const { return modality_dims.size(); }
};

void validate(const SynthConfig& cfg);

struct SynthModalityMeta {
    std::string name;
    Matrix mixing;  // informative_dim x latent_dim
    Vec offset;
    double noise_scale = 0.0;
    std::size_t distractor_dims = 0;
};

// Everything an oracle needs to reconstruct the generative process.
struct SynthMeta {
    TargetKind kind = TargetKind::Reg;
    std::size_t latent_dim = 0;
    Vec readout;  // w: target = f(readout . z*)
    double target_noise = 0.0;
    double label_flip_prob = 0.0;
    double shape_tau = 0.0;  // peak position of the temporal shape (TMP)
    std::uint64_t seed = 0;
    std::vector<SynthModalityMeta> modalities;
};

struct SynthResult {
    Dataset dataset;
    SynthMeta meta;
};

// Temporal shape s(t) = (t/tau) * exp(1 - t/tau): unit peak at t = tau (the
// first sequence point), decaying afterwards.
double temporal_shape(double t, double tau);

SynthResult synth_generate(const SynthConfig& cfg);

void save_synth_meta(const std::string& path, const SynthMeta& meta);
SynthMeta load_synth_meta(const std::string& path);

}  // namespace mmfuse
