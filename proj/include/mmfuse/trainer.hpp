#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmfuse/dataset.hpp"
#include "mmfuse/model.hpp"

namespace mmfuse {

struct TrainConfig {
    std::size_t epochs = 50;
    std::size_t batch_size = 128;
    double lr_start = 5e-4;
    double lr_end = 5e-5;
    double lambda = 0.3;
    std::size_t mc_samples = 1;  // L
    std::uint64_t seed = 0;
    TargetKind decoder = TargetKind::Reg;
    bool deterministic_baseline = false;  // MMDED: z = fused mean, KL dropped
    bool include_prior = true;
    // network sizes
    std::size_t encoder_hidden = 32;
    std::size_t latent = 8;  // D
    std::size_t head_hidden = 16;
    std::size_t tmp_hidden = 8;
};

void validate(const TrainConfig& cfg);

struct EpochRecord {
    double lr = 0.0;
    double train_total = 0.0;
    double train_ell = 0.0;
    double train_kl = 0.0;
    double val_metric = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

// Everything needed to evaluate the model later: architecture, weights,
// feature standardization of the training run, and the lambda it was trained
// with.
struct TrainedModel {
    ModelSpec spec;
    ParamStore params;
    StandardizationStats stats;
    double lambda = 0.0;
    bool deterministic_baseline = false;
};

struct TrainResult {
    TrainedModel model;
    TrainHistory history;
};

// Minibatch training of the IBLBO objective: encode each modality, fuse by
// product of experts, add lambda-weighted KL, reparameterize with L draws,
// decode, Adam step. The learning rate interpolates linearly from lr_start
// (first epoch) to lr_end (last epoch). Fully reproducible given the seed.
// Both splits must already be standardized; `stats` is stored in the result.
TrainResult train(const Dataset& train_split, const Dataset& val_split,
                  const StandardizationStats& stats, const TrainConfig& cfg);

// MMDED ablation: identical pipeline with z fixed to the fused mean and the
// KL term dropped from the loss.
TrainResult train_deterministic_baseline(const Dataset& train_split, const Dataset& val_split,
                                         const StandardizationStats& stats,
                                         const TrainConfig& cfg);

// Rebuilds the network around the trained weights (e.g. for repeated
// predictions without per-call construction).
MmvedModel instantiate(const TrainedModel& model);

// Deterministic prediction for one standardized sample; honors the mask via
// PoE re-fusion over the remaining modalities.
Prediction predict(const TrainedModel& model, const MultimodalSample& sample,
                   const ModalityMask* mask = nullptr);

// Task metric on a standardized split: mean BCE for Cls, nMSE for Reg,
// temporal nMSE for Tmp (and SRC via eval_src for sequences).
double eval_metric(const TrainedModel& model, const Dataset& split,
                   const ModalityMask* mask = nullptr);
double eval_src(const TrainedModel& model, const Dataset& split,
                const ModalityMask* mask = nullptr, bool use_ranks = false);
double eval_accuracy(const TrainedModel& model, const Dataset& split,
                     const ModalityMask* mask = nullptr);

// Versioned JSON container; save -> load round-trips to bit-identical
// predictions.
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

void save_history(const std::string& path, const TrainHistory& history);

// shortest decimal form that parses back to the identical double
std::string format_double(double v);

}  // namespace mmfuse
