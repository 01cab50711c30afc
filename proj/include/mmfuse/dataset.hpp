#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmfuse/matrix.hpp"
#include "mmfuse/target.hpp"

namespace mmfuse {

// One multimodal sample. A modality absent from the map is a missing
// modality, not an empty vector.
struct MultimodalSample {
    std::string id;
    std::map<std::string, Vec> modalities;
    PopularityTarget target;

    bool has(const std::string& modality) const { return modalities.count(modality) > 0; }
};

struct ModalitySchema {
    std::string name;
    std::size_t dim = 0;
};

// Samples plus the per-modality dimension schema. Modality order is the
// schema order: names sorted lexicographically, fixed at load/generation
// time. Feature concatenation and encoder wiring both follow it.
struct Dataset {
    std::vector<ModalitySchema> schema;
    TargetKind kind = TargetKind::Reg;
    std::vector<MultimodalSample> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    int schema_index(const std::string& name) const;
};

// Line-delimited JSON, one sample per line:
//   {"id":"...","modalities":{"m0":[...],...},"target":{"kind":"reg","y":1.5}}
// Target forms: {"kind":"cls","y":0|1}, {"kind":"reg","y":<real>},
// {"kind":"tmp","y":[...],"t":[...]}.
// Missing modalities are absent keys. Dimensions are validated against the
// first occurrence of each modality. Malformed lines report their number.
Dataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const Dataset& ds);

// Features of one sample concatenated in schema order; missing modalities are
// not allowed here (used by the early-fusion baseline and test oracles).
Vec concat_features(const Dataset& ds, const MultimodalSample& s);

// Per-modality per-dimension standardization statistics, fit on the training
// split only. Population standard deviations with a 1e-8 floor at apply time.
struct StandardizationStats {
    std::vector<std::string> names;  // aligned with the fit dataset's schema
    std::vector<Vec> mean;
    std::vector<Vec> std;
};

StandardizationStats standardize_fit(const Dataset& train);
void standardize_apply(const StandardizationStats& stats, Dataset& ds);

// Groups increments recorded every base_interval hours into windows of t_int
// hours and sums each window; timestamps sit at window ends. t_int must be an
// integer multiple of base_interval. A shorter trailing window keeps the
// remaining increments so total mass is conserved.
SequenceTarget resample_sequence(const Vec& increments, double base_interval, double t_int);

struct DatasetSplits {
    Dataset train, val, test;
};

// Seeded shuffle then partition by ratio. Ratios must be positive and sum to
// 1 within 1e-9.
DatasetSplits split_dataset(const Dataset& ds, double train_ratio, double val_ratio,
                            double test_ratio, std::uint64_t seed);

}  // namespace mmfuse
