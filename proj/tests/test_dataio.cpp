#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "mmfuse/dataset.hpp"
#include "mmfuse/metrics.hpp"
#include "mmfuse/rng.hpp"
#include "mmfuse/synth.hpp"
#include "oracles.hpp"

using namespace mmfuse;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// least-squares oracle nMSE on a held-out half of the dataset
double ls_oracle_nmse(const Dataset& ds) {
    const std::size_t half = ds.size() / 2;
    std::vector<Vec> x_train, x_test;
    Vec y_train, y_test;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        Vec f = concat_features(ds, ds.samples[i]);
        if (i < half) {
            x_train.push_back(std::move(f));
            y_train.push_back(ds.samples[i].target.scalar);
        } else {
            x_test.push_back(std::move(f));
            y_test.push_back(ds.samples[i].target.scalar);
        }
    }
    const auto beta = oracle::least_squares_fit(x_train, y_train);
    Vec yhat(y_test.size());
    for (std::size_t i = 0; i < y_test.size(); ++i)
        yhat[i] = oracle::least_squares_predict(beta, x_test[i]);
    return nmse(y_test, yhat);
}

}  // namespace

TEST_CASE("load_dataset: empty file is a valid empty dataset") {
    const std::string path = temp_path("mmfuse_empty.jsonl");
    std::ofstream(path).close();
    Dataset ds = load_dataset(path);
    CHECK(ds.empty());
    CHECK(ds.schema.empty());
    std::remove(path.c_str());
}

TEST_CASE("load_dataset: absent modality keys stay missing and dims are validated") {
    const std::string path = temp_path("mmfuse_missing.jsonl");
    {
        std::ofstream out(path);
        out << R"({"id":"a","modalities":{"audio":[1,2],"text":[3]},"target":{"kind":"reg","y":1.0}})"
            << "\n";
        out << R"({"id":"b","modalities":{"audio":[4,5]},"target":{"kind":"reg","y":2.0}})"
            << "\n";
    }
    Dataset ds = load_dataset(path);
    REQUIRE(ds.size() == 2);
    CHECK(ds.samples[1].has("audio"));
    CHECK_FALSE(ds.samples[1].has("text"));
    REQUIRE(ds.schema.size() == 2);
    CHECK(ds.schema[0].name == "audio");
    CHECK(ds.schema[1].name == "text");

    // inconsistent dimension on line 2 is a schema error naming the line
    {
        std::ofstream out(path);
        out << R"({"id":"a","modalities":{"audio":[1,2]},"target":{"kind":"reg","y":1.0}})"
            << "\n";
        out << R"({"id":"b","modalities":{"audio":[1,2,3]},"target":{"kind":"reg","y":2.0}})"
            << "\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(path),
                         doctest::Contains(":2: modality 'audio' has dim 3, expected 2"),
                         std::runtime_error);

    {
        std::ofstream out(path);
        out << "{not json}\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset(path), doctest::Contains(":1: malformed record"),
                         std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("dataset save/load round-trips every value exactly") {
    SynthConfig cfg;
    cfg.n = 50;
    cfg.latent_dim = 3;
    cfg.modality_dims = {4, 2};
    cfg.noise_scales = {0.7, 0.3};
    cfg.distractor_dims = {2, 0};
    cfg.kind = TargetKind::Tmp;
    cfg.seq_len = 5;
    cfg.seed = 11;
    Dataset ds = synth_generate(cfg).dataset;

    const std::string path = temp_path("mmfuse_roundtrip.jsonl");
    save_dataset(path, ds);
    Dataset back = load_dataset(path);
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.samples[i].id == ds.samples[i].id);
        CHECK(back.samples[i].modalities == ds.samples[i].modalities);
        CHECK(back.samples[i].target.sequence.values == ds.samples[i].target.sequence.values);
        CHECK(back.samples[i].target.sequence.timestamps ==
              ds.samples[i].target.sequence.timestamps);
    }
    std::remove(path.c_str());
}

TEST_CASE("standardize_fit/apply: definition, degenerate column, idempotence") {
    Dataset ds;
    ds.kind = TargetKind::Reg;
    ds.schema = {{"m", 2}};
    for (double v : {1.0, 2.0, 3.0}) {
        MultimodalSample s;
        s.id = "s" + std::to_string(static_cast<int>(v));
        s.modalities["m"] = {v, 5.0};  // second column constant
        s.target = PopularityTarget::real(v);
        ds.samples.push_back(s);
    }
    StandardizationStats stats = standardize_fit(ds);
    Dataset applied = ds;
    standardize_apply(stats, applied);
    const double root15 = std::sqrt(1.5);
    CHECK(applied.samples[0].modalities["m"][0] == doctest::Approx(-root15).epsilon(1e-12));
    CHECK(applied.samples[1].modalities["m"][0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(applied.samples[2].modalities["m"][0] == doctest::Approx(root15).epsilon(1e-12));
    // constant column maps to zeros under the floor-guarded division
    for (const auto& s : applied.samples) CHECK(s.modalities.at("m")[1] == 0.0);

    // column means ~0 and stds ~1 on the fit split
    double mean = 0.0;
    for (const auto& s : applied.samples) mean += s.modalities.at("m")[0];
    mean /= 3.0;
    CHECK(std::fabs(mean) < 1e-10);
    double var = 0.0;
    for (const auto& s : applied.samples) var += s.modalities.at("m")[0] * s.modalities.at("m")[0];
    CHECK(std::fabs(std::sqrt(var / 3.0) - 1.0) < 1e-10);

    // applying the (refit) standardization again changes nothing
    StandardizationStats stats2 = standardize_fit(applied);
    Dataset twice = applied;
    standardize_apply(stats2, twice);
    for (std::size_t i = 0; i < twice.size(); ++i)
        for (std::size_t d = 0; d < 2; ++d)
            CHECK(std::fabs(twice.samples[i].modalities.at("m")[d] -
                            applied.samples[i].modalities.at("m")[d]) < 1e-9);

    CHECK_THROWS_AS(standardize_fit(Dataset{}), std::invalid_argument);
}

TEST_CASE("standardize leaves missing modalities untouched") {
    Dataset ds;
    ds.kind = TargetKind::Reg;
    ds.schema = {{"a", 1}, {"b", 1}};
    MultimodalSample s1;
    s1.id = "x";
    s1.modalities["a"] = {2.0};
    s1.modalities["b"] = {4.0};
    s1.target = PopularityTarget::real(0);
    MultimodalSample s2;
    s2.id = "y";
    s2.modalities["a"] = {6.0};
    s2.target = PopularityTarget::real(0);
    ds.samples = {s1, s2};
    StandardizationStats stats = standardize_fit(ds);
    standardize_apply(stats, ds);
    CHECK_FALSE(ds.samples[1].has("b"));
    CHECK(ds.samples[0].modalities["b"][0] == 0.0);  // single value -> zero after centering
}

TEST_CASE("resample_sequence window sums and mass conservation") {
    // 3 days of 15-minute increments, resampled to 8 hours -> 9 windows of 32
    Vec increments(288);
    Rng rng(3);
    for (double& v : increments) v = rng.uniform(0, 10);
    SequenceTarget out = resample_sequence(increments, 0.25, 8.0);
    REQUIRE(out.values.size() == 9);
    double in_sum = 0.0, out_sum = 0.0;
    for (double v : increments) in_sum += v;
    for (double v : out.values) out_sum += v;
    CHECK(std::fabs(out_sum - in_sum) / in_sum < 1e-9);
    CHECK(out.timestamps.front() == doctest::Approx(8.0));
    CHECK(out.timestamps.back() == doctest::Approx(72.0));

    // identity when the interval matches
    SequenceTarget same = resample_sequence({1, 2, 3}, 0.25, 0.25);
    CHECK(same.values == Vec{1, 2, 3});

    // constant increments sum to the window size
    SequenceTarget fours = resample_sequence(Vec(8, 1.0), 1.0, 4.0);
    CHECK(fours.values == Vec{4.0, 4.0});

    CHECK_THROWS_AS(resample_sequence(increments, 0.25, 0.3), std::invalid_argument);
}

TEST_CASE("split_dataset ratios, determinism, partition property") {
    SynthConfig cfg;
    cfg.n = 100;
    cfg.latent_dim = 2;
    cfg.modality_dims = {3};
    cfg.noise_scales = {0.1};
    cfg.distractor_dims = {0};
    cfg.seed = 5;
    Dataset ds = synth_generate(cfg).dataset;

    DatasetSplits splits = split_dataset(ds, 0.64, 0.16, 0.20, 9);
    CHECK(splits.train.size() == 64);
    CHECK(splits.val.size() == 16);
    CHECK(splits.test.size() == 20);

    DatasetSplits again = split_dataset(ds, 0.64, 0.16, 0.20, 9);
    for (std::size_t i = 0; i < splits.train.size(); ++i)
        CHECK(splits.train.samples[i].id == again.train.samples[i].id);

    // union == dataset, pairwise disjoint, over several seeds/ratios
    for (std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
        DatasetSplits sp = split_dataset(ds, 0.5, 0.25, 0.25, seed);
        std::set<std::string> seen;
        for (const Dataset* part : {&sp.train, &sp.val, &sp.test})
            for (const auto& s : part->samples) CHECK(seen.insert(s.id).second);
        CHECK(seen.size() == ds.size());
    }

    CHECK_THROWS_AS(split_dataset(ds, 0.5, 0.2, 0.2, 1), std::invalid_argument);
}

TEST_CASE("synth REG with no noise is solvable by the least-squares oracle") {
    SynthConfig cfg;
    cfg.n = 600;
    cfg.latent_dim = 4;
    cfg.modality_dims = {4, 4};
    cfg.noise_scales = {0.0, 0.0};
    cfg.distractor_dims = {0, 0};
    cfg.kind = TargetKind::Reg;
    cfg.target_noise = 0.0;
    cfg.seed = 21;
    Dataset ds = synth_generate(cfg).dataset;
    CHECK(ls_oracle_nmse(ds) < 0.05);
}

TEST_CASE("synth CLS with flip probability 0.5 is unlearnable") {
    SynthConfig cfg;
    cfg.n = 3000;
    cfg.latent_dim = 3;
    cfg.modality_dims = {5};
    cfg.noise_scales = {0.0};
    cfg.distractor_dims = {0};
    cfg.kind = TargetKind::Cls;
    cfg.label_flip_prob = 0.5;
    cfg.seed = 23;
    Dataset ds = synth_generate(cfg).dataset;

    // linear oracle trained on one half, scored on the other
    const std::size_t half = ds.size() / 2;
    std::vector<Vec> x_train;
    Vec y_train;
    for (std::size_t i = 0; i < half; ++i) {
        x_train.push_back(concat_features(ds, ds.samples[i]));
        y_train.push_back(ds.samples[i].target.scalar);
    }
    const auto beta = oracle::least_squares_fit(x_train, y_train);
    std::size_t correct = 0;
    for (std::size_t i = half; i < ds.size(); ++i) {
        const double p = oracle::least_squares_predict(beta, concat_features(ds, ds.samples[i]));
        if ((p > 0.5 ? 1.0 : 0.0) == ds.samples[i].target.scalar) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(ds.size() - half);
    CHECK(accuracy > 0.47);
    CHECK(accuracy < 0.53);
}

TEST_CASE("synth same seed produces byte-identical dataset files") {
    SynthConfig cfg;
    cfg.n = 40;
    cfg.latent_dim = 2;
    cfg.modality_dims = {3, 2};
    cfg.noise_scales = {0.5, 0.5};
    cfg.distractor_dims = {1, 1};
    cfg.kind = TargetKind::Tmp;
    cfg.seq_len = 4;
    cfg.seed = 31;
    const std::string p1 = temp_path("mmfuse_synth_a.jsonl");
    const std::string p2 = temp_path("mmfuse_synth_b.jsonl");
    save_dataset(p1, synth_generate(cfg).dataset);
    save_dataset(p2, synth_generate(cfg).dataset);
    CHECK(slurp(p1) == slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("synth metadata sidecar round-trips") {
    SynthConfig cfg;
    cfg.n = 5;
    cfg.latent_dim = 3;
    cfg.modality_dims = {4};
    cfg.noise_scales = {0.2};
    cfg.distractor_dims = {1};
    cfg.seed = 37;
    SynthResult result = synth_generate(cfg);
    const std::string path = temp_path("mmfuse_meta.json");
    save_synth_meta(path, result.meta);
    SynthMeta back = load_synth_meta(path);
    CHECK(back.readout == result.meta.readout);
    CHECK(back.modalities[0].mixing == result.meta.modalities[0].mixing);
    CHECK(back.modalities[0].offset == result.meta.modalities[0].offset);
    CHECK(back.shape_tau == result.meta.shape_tau);
    std::remove(path.c_str());
}

TEST_CASE("larger feature noise monotonically degrades the least-squares oracle") {
    const double etas[] = {0.2, 1.0, 3.0};
    double avg[3] = {0, 0, 0};
    for (int level = 0; level < 3; ++level) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            SynthConfig cfg;
            cfg.n = 400;
            cfg.latent_dim = 3;
            cfg.modality_dims = {4, 4};
            cfg.noise_scales = {etas[level], etas[level]};
            cfg.distractor_dims = {0, 0};
            cfg.kind = TargetKind::Reg;
            cfg.target_noise = 0.05;
            cfg.seed = seed;
            avg[level] += ls_oracle_nmse(synth_generate(cfg).dataset) / 5.0;
        }
    }
    CHECK(avg[0] < avg[1]);
    CHECK(avg[1] < avg[2]);
}

TEST_CASE("synth config validation") {
    SynthConfig cfg;
    cfg.modality_dims = {4};
    cfg.noise_scales = {0.1, 0.2};  // wrong length
    cfg.distractor_dims = {0};
    CHECK_THROWS_AS(synth_generate(cfg), std::invalid_argument);
    cfg.noise_scales = {-0.5};
    CHECK_THROWS_AS(synth_generate(cfg), std::invalid_argument);
    cfg.noise_scales = {0.1};
    cfg.label_flip_prob = 0.7;
    CHECK_THROWS_AS(synth_generate(cfg), std::invalid_argument);
}
