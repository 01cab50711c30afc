#include "mmfuse/gradcheck_suite.hpp"

#include <cmath>

#include "mmfuse/dataset.hpp"
#include "mmfuse/dense.hpp"
#include "mmfuse/encoder.hpp"
#include "mmfuse/gradcheck.hpp"
#include "mmfuse/ib.hpp"
#include "mmfuse/lstm.hpp"
#include "mmfuse/model.hpp"
#include "mmfuse/rng.hpp"
#include "mmfuse/synth.hpp"

namespace mmfuse {

namespace {

void randomize(ParamStore& store, Rng& rng, double scale = 0.8) {
    for (auto& slot : store)
        for (double& v : slot.value.values()) v = rng.uniform(-scale, scale);
}

Vec random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    Vec v(n);
    for (double& x : v) x = rng.uniform(-scale, scale);
    return v;
}

GradCheckRow check_dense(Activation act, const std::string& name, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t in = 4, out = 3;
    ParamStore store;
    store.add("W", out, in);
    store.add("b", out, 1, true);
    store.add("x", in, 1);
    randomize(store, rng);
    const Vec readout = random_vec(rng, out);

    auto loss_fn = [&](ParamStore& s) {
        DenseCache cache;
        Vec y = dense_forward(s.value("x").values(), s.value("W"), s.value("b").values(), act,
                              &cache);
        double loss = dot(readout, y);
        DenseGrads g = dense_backward(s.value("W"), cache, readout, act);
        for (std::size_t i = 0; i < g.grad_w.size(); ++i)
            s.grad("W").values()[i] += g.grad_w.values()[i];
        for (std::size_t i = 0; i < g.grad_b.size(); ++i) s.grad("b").values()[i] += g.grad_b[i];
        for (std::size_t i = 0; i < g.grad_x.size(); ++i) s.grad("x").values()[i] += g.grad_x[i];
        return loss;
    };
    GradCheckReport rep = gradcheck(store, loss_fn);
    return {"dense/" + name, rep.max_rel_err, 1e-4, rep.max_rel_err < 1e-4};
}

GradCheckRow check_lstm_bptt(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t in = 2, hid = 3, steps = 3;
    ParamStore store;
    store.add("Wx", 4 * hid, in);
    store.add("Wh", 4 * hid, hid);
    store.add("b", 4 * hid, 1, true);
    store.add("h0", hid, 1);
    store.add("c0", hid, 1);
    for (std::size_t t = 0; t < steps; ++t) store.add("x" + std::to_string(t), in, 1);
    randomize(store, rng);
    std::vector<Vec> readouts;
    for (std::size_t t = 0; t < steps; ++t) readouts.push_back(random_vec(rng, hid));

    auto loss_fn = [&](ParamStore& s) {
        LstmWeights w{&s.value("Wx"), &s.value("Wh"), &s.value("b").values()};
        std::vector<LstmCache> caches(steps);
        LstmState state{s.value("h0").values(), s.value("c0").values()};
        double loss = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
            state = lstm_cell(s.value("x" + std::to_string(t)).values(), state.h, state.c, w,
                              &caches[t]);
            loss += dot(readouts[t], state.h);
        }
        Vec dh(hid, 0.0), dc(hid, 0.0);
        for (std::size_t t = steps; t-- > 0;) {
            axpy(1.0, readouts[t], dh);
            LstmStepGrads g = lstm_cell_backward(w, caches[t], dh, dc);
            for (std::size_t i = 0; i < g.grad_w_x.size(); ++i)
                s.grad("Wx").values()[i] += g.grad_w_x.values()[i];
            for (std::size_t i = 0; i < g.grad_w_h.size(); ++i)
                s.grad("Wh").values()[i] += g.grad_w_h.values()[i];
            for (std::size_t i = 0; i < g.grad_b.size(); ++i)
                s.grad("b").values()[i] += g.grad_b[i];
            for (std::size_t i = 0; i < in; ++i)
                s.grad("x" + std::to_string(t)).values()[i] += g.grad_x[i];
            dh = g.grad_h_prev;
            dc = g.grad_c_prev;
        }
        for (std::size_t i = 0; i < hid; ++i) {
            s.grad("h0").values()[i] += dh[i];
            s.grad("c0").values()[i] += dc[i];
        }
        return loss;
    };
    GradCheckReport rep = gradcheck(store, loss_fn);
    return {"lstm/bptt", rep.max_rel_err, 1e-3, rep.max_rel_err < 1e-3};
}

GradCheckRow check_kl(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t dim = 6;
    ParamStore store;
    store.add("mean", dim, 1);
    store.add("std", dim, 1);
    for (double& v : store.value("mean").values()) v = rng.uniform(-1.5, 1.5);
    for (double& v : store.value("std").values()) v = rng.uniform(0.4, 2.0);

    auto loss_fn = [&](ParamStore& s) {
        GaussianEmbedding emb{s.value("mean").values(), s.value("std").values()};
        const double kl = kl_standard_normal(emb);
        Vec dmean(dim, 0.0), dstd(dim, 0.0);
        kl_standard_normal_backward(emb, 1.0, dmean, dstd);
        for (std::size_t i = 0; i < dim; ++i) {
            s.grad("mean").values()[i] += dmean[i];
            s.grad("std").values()[i] += dstd[i];
        }
        return kl;
    };
    GradCheckReport rep = gradcheck(store, loss_fn);
    return {"kl/analytic", rep.max_rel_err, 1e-8, rep.max_rel_err < 1e-8};
}

GradCheckRow check_encoder(bool early_fusion, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t in = early_fusion ? 7 : 4, hidden = 5, latent = 3;
    GaussianEncoderNet net("enc", in, hidden, latent);
    ParamStore store;
    net.register_params(store);
    randomize(store, rng, 0.6);
    const Vec features = random_vec(rng, in);
    const Vec r_mean = random_vec(rng, latent);
    const Vec r_std = random_vec(rng, latent);

    // exercise both heads plus the KL path through the produced Gaussian
    auto loss_fn = [&](ParamStore& s) {
        EncoderTrace trace;
        GaussianExpert e = net.encode(s, features, &trace);
        GaussianEmbedding emb{e.mean, e.std};
        double loss = kl_standard_normal(emb) + dot(r_mean, e.mean) + dot(r_std, e.std);
        Vec dmean(latent, 0.0), dstd(latent, 0.0);
        kl_standard_normal_backward(emb, 1.0, dmean, dstd);
        axpy(1.0, r_mean, dmean);
        axpy(1.0, r_std, dstd);
        net.backward(s, trace, dmean, dstd);
        return loss;
    };
    GradCheckReport rep = gradcheck(store, loss_fn);
    const std::string name = early_fusion ? "encoder/early_fusion" : "encoder/modality";
    return {name, rep.max_rel_err, 1e-4, rep.max_rel_err < 1e-4};
}

GradCheckRow check_end_to_end(TargetKind kind, std::uint64_t seed) {
    SynthConfig synth;
    synth.n = 6;
    synth.latent_dim = 2;
    synth.modality_dims = {3, 2};
    synth.noise_scales = {0.3, 0.3};
    synth.distractor_dims = {1, 0};
    synth.kind = kind;
    synth.seq_len = 4;
    synth.base_interval = 8.0;
    synth.target_noise = 0.2;
    synth.seed = seed;
    Dataset data = synth_generate(synth).dataset;
    StandardizationStats stats = standardize_fit(data);
    standardize_apply(stats, data);

    ModelSpec spec;
    for (const auto& m : data.schema) spec.encoder.modalities.push_back({m.name, m.dim});
    spec.encoder.hidden = 4;
    spec.encoder.latent = 3;
    spec.encoder.include_prior = true;
    spec.decoder.kind = kind;
    spec.decoder.head_hidden = 4;
    spec.decoder.tmp_hidden = 3;

    MmvedModel model(spec);
    Rng rng(seed + 1);
    model.init_params(rng);
    if (kind == TargetKind::Tmp) model.set_time_stats(16.0, 9.0);

    std::vector<const MultimodalSample*> batch;
    for (const auto& s : data.samples) batch.push_back(&s);
    std::vector<std::vector<Vec>> noises(batch.size());
    for (auto& per_sample : noises) {
        per_sample.resize(1);
        per_sample[0].resize(spec.encoder.latent);
        for (double& v : per_sample[0]) v = rng.normal();
    }
    const double lambda = 0.5;

    auto loss_fn = [&](ParamStore&) {
        BatchLoss loss = batch_loss_and_grad(model, batch, noises, lambda, false);
        return loss.dec_mean + lambda * loss.kl_mean;
    };
    GradCheckReport rep = gradcheck(model.params(), loss_fn);
    return {"e2e/" + to_string(kind), rep.max_rel_err, 1e-3, rep.max_rel_err < 1e-3};
}

}  // namespace

std::vector<GradCheckRow> run_gradcheck_suite(std::uint64_t seed) {
    std::vector<GradCheckRow> rows;
    rows.push_back(check_dense(Activation::Linear, "linear", seed));
    rows.push_back(check_dense(Activation::Relu, "relu", seed + 1));
    rows.push_back(check_dense(Activation::Tanh, "tanh", seed + 2));
    rows.push_back(check_dense(Activation::Sigmoid, "sigmoid", seed + 3));
    rows.push_back(check_lstm_bptt(seed + 4));
    rows.push_back(check_kl(seed + 5));
    rows.push_back(check_encoder(false, seed + 6));
    rows.push_back(check_encoder(true, seed + 7));
    rows.push_back(check_end_to_end(TargetKind::Cls, seed + 8));
    rows.push_back(check_end_to_end(TargetKind::Reg, seed + 9));
    rows.push_back(check_end_to_end(TargetKind::Tmp, seed + 10));
    return rows;
}

}  // namespace mmfuse
