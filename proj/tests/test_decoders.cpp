#include <doctest.h>

#include <cmath>

#include "mmfuse/decoders.hpp"
#include "mmfuse/gradcheck.hpp"
#include "mmfuse/rng.hpp"

using namespace mmfuse;

namespace {

DecoderNet make_decoder(TargetKind kind, std::size_t latent, ParamStore& store,
                        Rng* rng = nullptr) {
    DecoderKind dk;
    dk.kind = kind;
    dk.head_hidden = 4;
    dk.tmp_hidden = 3;
    DecoderNet net(dk, latent);
    net.register_params(store);
    if (rng) store.init_glorot(*rng);
    return net;
}

}  // namespace

TEST_CASE("decode_classify zero-weight net outputs one half") {
    ParamStore store;
    DecoderNet net = make_decoder(TargetKind::Cls, 3, store);
    CHECK(net.classify(store, {0.4, -1.0, 2.0}) == 0.5);
}

TEST_CASE("bce closed form and clamping") {
    CHECK(bce_loss(0.5, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(std::isfinite(bce_loss(0.0, 1.0)));  // clamp keeps the loss finite
    CHECK(std::isfinite(bce_loss(1.0, 0.0)));
    CHECK(bce_loss(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("decode_classify output is strictly inside (0,1) and BCE gradient checks") {
    Rng rng(5);
    ParamStore store;
    DecoderNet net = make_decoder(TargetKind::Cls, 3, store, &rng);
    for (int trial = 0; trial < 10; ++trial) {
        Vec z(3);
        for (double& v : z) v = rng.uniform(-30, 30);
        const double p = net.classify(store, z);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }

    Vec z(3);
    for (double& v : z) v = rng.uniform(-1, 1);
    const PopularityTarget target = PopularityTarget::binary(1.0);
    auto loss_fn = [&](ParamStore& s) {
        DecodeTrace trace;
        const double loss = net.forward_loss(s, z, target, trace);
        net.backward(s, trace, target, 1.0);
        return loss;
    };
    CHECK(gradcheck(store, loss_fn, 1e-6).max_rel_err < 1e-6);
}

TEST_CASE("decode_regress squared-error identities") {
    Rng rng(9);
    ParamStore store;
    DecoderNet net = make_decoder(TargetKind::Reg, 2, store, &rng);
    Vec z{0.3, -0.7};
    const double o = net.regress(store, z);

    DecodeTrace trace;
    const double zero_loss = net.forward_loss(store, z, PopularityTarget::real(o), trace);
    CHECK(zero_loss == 0.0);

    DecodeTrace t2;
    const double loss = net.forward_loss(store, z, PopularityTarget::real(o - 2.0), t2);
    CHECK(loss == doctest::Approx(4.0).epsilon(1e-12));

    // dLoss/do = 2 (o - y): read it off the out-layer bias gradient
    store.zero_grads();
    net.backward(store, t2, PopularityTarget::real(o - 2.0), 1.0);
    CHECK(store.grad("dec/out/b")(0, 0) == doctest::Approx(2.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("decode_temporal output shape, zero-weight case and target independence") {
    ParamStore store;
    DecoderNet net = make_decoder(TargetKind::Tmp, 3, store);
    net.set_time_stats(10.0, 5.0);
    Vec z{0.5, -0.2, 1.0};

    // zero weights: every output is 0, loss is the target's squared mass
    const Vec ts{8, 16, 24};
    CHECK(net.temporal(store, z, ts) == Vec(3, 0.0));
    DecodeTrace trace;
    SequenceTarget target{{1.0, 2.0, 3.0}, ts};
    const double loss =
        net.forward_loss(store, z, PopularityTarget::temporal(target), trace);
    CHECK(loss == doctest::Approx(1.0 + 4.0 + 9.0).epsilon(1e-12));

    // T = 1 degenerates to one LSTM step plus the readout
    CHECK(net.temporal(store, z, {8.0}).size() == 1);
    CHECK_THROWS_AS(net.temporal(store, z, {}), std::invalid_argument);

    // predictions never see the target values
    Rng rng(11);
    store.init_glorot(rng);
    const Vec out_a = net.temporal(store, z, ts);
    DecodeTrace ta, tb;
    net.forward_loss(store, z, PopularityTarget::temporal({{5.0, 5.0, 5.0}, ts}), ta);
    net.forward_loss(store, z, PopularityTarget::temporal({{-3.0, 0.0, 9.0}, ts}), tb);
    CHECK(ta.outputs == out_a);
    CHECK(tb.outputs == out_a);

    // output length equals timestamp length for a range of T
    for (std::size_t t_len : {1, 2, 5, 9}) {
        Vec times(t_len);
        for (std::size_t i = 0; i < t_len; ++i) times[i] = 8.0 * static_cast<double>(i + 1);
        CHECK(net.temporal(store, z, times).size() == t_len);
    }
}

TEST_CASE("temporal BPTT gradients match finite differences at T=5") {
    Rng rng(13);
    ParamStore store;
    DecoderNet net = make_decoder(TargetKind::Tmp, 3, store, &rng);
    net.set_time_stats(24.0, 14.0);
    Vec z{0.4, -0.6, 0.1};
    SequenceTarget target;
    for (int t = 1; t <= 5; ++t) {
        target.timestamps.push_back(8.0 * t);
        target.values.push_back(rng.uniform(-1, 1));
    }
    const PopularityTarget y = PopularityTarget::temporal(target);
    auto loss_fn = [&](ParamStore& s) {
        DecodeTrace trace;
        const double loss = net.forward_loss(s, z, y, trace);
        net.backward(s, trace, y, 1.0);
        return loss;
    };
    CHECK(gradcheck(store, loss_fn).max_rel_err < 1e-3);
}

TEST_CASE("decoder/target kind mismatch is rejected") {
    Rng rng(15);
    ParamStore store;
    DecoderNet net = make_decoder(TargetKind::Reg, 2, store, &rng);
    DecodeTrace trace;
    CHECK_THROWS_AS(net.forward_loss(store, {0.1, 0.2}, PopularityTarget::binary(1.0), trace),
                    std::invalid_argument);
}
