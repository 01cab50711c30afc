#include "mmfuse/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmfuse {

double bce_loss(double p, double label) {
    const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return -(label * std::log(pc) + (1.0 - label) * std::log(1.0 - pc));
}

DecoderNet::DecoderNet(const DecoderKind& kind, std::size_t latent_dim)
    : kind_(kind), latent_(latent_dim) {
    switch (kind_.kind) {
        case TargetKind::Cls:
        case TargetKind::Reg:
            head_hidden_ = DenseLayer("dec/hidden", latent_, kind_.head_hidden, Activation::Relu);
            head_out_ = DenseLayer("dec/out", kind_.head_hidden, 1, Activation::Linear);
            break;
        case TargetKind::Tmp:
            if (kind_.tmp_hidden < 1)
                throw std::invalid_argument("DecoderNet: TMP hidden dim must be >= 1");
            init_h_ = DenseLayer("dec/init_h", latent_, kind_.tmp_hidden, Activation::Tanh);
            init_c_ = DenseLayer("dec/init_c", latent_, kind_.tmp_hidden, Activation::Tanh);
            lstm_ = LstmLayer("dec/lstm", 1, kind_.tmp_hidden);
            step_out_ = DenseLayer("dec/out", kind_.tmp_hidden, 1, Activation::Linear);
            break;
    }
}

void DecoderNet::register_params(ParamStore& store) const {
    switch (kind_.kind) {
        case TargetKind::Cls:
        case TargetKind::Reg:
            head_hidden_.register_params(store);
            head_out_.register_params(store);
            break;
        case TargetKind::Tmp:
            init_h_.register_params(store);
            init_c_.register_params(store);
            lstm_.register_params(store);
            step_out_.register_params(store);
            break;
    }
}

void DecoderNet::set_time_stats(double mean, double std) {
    kind_.time_mean = mean;
    kind_.time_std = std::max(std, 1e-8);
}

double DecoderNet::classify(const ParamStore& store, const Vec& z) const {
    DecodeTrace tr;
    Vec h = head_hidden_.forward(store, z, &tr.head_hidden);
    Vec o = head_out_.forward(store, h, &tr.head_out);
    const double p = 1.0 / (1.0 + std::exp(-o[0]));
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double DecoderNet::regress(const ParamStore& store, const Vec& z) const {
    DecodeTrace tr;
    Vec h = head_hidden_.forward(store, z, &tr.head_hidden);
    return head_out_.forward(store, h, &tr.head_out)[0];
}

Vec DecoderNet::temporal_forward(const ParamStore& store, const Vec& z, const Vec& timestamps,
                                 DecodeTrace* trace) const {
    if (timestamps.empty()) throw std::invalid_argument("decode_temporal: empty sequence");
    DecodeTrace local;
    DecodeTrace* tr = trace ? trace : &local;
    const std::size_t steps = timestamps.size();

    LstmState state;
    state.h = init_h_.forward(store, z, &tr->init_h);
    state.c = init_c_.forward(store, z, &tr->init_c);

    tr->std_times.resize(steps);
    tr->steps.resize(steps);
    tr->out_steps.resize(steps);
    tr->outputs.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        tr->std_times[t] = (timestamps[t] - kind_.time_mean) / kind_.time_std;
        state = lstm_.step(store, Vec{tr->std_times[t]}, state, &tr->steps[t]);
        tr->outputs[t] = step_out_.forward(store, state.h, &tr->out_steps[t])[0];
    }
    return tr->outputs;
}

Vec DecoderNet::temporal(const ParamStore& store, const Vec& z, const Vec& timestamps) const {
    return temporal_forward(store, z, timestamps, nullptr);
}

double DecoderNet::forward_loss(const ParamStore& store, const Vec& z,
                                const PopularityTarget& target, DecodeTrace& trace) const {
    if (target.kind != kind_.kind)
        throw std::invalid_argument("decoder/target kind mismatch: decoder " +
                                    to_string(kind_.kind) + ", target " + to_string(target.kind));
    switch (kind_.kind) {
        case TargetKind::Cls: {
            Vec h = head_hidden_.forward(store, z, &trace.head_hidden);
            trace.raw_out = head_out_.forward(store, h, &trace.head_out)[0];
            const double p = 1.0 / (1.0 + std::exp(-trace.raw_out));
            return bce_loss(p, target.scalar);
        }
        case TargetKind::Reg: {
            Vec h = head_hidden_.forward(store, z, &trace.head_hidden);
            trace.raw_out = head_out_.forward(store, h, &trace.head_out)[0];
            const double r = target.scalar - trace.raw_out;
            return r * r;
        }
        case TargetKind::Tmp: {
            validate(target.sequence);
            Vec out = temporal_forward(store, z, target.sequence.timestamps, &trace);
            double loss = 0.0;
            for (std::size_t t = 0; t < out.size(); ++t) {
                const double r = target.sequence.values[t] - out[t];
                loss += r * r;
            }
            return loss;
        }
    }
    return 0.0;
}

Vec DecoderNet::backward(ParamStore& store, const DecodeTrace& trace,
                         const PopularityTarget& target, double scale) const {
    switch (kind_.kind) {
        case TargetKind::Cls: {
            const double p = 1.0 / (1.0 + std::exp(-trace.raw_out));
            // inside the clamp band d(BCE)/d(logit) = p - y; outside the
            // clamped probability is constant and the gradient vanishes
            const double dlogit =
                (p > kProbClamp && p < 1.0 - kProbClamp) ? (p - target.scalar) : 0.0;
            Vec dh = head_out_.backward(store, trace.head_out, Vec{scale * dlogit});
            return head_hidden_.backward(store, trace.head_hidden, dh);
        }
        case TargetKind::Reg: {
            const double dout = 2.0 * (trace.raw_out - target.scalar);
            Vec dh = head_out_.backward(store, trace.head_out, Vec{scale * dout});
            return head_hidden_.backward(store, trace.head_hidden, dh);
        }
        case TargetKind::Tmp: {
            const std::size_t steps = trace.steps.size();
            const std::size_t hid = kind_.tmp_hidden;
            Vec dh(hid, 0.0), dc(hid, 0.0);
            for (std::size_t t = steps; t-- > 0;) {
                const double dout = scale * 2.0 * (trace.outputs[t] - target.sequence.values[t]);
                Vec dh_step = step_out_.backward(store, trace.out_steps[t], Vec{dout});
                axpy(1.0, dh_step, dh);
                LstmStepGrads g = lstm_.step_backward(store, trace.steps[t], dh, dc);
                dh = std::move(g.grad_h_prev);
                dc = std::move(g.grad_c_prev);
            }
            Vec dz = init_h_.backward(store, trace.init_h, dh);
            Vec dz2 = init_c_.backward(store, trace.init_c, dc);
            axpy(1.0, dz2, dz);
            return dz;
        }
    }
    return Vec(latent_, 0.0);
}

}  // namespace mmfuse
