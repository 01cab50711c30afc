#include "mmfuse/encoder.hpp"

#include <algorithm>
#include <cmath>

namespace mmfuse {

std::size_t EncoderSpec::total_input_dim() const {
    std::size_t n = 0;
    for (const auto& m : modalities) n += m.input_dim;
    return n;
}

int EncoderSpec::modality_index(const std::string& name) const {
    for (std::size_t i = 0; i < modalities.size(); ++i)
        if (modalities[i].name == name) return static_cast<int>(i);
    return -1;
}

GaussianEncoderNet::GaussianEncoderNet(const std::string& name, std::size_t input_dim,
                                       std::size_t hidden, std::size_t latent)
    : hidden_(name + "/hidden", input_dim, hidden, Activation::Relu),
      mean_head_(name + "/mean", hidden, latent, Activation::Linear),
      logstd_head_(name + "/logstd", hidden, latent, Activation::Linear) {}

void GaussianEncoderNet::register_params(ParamStore& store) const {
    hidden_.register_params(store);
    mean_head_.register_params(store);
    logstd_head_.register_params(store);
}

GaussianExpert GaussianEncoderNet::encode(const ParamStore& store, const Vec& features,
                                          EncoderTrace* trace) const {
    check_dim(features.size() == hidden_.in_dim(), "encode: feature dimension");
    if (!all_finite(features)) throw std::invalid_argument("encode: non-finite features");
    EncoderTrace local;
    EncoderTrace* tr = trace ? trace : &local;
    Vec h = hidden_.forward(store, features, &tr->hidden);
    GaussianExpert out;
    out.mean = mean_head_.forward(store, h, &tr->mean_head);
    tr->logstd_raw = logstd_head_.forward(store, h, &tr->logstd_head);
    out.std.resize(tr->logstd_raw.size());
    for (std::size_t i = 0; i < out.std.size(); ++i)
        out.std[i] = std::exp(std::clamp(tr->logstd_raw[i], -kLogStdClamp, kLogStdClamp));
    tr->out = out;
    return out;
}

Vec GaussianEncoderNet::backward(ParamStore& store, const EncoderTrace& trace, const Vec& dmean,
                                 const Vec& dstd) const {
    // d std / d logstd_raw is std inside the clamp band and 0 outside
    Vec dlogstd(dstd.size());
    for (std::size_t i = 0; i < dstd.size(); ++i) {
        const bool inside =
            trace.logstd_raw[i] > -kLogStdClamp && trace.logstd_raw[i] < kLogStdClamp;
        dlogstd[i] = inside ? dstd[i] * trace.out.std[i] : 0.0;
    }
    Vec dh = mean_head_.backward(store, trace.mean_head, dmean);
    Vec dh2 = logstd_head_.backward(store, trace.logstd_head, dlogstd);
    axpy(1.0, dh2, dh);
    return hidden_.backward(store, trace.hidden, dh);
}

GaussianEmbedding early_fuse_encode(const GaussianEncoderNet& net, const ParamStore& store,
                                    const Vec& concatenated, EncoderTrace* trace) {
    GaussianExpert e = net.encode(store, concatenated, trace);
    return GaussianEmbedding{std::move(e.mean), std::move(e.std)};
}

}  // namespace mmfuse
