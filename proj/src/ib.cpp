#include "mmfuse/ib.hpp"

#include <cmath>
#include <stdexcept>

namespace mmfuse {

double kl_standard_normal(const GaussianEmbedding& emb) {
    double kl = 0.0;
    for (std::size_t d = 0; d < emb.dim(); ++d) {
        const double mu = emb.mean[d];
        const double sd = emb.std[d];
        kl += mu * mu + sd * sd - 1.0 - 2.0 * std::log(sd);
    }
    return 0.5 * kl;
}

void kl_standard_normal_backward(const GaussianEmbedding& emb, double upstream, Vec& dmean,
                                 Vec& dstd) {
    check_dim(dmean.size() == emb.dim() && dstd.size() == emb.dim(), "kl backward buffers");
    for (std::size_t d = 0; d < emb.dim(); ++d) {
        dmean[d] += upstream * emb.mean[d];
        dstd[d] += upstream * (emb.std[d] - 1.0 / emb.std[d]);
    }
}

Vec reparameterize(const GaussianEmbedding& emb, const Vec& noise) {
    check_dim(noise.size() == emb.dim(), "reparameterize: noise length");
    Vec z(emb.dim());
    for (std::size_t d = 0; d < emb.dim(); ++d) z[d] = emb.mean[d] + emb.std[d] * noise[d];
    return z;
}

LossBreakdown iblbo_loss(double ell, double kl, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("iblbo_loss: lambda must be >= 0");
    if (kl < 0.0) throw std::invalid_argument("iblbo_loss: kl must be >= 0");
    LossBreakdown b;
    b.ell = ell;
    b.kl = kl;
    b.lambda = lambda;
    b.total = -ell + lambda * kl;
    return b;
}

}  // namespace mmfuse
