#pragma once

#include "mmfuse/gaussian.hpp"

namespace mmfuse {

// Loss terms of the information-bottleneck lower bound for one batch.
// total = -(ell - lambda * kl); ell carries the expected log-likelihood up to
// its additive constant.
struct LossBreakdown {
    double ell = 0.0;
    double kl = 0.0;
    double lambda = 0.0;
    double total = 0.0;
};

// KL(N(mu, diag(std^2)) || N(0, I)) = 1/2 sum(mu^2 + std^2 - 1 - 2 ln std)
double kl_standard_normal(const GaussianEmbedding& emb);

// Analytic gradients: dKL/dmu = mu, dKL/dstd = std - 1/std.
// (Equivalently dKL/d(ln std) = std^2 - 1.)
void kl_standard_normal_backward(const GaussianEmbedding& emb, double upstream, Vec& dmean,
                                 Vec& dstd);

// z = mean + std .* noise
Vec reparameterize(const GaussianEmbedding& emb, const Vec& noise);

LossBreakdown iblbo_loss(double ell, double kl, double lambda);

}  // namespace mmfuse
