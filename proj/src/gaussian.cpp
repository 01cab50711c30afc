#include "mmfuse/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace mmfuse {

void validate(const GaussianExpert& e) {
    check_dim(e.mean.size() == e.std.size(), "GaussianExpert mean/std");
    if (!all_finite(e.mean)) throw std::invalid_argument("GaussianExpert: non-finite mean");
    for (double s : e.std)
        if (!(s > 0.0) || !std::isfinite(s))
            throw std::invalid_argument("GaussianExpert: std must be strictly positive and finite");
}

void validate(const GaussianEmbedding& e) {
    check_dim(e.mean.size() == e.std.size(), "GaussianEmbedding mean/std");
    if (!all_finite(e.mean)) throw std::invalid_argument("GaussianEmbedding: non-finite mean");
    for (double s : e.std)
        if (!(s > 0.0) || !std::isfinite(s))
            throw std::invalid_argument(
                "GaussianEmbedding: std must be strictly positive and finite");
}

GaussianEmbedding poe_fuse(const std::vector<GaussianExpert>& experts, bool include_prior) {
    if (experts.empty() && !include_prior)
        throw std::invalid_argument("poe_fuse: no experts and no prior");
    std::size_t dim = experts.empty() ? 0 : experts.front().mean.size();
    for (const auto& e : experts) {
        validate(e);
        check_dim(e.mean.size() == dim, "poe_fuse: expert dimension");
    }
    if (experts.empty())
        throw std::invalid_argument("poe_fuse: prior-only fusion needs a known dimension");

    GaussianEmbedding out;
    out.mean.resize(dim);
    out.std.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        double precision = include_prior ? 1.0 : 0.0;
        for (const auto& e : experts) precision += 1.0 / (e.std[d] * e.std[d]);
        // mean as a convex combination: sum of mu_i * (p_i / P). The prior
        // contributes mean 0, and a lone expert passes through unchanged.
        double mean = 0.0;
        for (const auto& e : experts)
            mean += e.mean[d] * ((1.0 / (e.std[d] * e.std[d])) / precision);
        out.mean[d] = mean;
        out.std[d] = 1.0 / std::sqrt(precision);
    }
    return out;
}

std::vector<GaussianExpert> poe_fuse_backward(const std::vector<GaussianExpert>& experts,
                                              bool include_prior, const GaussianEmbedding& fused,
                                              const Vec& dmean, const Vec& dstd) {
    const std::size_t dim = fused.dim();
    check_dim(dmean.size() == dim && dstd.size() == dim, "poe_fuse_backward upstream");
    std::vector<GaussianExpert> grads(experts.size());
    for (auto& g : grads) {
        g.mean.assign(dim, 0.0);
        g.std.assign(dim, 0.0);
    }
    for (std::size_t d = 0; d < dim; ++d) {
        // recover total precision from the fused std
        const double precision = 1.0 / (fused.std[d] * fused.std[d]);
        (void)include_prior;  // the prior is constant, nothing flows to it
        const double sigma3 = fused.std[d] * fused.std[d] * fused.std[d];
        for (std::size_t i = 0; i < experts.size(); ++i) {
            const double si = experts[i].std[d];
            const double pi = 1.0 / (si * si);
            // mu = sum(mu_i p_i) / P,  sigma = P^{-1/2}
            const double dmu_i = dmean[d] * pi / precision;
            const double dP =
                dmean[d] * (experts[i].mean[d] - fused.mean[d]) / precision - dstd[d] * sigma3 / 2.0;
            // here dP is really dL/dp_i for this expert (the shared -dstd part
            // plus the expert-specific mean part); chain to sigma_i
            grads[i].mean[d] = dmu_i;
            grads[i].std[d] = dP * (-2.0 / (si * si * si));
        }
    }
    return grads;
}

GaussianEmbedding drop_modalities(const std::vector<GaussianExpert>& experts,
                                  const std::vector<bool>& available, bool include_prior) {
    check_dim(available.size() == experts.size(), "drop_modalities mask");
    std::vector<GaussianExpert> kept;
    for (std::size_t i = 0; i < experts.size(); ++i)
        if (available[i]) kept.push_back(experts[i]);
    if (kept.empty()) {
        if (!include_prior || experts.empty())
            throw std::invalid_argument("drop_modalities: all modalities masked and no prior");
        // the product degenerates to the prior itself
        const std::size_t dim = experts.front().mean.size();
        return GaussianEmbedding{Vec(dim, 0.0), Vec(dim, 1.0)};
    }
    return poe_fuse(kept, include_prior);
}

}  // namespace mmfuse
