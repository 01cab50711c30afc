#pragma once

#include <vector>

#include "mmfuse/matrix.hpp"

namespace mmfuse {

// Diagonal Gaussian contributed by one modality.
struct GaussianExpert {
    Vec mean;
    Vec std;  // strictly positive
};

// Diagonal Gaussian over the latent space after fusion.
struct GaussianEmbedding {
    Vec mean;
    Vec std;

    std::size_t dim() const { return mean.size(); }
};

void validate(const GaussianExpert& e);
void validate(const GaussianEmbedding& e);

// Product-of-experts fusion: precisions add, means are precision-weighted.
// include_prior adds a unit-Gaussian expert (precision 1, mean 0) per
// dimension.
GaussianEmbedding poe_fuse(const std::vector<GaussianExpert>& experts, bool include_prior);

// Gradients of a loss through the fusion, given dL/d(mean) and dL/d(std) of
// the fused embedding. Returns per-expert (dL/d(mean_i), dL/d(std_i)) in the
// order the experts were given.
std::vector<GaussianExpert> poe_fuse_backward(const std::vector<GaussianExpert>& experts,
                                              bool include_prior, const GaussianEmbedding& fused,
                                              const Vec& dmean, const Vec& dstd);

// Fuses only the experts whose mask entry is true. No retraining, no extra
// parameters: the unavailable experts simply leave the product.
GaussianEmbedding drop_modalities(const std::vector<GaussianExpert>& experts,
                                  const std::vector<bool>& available, bool include_prior);

}  // namespace mmfuse
