#pragma once

#include <cstdint>
#include <vector>

#include "mmfuse/param_store.hpp"

namespace mmfuse {

// Moment buffers for every slot of one ParamStore, in slot order.
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step = 0;
    std::vector<Vec> m;  // first moments, one entry per slot
    std::vector<Vec> v;  // second moments

    static AdamState for_store(const ParamStore& store);
};

// One bias-corrected Adam update over all slots. Gradients are read but not
// cleared; the caller zeroes them. Throws on non-finite gradients, naming the
// offending slot.
void adam_step(ParamStore& store, AdamState& state, double lr);

}  // namespace mmfuse
