#pragma once

#include <functional>
#include <string>

#include "mmfuse/param_store.hpp"

namespace mmfuse {

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_slot;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

// Compares the analytic gradients produced by loss_fn against central finite
// differences (f(p+eps) - f(p-eps)) / 2eps over every scalar parameter.
//
// loss_fn must return the loss for the store's current values and fill the
// store's grad buffers (it may assume they are zeroed on entry). It must be
// deterministic: any sampling noise has to be frozen by the caller.
//
// The per-parameter error is |a - n| / max(|a|, |n|, 1), i.e. relative for
// large gradients with an absolute fallback near zero.
GradCheckReport gradcheck(ParamStore& store, const std::function<double(ParamStore&)>& loss_fn,
                          double eps = 1e-5);

}  // namespace mmfuse
