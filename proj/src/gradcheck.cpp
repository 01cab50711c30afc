#include "mmfuse/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mmfuse {

GradCheckReport gradcheck(ParamStore& store, const std::function<double(ParamStore&)>& loss_fn,
                          double eps) {
    store.zero_grads();
    loss_fn(store);
    std::vector<Vec> analytic;
    analytic.reserve(store.size());
    for (const auto& slot : store) analytic.push_back(slot.grad.values());

    GradCheckReport report;
    for (std::size_t s = 0; s < store.size(); ++s) {
        Vec& vals = store.at(s).value.values();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double saved = vals[i];
            vals[i] = saved + eps;
            store.zero_grads();
            const double f_plus = loss_fn(store);
            vals[i] = saved - eps;
            store.zero_grads();
            const double f_minus = loss_fn(store);
            vals[i] = saved;

            const double numeric = (f_plus - f_minus) / (2.0 * eps);
            const double a = analytic[s][i];
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1.0});
            const double err = std::fabs(a - numeric) / denom;
            if (err > report.max_rel_err) {
                report.max_rel_err = err;
                report.worst_slot = store.at(s).name;
                report.worst_index = i;
                report.worst_analytic = a;
                report.worst_numeric = numeric;
            }
        }
    }
    // leave the store with the unperturbed analytic gradients
    store.zero_grads();
    loss_fn(store);
    return report;
}

}  // namespace mmfuse
