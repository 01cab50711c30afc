#include "mmfuse/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mmfuse {

AdamState AdamState::for_store(const ParamStore& store) {
    AdamState s;
    s.m.reserve(store.size());
    s.v.reserve(store.size());
    for (const auto& slot : store) {
        s.m.emplace_back(slot.value.size(), 0.0);
        s.v.emplace_back(slot.value.size(), 0.0);
    }
    return s;
}

void adam_step(ParamStore& store, AdamState& state, double lr) {
    if (state.m.size() != store.size())
        throw std::invalid_argument("adam_step: state does not match store layout");
    state.step += 1;
    const double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t s = 0; s < store.size(); ++s) {
        ParamSlot& slot = store.at(s);
        if (state.m[s].size() != slot.value.size())
            throw std::invalid_argument("adam_step: moment shape mismatch for " + slot.name);
        Vec& m = state.m[s];
        Vec& v = state.v[s];
        Vec& val = slot.value.values();
        const Vec& g = slot.grad.values();
        for (std::size_t i = 0; i < val.size(); ++i) {
            if (!std::isfinite(g[i]))
                throw std::runtime_error("adam_step: non-finite gradient in slot " + slot.name);
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double m_hat = m[i] / corr1;
            const double v_hat = v[i] / corr2;
            val[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    }
}

}  // namespace mmfuse
