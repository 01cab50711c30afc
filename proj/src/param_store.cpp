#include "mmfuse/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace mmfuse {

Matrix& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols, bool is_bias) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter slot: " + name);
    index_[name] = slots_.size();
    slots_.push_back(ParamSlot{name, Matrix(rows, cols), Matrix(rows, cols), is_bias});
    return slots_.back().value;
}

ParamSlot& ParamStore::slot(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown parameter slot: " + name);
    return slots_[it->second];
}

const ParamSlot& ParamStore::slot(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown parameter slot: " + name);
    return slots_[it->second];
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto& s : slots_) n += s.value.size();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& s : slots_) s.grad.fill(0.0);
}

void ParamStore::init_glorot(Rng& rng) {
    for (auto& s : slots_) {
        if (s.is_bias) {
            s.value.fill(0.0);
            continue;
        }
        const double fan_in = static_cast<double>(s.value.cols());
        const double fan_out = static_cast<double>(s.value.rows());
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : s.value.values()) v = rng.uniform(-bound, bound);
    }
}

}  // namespace mmfuse
