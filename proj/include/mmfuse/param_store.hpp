#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mmfuse/matrix.hpp"
#include "mmfuse/rng.hpp"

namespace mmfuse {

// One named trainable tensor and its gradient buffer.
struct ParamSlot {
    std::string name;
    Matrix value;
    Matrix grad;
    bool is_bias = false;
};

// Ordered collection of named parameter slots. Insertion order is the
// iteration order everywhere (optimizer, serialization, gradient checks), so
// runs are reproducible.
class ParamStore {
public:
    Matrix& add(const std::string& name, std::size_t rows, std::size_t cols, bool is_bias = false);
    bool has(const std::string& name) const { return index_.count(name) > 0; }

    ParamSlot& slot(const std::string& name);
    const ParamSlot& slot(const std::string& name) const;

    Matrix& value(const std::string& name) { return slot(name).value; }
    const Matrix& value(const std::string& name) const { return slot(name).value; }
    Matrix& grad(const std::string& name) { return slot(name).grad; }

    std::size_t size() const { return slots_.size(); }
    std::size_t scalar_count() const;
    ParamSlot& at(std::size_t i) { return slots_[i]; }
    const ParamSlot& at(std::size_t i) const { return slots_[i]; }

    std::vector<ParamSlot>::iterator begin() { return slots_.begin(); }
    std::vector<ParamSlot>::iterator end() { return slots_.end(); }
    std::vector<ParamSlot>::const_iterator begin() const { return slots_.begin(); }
    std::vector<ParamSlot>::const_iterator end() const { return slots_.end(); }

    void zero_grads();

    // Glorot-uniform init for weight slots, zeros for biases. Draw order
    // follows slot insertion order, row-major within a slot.
    void init_glorot(Rng& rng);

private:
    std::vector<ParamSlot> slots_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace mmfuse
