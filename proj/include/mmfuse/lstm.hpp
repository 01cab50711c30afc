#pragma once

#include <string>

#include "mmfuse/matrix.hpp"
#include "mmfuse/param_store.hpp"

namespace mmfuse {

// Weight views for one LSTM cell. Gate rows are packed [input, forget,
// candidate, output], so w_x is [4H x X], w_h is [4H x H], b is [4H].
struct LstmWeights {
    const Matrix* w_x;
    const Matrix* w_h;
    const Vec* b;
};

struct LstmState {
    Vec h;
    Vec c;
};

// Per-step values needed for backpropagation through time.
struct LstmCache {
    Vec x, h_prev, c_prev;
    Vec gate_i, gate_f, gate_g, gate_o;  // post-nonlinearity
    Vec c, tanh_c;
};

// One step: i,f,o = sigmoid(...), g = tanh(...),
// c_t = f.c_prev + i.g, h_t = o.tanh(c_t)
LstmState lstm_cell(const Vec& x, const Vec& h_prev, const Vec& c_prev, const LstmWeights& w,
                    LstmCache* cache = nullptr);

struct LstmStepGrads {
    Matrix grad_w_x;
    Matrix grad_w_h;
    Vec grad_b;
    Vec grad_x;
    Vec grad_h_prev;
    Vec grad_c_prev;
};

// Backward through one cached step given dL/dh_t and dL/dc_t.
LstmStepGrads lstm_cell_backward(const LstmWeights& w, const LstmCache& cache, const Vec& dh,
                                 const Vec& dc);

// Slot-bound wrapper used by the temporal decoder.
class LstmLayer {
public:
    LstmLayer() = default;
    LstmLayer(std::string name, std::size_t input_dim, std::size_t hidden_dim);

    void register_params(ParamStore& store) const;
    LstmWeights weights(const ParamStore& store) const;

    LstmState step(const ParamStore& store, const Vec& x, const LstmState& prev,
                   LstmCache* cache = nullptr) const;
    // accumulates weight grads into the store; returns (grad_x, grad_h_prev, grad_c_prev)
    LstmStepGrads step_backward(ParamStore& store, const LstmCache& cache, const Vec& dh,
                                const Vec& dc) const;

    std::size_t hidden_dim() const { return hidden_; }

private:
    std::string wx_name_, wh_name_, b_name_;
    std::size_t input_ = 0, hidden_ = 0;
};

}  // namespace mmfuse
