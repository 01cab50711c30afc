#pragma once

#include <string>

#include "mmfuse/matrix.hpp"
#include "mmfuse/param_store.hpp"

namespace mmfuse {

enum class Activation { Linear, Relu, Tanh, Sigmoid };

double activate(Activation act, double pre);
// derivative of the activation given the pre-activation value
double activate_grad(Activation act, double pre);

// Cached forward inputs needed by dense_backward.
struct DenseCache {
    Vec x;    // layer input
    Vec pre;  // W x + b before the activation
};

// act(W x + b)
Vec dense_forward(const Vec& x, const Matrix& w, const Vec& b, Activation act,
                  DenseCache* cache = nullptr);

struct DenseGrads {
    Matrix grad_w;
    Vec grad_b;
    Vec grad_x;
};

// Exact partial derivatives of the layer output chained with the upstream
// gradient dL/dy.
DenseGrads dense_backward(const Matrix& w, const DenseCache& cache, const Vec& upstream,
                          Activation act);

// A dense layer bound to two ParamStore slots. forward reads the current
// values from the store; backward accumulates into the store's grad buffers.
class DenseLayer {
public:
    DenseLayer() = default;
    DenseLayer(std::string name, std::size_t in_dim, std::size_t out_dim, Activation act);

    void register_params(ParamStore& store) const;

    Vec forward(const ParamStore& store, const Vec& x, DenseCache* cache = nullptr) const;
    // returns grad_x
    Vec backward(ParamStore& store, const DenseCache& cache, const Vec& upstream) const;

    const std::string& weight_name() const { return w_name_; }
    const std::string& bias_name() const { return b_name_; }
    std::size_t in_dim() const { return in_; }
    std::size_t out_dim() const { return out_; }

private:
    std::string w_name_, b_name_;
    std::size_t in_ = 0, out_ = 0;
    Activation act_ = Activation::Linear;
};

}  // namespace mmfuse
