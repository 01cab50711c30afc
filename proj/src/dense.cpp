#include "mmfuse/dense.hpp"

#include <cmath>

namespace mmfuse {

double activate(Activation act, double pre) {
    switch (act) {
        case Activation::Linear: return pre;
        case Activation::Relu: return pre > 0.0 ? pre : 0.0;
        case Activation::Tanh: return std::tanh(pre);
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-pre));
    }
    return pre;
}

double activate_grad(Activation act, double pre) {
    switch (act) {
        case Activation::Linear: return 1.0;
        case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(pre);
            return 1.0 - t * t;
        }
        case Activation::Sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-pre));
            return s * (1.0 - s);
        }
    }
    return 1.0;
}

Vec dense_forward(const Vec& x, const Matrix& w, const Vec& b, Activation act, DenseCache* cache) {
    check_dim(w.cols() == x.size() && w.rows() == b.size(),
              "dense_forward W[" + std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                  "], x[" + std::to_string(x.size()) + "], b[" + std::to_string(b.size()) + "]");
    Vec pre = matvec(w, x);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += b[i];
    Vec out(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) out[i] = activate(act, pre[i]);
    if (cache) {
        cache->x = x;
        cache->pre = std::move(pre);
    }
    return out;
}

DenseGrads dense_backward(const Matrix& w, const DenseCache& cache, const Vec& upstream,
                          Activation act) {
    if (cache.x.empty() && w.cols() != 0)
        throw std::logic_error("dense_backward: forward cache not populated");
    check_dim(upstream.size() == w.rows() && cache.pre.size() == w.rows(), "dense_backward");
    Vec dpre(upstream.size());
    for (std::size_t i = 0; i < upstream.size(); ++i)
        dpre[i] = upstream[i] * activate_grad(act, cache.pre[i]);
    DenseGrads g;
    g.grad_w = Matrix(w.rows(), w.cols());
    add_outer(g.grad_w, dpre, cache.x);
    g.grad_b = dpre;
    g.grad_x = matvec_transposed(w, dpre);
    return g;
}

DenseLayer::DenseLayer(std::string name, std::size_t in_dim, std::size_t out_dim, Activation act)
    : w_name_(name + "/W"), b_name_(name + "/b"), in_(in_dim), out_(out_dim), act_(act) {}

void DenseLayer::register_params(ParamStore& store) const {
    store.add(w_name_, out_, in_);
    store.add(b_name_, out_, 1, /*is_bias=*/true);
}

Vec DenseLayer::forward(const ParamStore& store, const Vec& x, DenseCache* cache) const {
    return dense_forward(x, store.value(w_name_), store.value(b_name_).values(), act_, cache);
}

Vec DenseLayer::backward(ParamStore& store, const DenseCache& cache, const Vec& upstream) const {
    DenseGrads g = dense_backward(store.value(w_name_), cache, upstream, act_);
    Matrix& gw = store.grad(w_name_);
    for (std::size_t i = 0; i < gw.size(); ++i) gw.values()[i] += g.grad_w.values()[i];
    Matrix& gb = store.grad(b_name_);
    for (std::size_t i = 0; i < gb.size(); ++i) gb.values()[i] += g.grad_b[i];
    return std::move(g.grad_x);
}

}  // namespace mmfuse
