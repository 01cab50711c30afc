#include "mmfuse/lstm.hpp"

#include <cmath>

namespace mmfuse {

namespace {
inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }
}  // namespace

LstmState lstm_cell(const Vec& x, const Vec& h_prev, const Vec& c_prev, const LstmWeights& w,
                    LstmCache* cache) {
    const std::size_t hid = h_prev.size();
    check_dim(w.w_x->rows() == 4 * hid && w.w_x->cols() == x.size(), "lstm_cell W_x");
    check_dim(w.w_h->rows() == 4 * hid && w.w_h->cols() == hid, "lstm_cell W_h");
    check_dim(w.b->size() == 4 * hid && c_prev.size() == hid, "lstm_cell b/c_prev");

    Vec pre = matvec(*w.w_x, x);
    Vec pre_h = matvec(*w.w_h, h_prev);
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += pre_h[i] + (*w.b)[i];

    Vec gi(hid), gf(hid), gg(hid), go(hid);
    for (std::size_t i = 0; i < hid; ++i) {
        gi[i] = sigmoid(pre[i]);
        gf[i] = sigmoid(pre[hid + i]);
        gg[i] = std::tanh(pre[2 * hid + i]);
        go[i] = sigmoid(pre[3 * hid + i]);
    }

    LstmState out;
    out.c.resize(hid);
    out.h.resize(hid);
    Vec tanh_c(hid);
    for (std::size_t i = 0; i < hid; ++i) {
        out.c[i] = gf[i] * c_prev[i] + gi[i] * gg[i];
        tanh_c[i] = std::tanh(out.c[i]);
        out.h[i] = go[i] * tanh_c[i];
    }

    if (cache) {
        cache->x = x;
        cache->h_prev = h_prev;
        cache->c_prev = c_prev;
        cache->gate_i = std::move(gi);
        cache->gate_f = std::move(gf);
        cache->gate_g = std::move(gg);
        cache->gate_o = std::move(go);
        cache->c = out.c;
        cache->tanh_c = std::move(tanh_c);
    }
    return out;
}

LstmStepGrads lstm_cell_backward(const LstmWeights& w, const LstmCache& cache, const Vec& dh,
                                 const Vec& dc) {
    const std::size_t hid = cache.h_prev.size();
    if (cache.gate_i.empty() && hid != 0)
        throw std::logic_error("lstm_cell_backward: forward cache not populated");
    check_dim(dh.size() == hid && dc.size() == hid, "lstm_cell_backward upstream");

    Vec dct(hid), dpre(4 * hid);
    LstmStepGrads g;
    g.grad_c_prev.resize(hid);
    for (std::size_t i = 0; i < hid; ++i) {
        const double do_ = dh[i] * cache.tanh_c[i];
        dct[i] = dc[i] + dh[i] * cache.gate_o[i] * (1.0 - cache.tanh_c[i] * cache.tanh_c[i]);
        const double di = dct[i] * cache.gate_g[i];
        const double df = dct[i] * cache.c_prev[i];
        const double dg = dct[i] * cache.gate_i[i];
        g.grad_c_prev[i] = dct[i] * cache.gate_f[i];
        dpre[i] = di * cache.gate_i[i] * (1.0 - cache.gate_i[i]);
        dpre[hid + i] = df * cache.gate_f[i] * (1.0 - cache.gate_f[i]);
        dpre[2 * hid + i] = dg * (1.0 - cache.gate_g[i] * cache.gate_g[i]);
        dpre[3 * hid + i] = do_ * cache.gate_o[i] * (1.0 - cache.gate_o[i]);
    }

    g.grad_w_x = Matrix(4 * hid, cache.x.size());
    add_outer(g.grad_w_x, dpre, cache.x);
    g.grad_w_h = Matrix(4 * hid, hid);
    add_outer(g.grad_w_h, dpre, cache.h_prev);
    g.grad_b = dpre;
    g.grad_x = matvec_transposed(*w.w_x, dpre);
    g.grad_h_prev = matvec_transposed(*w.w_h, dpre);
    return g;
}

LstmLayer::LstmLayer(std::string name, std::size_t input_dim, std::size_t hidden_dim)
    : wx_name_(name + "/Wx"),
      wh_name_(name + "/Wh"),
      b_name_(name + "/b"),
      input_(input_dim),
      hidden_(hidden_dim) {}

void LstmLayer::register_params(ParamStore& store) const {
    store.add(wx_name_, 4 * hidden_, input_);
    store.add(wh_name_, 4 * hidden_, hidden_);
    store.add(b_name_, 4 * hidden_, 1, /*is_bias=*/true);
}

LstmWeights LstmLayer::weights(const ParamStore& store) const {
    return LstmWeights{&store.value(wx_name_), &store.value(wh_name_),
                       &store.value(b_name_).values()};
}

LstmState LstmLayer::step(const ParamStore& store, const Vec& x, const LstmState& prev,
                          LstmCache* cache) const {
    return lstm_cell(x, prev.h, prev.c, weights(store), cache);
}

LstmStepGrads LstmLayer::step_backward(ParamStore& store, const LstmCache& cache, const Vec& dh,
                                       const Vec& dc) const {
    LstmStepGrads g = lstm_cell_backward(weights(store), cache, dh, dc);
    Matrix& gwx = store.grad(wx_name_);
    for (std::size_t i = 0; i < gwx.size(); ++i) gwx.values()[i] += g.grad_w_x.values()[i];
    Matrix& gwh = store.grad(wh_name_);
    for (std::size_t i = 0; i < gwh.size(); ++i) gwh.values()[i] += g.grad_w_h.values()[i];
    Matrix& gb = store.grad(b_name_);
    for (std::size_t i = 0; i < gb.size(); ++i) gb.values()[i] += g.grad_b[i];
    return g;
}

}  // namespace mmfuse
