#include "mmfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mmfuse {

namespace {

double mean_of(const Vec& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// population variance (divide by N)
double pop_var(const Vec& v, double mean) {
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

}  // namespace

double nmse(const Vec& y, const Vec& yhat) {
    if (y.size() < 2) throw std::invalid_argument("nmse: need at least 2 samples");
    check_dim(y.size() == yhat.size(), "nmse y/yhat");
    const double mu = mean_of(y);
    const double var = pop_var(y, mu);
    if (var <= 0.0) throw std::invalid_argument("nmse: groundtruth is constant (sigma = 0)");
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) sse += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return sse / (static_cast<double>(y.size()) * var);
}

double nmse_tmp(const std::vector<Vec>& y, const std::vector<Vec>& yhat) {
    if (y.empty()) throw std::invalid_argument("nmse_tmp: empty input");
    check_dim(y.size() == yhat.size(), "nmse_tmp sample count");
    // global population variance over all groundtruth entries
    double sum = 0.0;
    std::size_t count = 0;
    for (const Vec& seq : y) {
        for (double v : seq) sum += v;
        count += seq.size();
    }
    if (count == 0) throw std::invalid_argument("nmse_tmp: empty sequences");
    const double mu = sum / static_cast<double>(count);
    double var = 0.0;
    for (const Vec& seq : y)
        for (double v : seq) var += (v - mu) * (v - mu);
    var /= static_cast<double>(count);
    if (var <= 0.0) throw std::invalid_argument("nmse_tmp: groundtruth is constant (sigma = 0)");

    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        check_dim(y[i].size() == yhat[i].size(), "nmse_tmp sequence length");
        if (y[i].empty()) throw std::invalid_argument("nmse_tmp: empty sequence");
        double se = 0.0;
        for (std::size_t j = 0; j < y[i].size(); ++j)
            se += (y[i][j] - yhat[i][j]) * (y[i][j] - yhat[i][j]);
        acc += se / static_cast<double>(y[i].size());
    }
    return acc / (static_cast<double>(y.size()) * var);
}

Vec rank_transform(const Vec& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    Vec ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double src(const std::vector<Vec>& y, const std::vector<Vec>& yhat, bool use_ranks) {
    if (y.empty()) throw std::invalid_argument("src: empty input");
    check_dim(y.size() == yhat.size(), "src sample count");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        check_dim(y[i].size() == yhat[i].size(), "src sequence length");
        if (y[i].size() < 2) throw std::invalid_argument("src: sequences need T >= 2");
        const Vec a = use_ranks ? rank_transform(y[i]) : y[i];
        const Vec b = use_ranks ? rank_transform(yhat[i]) : yhat[i];
        const double ma = mean_of(a), mb = mean_of(b);
        const double sa = std::sqrt(pop_var(a, ma)), sb = std::sqrt(pop_var(b, mb));
        if (sa == 0.0 || sb == 0.0) continue;  // constant sequence contributes 0
        double r = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) r += ((a[j] - ma) / sa) * ((b[j] - mb) / sb);
        r /= static_cast<double>(a.size());
        acc += std::clamp(r, -1.0, 1.0);
    }
    return acc / static_cast<double>(y.size());
}

}  // namespace mmfuse
