#pragma once

#include <string>
#include <vector>

#include "mmfuse/matrix.hpp"

namespace mmfuse {

struct MetricReport {
    std::string name;
    double value = 0.0;
    std::size_t n = 0;
    Vec per_sample;  // optional, empty unless requested
};

// (1 / (N sigma^2)) * sum_i (y_i - yhat_i)^2 with sigma the population
// standard deviation of y. Errors if y is constant or N < 2.
double nmse(const Vec& y, const Vec& yhat);

// Temporal variant: (1 / (N sigma_y^2)) * sum_i (1/T_i) sum_j (y_ij - yhat_ij)^2
// with sigma_y the population std over every groundtruth entry.
double nmse_tmp(const std::vector<Vec>& y, const std::vector<Vec>& yhat);

// Mean over samples of the product-moment correlation of the two sequences
// after per-sequence standardization (population stds). A sample where either
// sequence is constant contributes 0. use_ranks=true replaces each sequence
// by its ranks first (ties get average ranks), giving the textbook rank
// correlation instead of the printed formula.
double src(const std::vector<Vec>& y, const std::vector<Vec>& yhat, bool use_ranks = false);

// per-sequence ranks with average ranks on ties
Vec rank_transform(const Vec& v);

}  // namespace mmfuse
