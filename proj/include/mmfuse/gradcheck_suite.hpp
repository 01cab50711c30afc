#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mmfuse {

struct GradCheckRow {
    std::string name;
    double max_err = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// Finite-difference verification of every gradient path: dense layers per
// activation, LSTM through unrolled steps, the analytic KL, the modality and
// early-fusion encoders, and the full end-to-end loss with frozen noise for
// each decoder kind.
std::vector<GradCheckRow> run_gradcheck_suite(std::uint64_t seed = 7);

}  // namespace mmfuse
