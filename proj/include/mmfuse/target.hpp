#pragma once

#include <string>

#include "mmfuse/matrix.hpp"

namespace mmfuse {

enum class TargetKind { Cls, Reg, Tmp };

std::string to_string(TargetKind k);
TargetKind target_kind_from_string(const std::string& s);

// Popularity sequence with absolute timestamps (hours since release).
struct SequenceTarget {
    Vec values;
    Vec timestamps;
};

void validate(const SequenceTarget& t);

// Tagged union over the three groundtruth forms. scalar carries the binary
// label (0/1) for Cls and the real value for Reg.
struct PopularityTarget {
    TargetKind kind = TargetKind::Reg;
    double scalar = 0.0;
    SequenceTarget sequence;

    static PopularityTarget binary(double label) { return {TargetKind::Cls, label, {}}; }
    static PopularityTarget real(double value) { return {TargetKind::Reg, value, {}}; }
    static PopularityTarget temporal(SequenceTarget seq) {
        return {TargetKind::Tmp, 0.0, std::move(seq)};
    }
};

}  // namespace mmfuse
