#include "mmfuse/target.hpp"

#include <stdexcept>

namespace mmfuse {

std::string to_string(TargetKind k) {
    switch (k) {
        case TargetKind::Cls: return "cls";
        case TargetKind::Reg: return "reg";
        case TargetKind::Tmp: return "tmp";
    }
    return "reg";
}

TargetKind target_kind_from_string(const std::string& s) {
    if (s == "cls") return TargetKind::Cls;
    if (s == "reg") return TargetKind::Reg;
    if (s == "tmp") return TargetKind::Tmp;
    throw std::invalid_argument("unknown target kind: " + s + " (expected cls|reg|tmp)");
}

void validate(const SequenceTarget& t) {
    if (t.values.empty()) throw std::invalid_argument("SequenceTarget: empty sequence");
    check_dim(t.values.size() == t.timestamps.size(), "SequenceTarget values/timestamps");
    for (std::size_t i = 1; i < t.timestamps.size(); ++i)
        if (!(t.timestamps[i] > t.timestamps[i - 1]))
            throw std::invalid_argument("SequenceTarget: timestamps must be strictly increasing");
}

}  // namespace mmfuse
