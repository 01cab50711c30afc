#include "mmfuse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mmfuse/rng.hpp"

namespace mmfuse {

using nlohmann::json;

int Dataset::schema_index(const std::string& name) const {
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (schema[i].name == name) return static_cast<int>(i);
    return -1;
}

namespace {

PopularityTarget parse_target(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "cls") {
        const double y = j.at("y").get<double>();
        if (y != 0.0 && y != 1.0) throw std::invalid_argument("cls target must be 0 or 1");
        return PopularityTarget::binary(y);
    }
    if (kind == "reg") return PopularityTarget::real(j.at("y").get<double>());
    if (kind == "tmp") {
        SequenceTarget seq;
        seq.values = j.at("y").get<Vec>();
        seq.timestamps = j.at("t").get<Vec>();
        validate(seq);
        return PopularityTarget::temporal(std::move(seq));
    }
    throw std::invalid_argument("unknown target kind '" + kind + "'");
}

json target_to_json(const PopularityTarget& t) {
    json j;
    j["kind"] = to_string(t.kind);
    switch (t.kind) {
        case TargetKind::Cls:
        case TargetKind::Reg: j["y"] = t.scalar; break;
        case TargetKind::Tmp:
            j["y"] = t.sequence.values;
            j["t"] = t.sequence.timestamps;
            break;
    }
    return j;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    Dataset ds;
    std::map<std::string, std::size_t> dims;
    bool kind_set = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        MultimodalSample s;
        try {
            json j = json::parse(line);
            s.id = j.at("id").get<std::string>();
            for (const auto& [name, arr] : j.at("modalities").items())
                s.modalities[name] = arr.get<Vec>();
            s.target = parse_target(j.at("target"));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed record: " + e.what());
        }
        if (!kind_set) {
            ds.kind = s.target.kind;
            kind_set = true;
        } else if (s.target.kind != ds.kind) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": mixed target kinds (" + to_string(s.target.kind) +
                                     " vs " + to_string(ds.kind) + ")");
        }
        for (const auto& [name, vec] : s.modalities) {
            auto it = dims.find(name);
            if (it == dims.end()) {
                dims[name] = vec.size();
            } else if (it->second != vec.size()) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": modality '" +
                                         name + "' has dim " + std::to_string(vec.size()) +
                                         ", expected " + std::to_string(it->second));
            }
            if (!all_finite(vec))
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": modality '" +
                                         name + "' has non-finite values");
        }
        ds.samples.push_back(std::move(s));
    }
    for (const auto& [name, dim] : dims) ds.schema.push_back({name, dim});  // map is sorted
    return ds;
}

void save_dataset(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    for (const auto& s : ds.samples) {
        json j;
        j["id"] = s.id;
        j["modalities"] = json::object();
        for (const auto& [name, vec] : s.modalities) j["modalities"][name] = vec;
        j["target"] = target_to_json(s.target);
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Vec concat_features(const Dataset& ds, const MultimodalSample& s) {
    Vec out;
    for (const auto& m : ds.schema) {
        auto it = s.modalities.find(m.name);
        if (it == s.modalities.end())
            throw std::invalid_argument("concat_features: sample '" + s.id +
                                        "' is missing modality '" + m.name + "'");
        out.insert(out.end(), it->second.begin(), it->second.end());
    }
    return out;
}

StandardizationStats standardize_fit(const Dataset& train) {
    if (train.empty()) throw std::invalid_argument("standardize_fit: empty training split");
    StandardizationStats stats;
    for (const auto& m : train.schema) {
        Vec mean(m.dim, 0.0), var(m.dim, 0.0);
        std::size_t count = 0;
        for (const auto& s : train.samples) {
            auto it = s.modalities.find(m.name);
            if (it == s.modalities.end()) continue;
            ++count;
            for (std::size_t d = 0; d < m.dim; ++d) mean[d] += it->second[d];
        }
        if (count > 0)
            for (double& v : mean) v /= static_cast<double>(count);
        for (const auto& s : train.samples) {
            auto it = s.modalities.find(m.name);
            if (it == s.modalities.end()) continue;
            for (std::size_t d = 0; d < m.dim; ++d) {
                const double c = it->second[d] - mean[d];
                var[d] += c * c;
            }
        }
        Vec sd(m.dim, 0.0);
        if (count > 0)
            for (std::size_t d = 0; d < m.dim; ++d)
                sd[d] = std::sqrt(var[d] / static_cast<double>(count));
        stats.names.push_back(m.name);
        stats.mean.push_back(std::move(mean));
        stats.std.push_back(std::move(sd));
    }
    return stats;
}

void standardize_apply(const StandardizationStats& stats, Dataset& ds) {
    for (auto& s : ds.samples) {
        for (std::size_t m = 0; m < stats.names.size(); ++m) {
            auto it = s.modalities.find(stats.names[m]);
            if (it == s.modalities.end()) continue;  // missing modalities untouched
            check_dim(it->second.size() == stats.mean[m].size(), "standardize_apply dims");
            for (std::size_t d = 0; d < it->second.size(); ++d)
                it->second[d] =
                    (it->second[d] - stats.mean[m][d]) / std::max(stats.std[m][d], 1e-8);
        }
    }
}

SequenceTarget resample_sequence(const Vec& increments, double base_interval, double t_int) {
    if (increments.empty()) throw std::invalid_argument("resample_sequence: empty increments");
    if (!(base_interval > 0.0) || !(t_int > 0.0))
        throw std::invalid_argument("resample_sequence: intervals must be positive");
    const double ratio = t_int / base_interval;
    const auto window = static_cast<std::size_t>(std::llround(ratio));
    if (window < 1 || std::fabs(ratio - static_cast<double>(window)) > 1e-9)
        throw std::invalid_argument("resample_sequence: t_int must be an integer multiple of the "
                                    "base interval");
    SequenceTarget out;
    for (std::size_t start = 0; start < increments.size(); start += window) {
        const std::size_t end = std::min(start + window, increments.size());
        double sum = 0.0;
        for (std::size_t i = start; i < end; ++i) sum += increments[i];
        out.values.push_back(sum);
        out.timestamps.push_back(base_interval * static_cast<double>(end));
    }
    return out;
}

DatasetSplits split_dataset(const Dataset& ds, double train_ratio, double val_ratio,
                            double test_ratio, std::uint64_t seed) {
    if (!(train_ratio > 0.0) || !(val_ratio > 0.0) || !(test_ratio > 0.0))
        throw std::invalid_argument("split_dataset: ratios must be positive");
    if (std::fabs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
        throw std::invalid_argument("split_dataset: ratios must sum to 1");

    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.index(i)]);

    const auto n = static_cast<double>(ds.size());
    auto n_train = static_cast<std::size_t>(std::llround(n * train_ratio));
    auto n_val = static_cast<std::size_t>(std::llround(n * val_ratio));
    n_train = std::min(n_train, ds.size());
    n_val = std::min(n_val, ds.size() - n_train);

    DatasetSplits splits;
    for (Dataset* part : {&splits.train, &splits.val, &splits.test}) {
        part->schema = ds.schema;
        part->kind = ds.kind;
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        const MultimodalSample& s = ds.samples[order[i]];
        if (i < n_train)
            splits.train.samples.push_back(s);
        else if (i < n_train + n_val)
            splits.val.samples.push_back(s);
        else
            splits.test.samples.push_back(s);
    }
    return splits;
}

}  // namespace mmfuse
