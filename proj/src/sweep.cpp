#include "mmfuse/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mmfuse/metrics.hpp"

namespace mmfuse {

std::size_t sweep_thread_cap() {
    if (const char* env = std::getenv("MMFUSE_THREADS")) {
        const long v = std::atol(env);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? hw : 1;
}

void run_parallel(std::size_t count, std::size_t max_threads,
                  const std::function<void(std::size_t)>& job) {
    if (count == 0) return;
    const std::size_t workers = std::min(std::max<std::size_t>(max_threads, 1), count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

Dataset resample_dataset(const Dataset& ds, double t_int) {
    if (ds.kind != TargetKind::Tmp)
        throw std::invalid_argument("resample_dataset: dataset is not temporal");
    if (ds.empty()) throw std::invalid_argument("resample_dataset: empty dataset");
    const Vec& ts = ds.samples.front().target.sequence.timestamps;
    const double base = ts.front();
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (std::fabs(ts[i] - base * static_cast<double>(i + 1)) > 1e-6)
            throw std::invalid_argument(
                "resample_dataset: timestamps are not a uniform grid from one base interval");
    Dataset out;
    out.schema = ds.schema;
    out.kind = ds.kind;
    out.samples.reserve(ds.size());
    for (const auto& s : ds.samples) {
        MultimodalSample copy = s;
        copy.target =
            PopularityTarget::temporal(resample_sequence(s.target.sequence.values, base, t_int));
        out.samples.push_back(std::move(copy));
    }
    return out;
}

namespace {

SweepRun run_cell(const SweepSpec& spec, const Dataset& dataset, double value,
                  std::uint64_t seed) {
    TrainConfig cfg = spec.base;
    cfg.seed = seed;
    const Dataset* data = &dataset;
    Dataset resampled;
    if (spec.param == "lambda") {
        cfg.lambda = value;
    } else if (spec.param == "tint") {
        resampled = resample_dataset(dataset, value);
        data = &resampled;
    } else {
        throw std::invalid_argument("unknown sweep parameter '" + spec.param +
                                    "' (expected lambda|tint)");
    }

    DatasetSplits splits =
        split_dataset(*data, spec.train_ratio, spec.val_ratio, spec.test_ratio, seed);
    StandardizationStats stats = standardize_fit(splits.train);
    standardize_apply(stats, splits.train);
    standardize_apply(stats, splits.val);
    standardize_apply(stats, splits.test);

    TrainResult trained = train(splits.train, splits.val, stats, cfg);

    SweepRun run;
    run.value = value;
    run.seed = seed;
    run.primary = eval_metric(trained.model, splits.test);
    switch (cfg.decoder) {
        case TargetKind::Cls: run.secondary = eval_accuracy(trained.model, splits.test); break;
        case TargetKind::Tmp: run.secondary = eval_src(trained.model, splits.test); break;
        case TargetKind::Reg: run.secondary = 0.0; break;
    }
    return run;
}

}  // namespace

std::vector<SweepRun> run_sweep(const SweepSpec& spec, const Dataset& dataset) {
    if (spec.values.empty() || spec.seeds.empty())
        throw std::invalid_argument("run_sweep: sweep values and seeds must be non-empty");
    const std::size_t count = spec.values.size() * spec.seeds.size();
    std::vector<SweepRun> runs(count);
    const std::size_t threads = spec.max_threads ? spec.max_threads : sweep_thread_cap();
    run_parallel(count, threads, [&](std::size_t i) {
        const double value = spec.values[i / spec.seeds.size()];
        const std::uint64_t seed = spec.seeds[i % spec.seeds.size()];
        runs[i] = run_cell(spec, dataset, value, seed);
    });
    return runs;
}

std::vector<SweepSummary> summarize_sweep(const SweepSpec& spec,
                                          const std::vector<SweepRun>& runs) {
    std::vector<SweepSummary> rows;
    for (double value : spec.values) {
        SweepSummary row;
        row.value = value;
        Vec primary, secondary;
        for (const auto& r : runs) {
            if (r.value != value) continue;
            primary.push_back(r.primary);
            secondary.push_back(r.secondary);
        }
        row.n = primary.size();
        if (row.n == 0) continue;
        const auto mean_std = [](const Vec& v, double& mean, double& sd) {
            mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            sd = std::sqrt(var / static_cast<double>(v.size()));
        };
        mean_std(primary, row.primary_mean, row.primary_std);
        mean_std(secondary, row.secondary_mean, row.secondary_std);
        rows.push_back(row);
    }
    return rows;
}

std::string primary_metric_name(TargetKind kind) {
    switch (kind) {
        case TargetKind::Cls: return "bce";
        case TargetKind::Reg: return "nmse";
        case TargetKind::Tmp: return "nmse_tmp";
    }
    return "metric";
}

std::string secondary_metric_name(TargetKind kind) {
    switch (kind) {
        case TargetKind::Cls: return "accuracy";
        case TargetKind::Reg: return "";
        case TargetKind::Tmp: return "src";
    }
    return "";
}

void write_sweep_runs_csv(const std::string& path, const SweepSpec& spec,
                          const std::vector<SweepRun>& runs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write sweep runs file: " + path);
    const std::string primary = primary_metric_name(spec.base.decoder);
    const std::string secondary = secondary_metric_name(spec.base.decoder);
    out << "param,value,seed," << primary;
    if (!secondary.empty()) out << ',' << secondary;
    out << "\n";
    for (const auto& r : runs) {
        out << spec.param << ',' << format_double(r.value) << ',' << r.seed << ','
            << format_double(r.primary);
        if (!secondary.empty()) out << ',' << format_double(r.secondary);
        out << "\n";
    }
}

void write_sweep_summary_csv(const std::string& path, const SweepSpec& spec,
                             const std::vector<SweepSummary>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write sweep summary file: " + path);
    const std::string primary = primary_metric_name(spec.base.decoder);
    const std::string secondary = secondary_metric_name(spec.base.decoder);
    out << "param,value,n," << primary << "_mean," << primary << "_std";
    if (!secondary.empty()) out << ',' << secondary << "_mean," << secondary << "_std";
    out << "\n";
    for (const auto& r : rows) {
        out << spec.param << ',' << format_double(r.value) << ',' << r.n << ','
            << format_double(r.primary_mean) << ',' << format_double(r.primary_std);
        if (!secondary.empty())
            out << ',' << format_double(r.secondary_mean) << ',' << format_double(r.secondary_std);
        out << "\n";
    }
}

}  // namespace mmfuse
