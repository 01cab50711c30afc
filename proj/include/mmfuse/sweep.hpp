#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mmfuse/dataset.hpp"
#include "mmfuse/trainer.hpp"

namespace mmfuse {

// Thread cap for sweep cells: MMFUSE_THREADS if set, hardware concurrency
// otherwise, never below 1.
std::size_t sweep_thread_cap();

// Runs job(0..count-1) with at most max_threads workers. Each job owns its
// output slot, so parallel and serial execution give identical results.
void run_parallel(std::size_t count, std::size_t max_threads,
                  const std::function<void(std::size_t)>& job);

struct SweepRun {
    double value = 0.0;
    std::uint64_t seed = 0;
    double primary = 0.0;    // bce (cls) / nmse (reg) / nmse_tmp (tmp)
    double secondary = 0.0;  // accuracy (cls) / src (tmp); unused for reg
};

struct SweepSummary {
    double value = 0.0;
    std::size_t n = 0;
    double primary_mean = 0.0, primary_std = 0.0;
    double secondary_mean = 0.0, secondary_std = 0.0;
};

struct SweepSpec {
    std::string param;  // "lambda" | "tint"
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;
    TrainConfig base;
    double train_ratio = 0.64, val_ratio = 0.16, test_ratio = 0.20;
    std::size_t max_threads = 0;  // 0 = sweep_thread_cap()
};

// Rewrites every sequence target onto a coarser grid of t_int hours by
// window-summing; the base interval is taken from the first sample's
// timestamp grid.
Dataset resample_dataset(const Dataset& ds, double t_int);

// Trains one model per (value x seed) cell over its own seeded split and
// returns the test metrics in deterministic (value-major) order. Each cell is
// internally single-threaded.
std::vector<SweepRun> run_sweep(const SweepSpec& spec, const Dataset& dataset);

std::vector<SweepSummary> summarize_sweep(const SweepSpec& spec,
                                          const std::vector<SweepRun>& runs);

std::string primary_metric_name(TargetKind kind);
std::string secondary_metric_name(TargetKind kind);  // empty if none

void write_sweep_runs_csv(const std::string& path, const SweepSpec& spec,
                          const std::vector<SweepRun>& runs);
void write_sweep_summary_csv(const std::string& path, const SweepSpec& spec,
                             const std::vector<SweepSummary>& rows);

}  // namespace mmfuse
