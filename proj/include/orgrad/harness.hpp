#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orgrad/config.hpp"
#include "orgrad/learner.hpp"
#include "orgrad/sampling.hpp"

namespace orgrad {

// One learner run: generate the truth, initialize, stream observations.
struct TrialSpec {
    TruthSpec truth;
    DesignKind design = DesignKind::Gaussian;
    LossModel model = LossModel::linear();
    StepSchedule schedule = StepSchedule::fixed(1e-3);
    std::int64_t horizon = 0;
    std::string init_mode = "oracle_perturb";  // or "second_moment"
    double init_c = 0.3;                       // oracle_perturb distance fraction
    std::int64_t n_init = 2000;                // second_moment sample count
    RunOptions run_opt;                        // horizon field is overridden
    std::uint64_t truth_seed = 1;
    std::uint64_t init_seed = 2;
    std::uint64_t obs_seed = 3;
};

struct TrialResult {
    TrajectoryLog log;
    TuckerTensor final_estimate;
    SpectralReport truth_report;
    double truth_norm = 0.0;
};

[[nodiscard]] TrialResult run_trial(const TrialSpec& spec);

// Runs task(0..n_tasks-1) on a bounded pool. Results must be written to
// per-index slots; the first failing index's exception is rethrown after all
// workers join, so outcomes match sequential execution.
void parallel_run(std::int64_t n_tasks, int threads,
                  const std::function<void(std::int64_t)>& task);

// Field-wise average of trajectories over trials. Trials must share the
// logging grid; a diverged trial contributes to every t it reached.
[[nodiscard]] TrajectoryLog mean_log(const std::vector<const TrajectoryLog*>& logs);

struct LinearFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

[[nodiscard]] LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Zero-intercept fit; r2 still uses the centered total sum of squares.
[[nodiscard]] LinearFit fit_through_origin(const std::vector<double>& x,
                                           const std::vector<double>& y);

[[nodiscard]] double mean_of(const std::vector<double>& v);
[[nodiscard]] double sample_std(const std::vector<double>& v);

// First logged t whose rel_err is within `factor` of the trajectory's final
// rel_err.
[[nodiscard]] std::int64_t plateau_step(const TrajectoryLog& log, double factor = 1.2);

struct HarnessOptions {
    std::string experiment;  // tradeoff | noise_sweep | completion | regret_const |
                             // regret_adaptive | movielens | diagnose
    Config cfg;              // effective (globals + section + CLI overrides)
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    bool reproducible = false;  // suppress the timestamp metadata line
};

// Runs one experiment and writes its CSV artifacts; returns the paths
// written. Progress goes to stdout.
std::vector<std::string> run_experiment(const HarnessOptions& opt);

}  // namespace orgrad
