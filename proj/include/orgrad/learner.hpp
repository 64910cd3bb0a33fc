#pragma once

#include "orgrad/sampling.hpp"

#include <stdexcept>

namespace orgrad {

// Step-size schedule. Fixed holds eta constant; the adaptive schedule runs in
// doubling phases of a base length t0: phase k = 1, 2, ... covers
// t in [(2^{k-1}-1) t0, (2^k-1) t0) and uses eta0 / 2^k, so the step size
// halves while the phase length doubles.
struct StepSchedule {
    enum class Kind { Fixed, Adaptive };
    Kind kind = Kind::Fixed;
    double eta = 0.0;     // fixed
    double eta0 = 0.0;    // adaptive
    std::int64_t t0 = 0;  // adaptive phase unit

    static StepSchedule fixed(double eta);
    static StepSchedule adaptive(double eta0, std::int64_t t0);
};

[[nodiscard]] double step_size_at(const StepSchedule& s, std::int64_t t);

// Raised when an iterate leaves the representable range; the driver flags the
// run instead of emitting garbage.
struct DivergenceError : std::runtime_error {
    std::int64_t t;
    explicit DivergenceError(std::int64_t t_)
        : std::runtime_error("estimate diverged at step " + std::to_string(t_)), t(t_) {}
};

struct LearnerState {
    TuckerTensor estimate;
    std::int64_t t = 0;
    StepSchedule schedule;
    LossModel model;
};

struct StepInfo {
    double y_hat = 0;       // prediction <X_t, T_t>, formed before the update
    double eta = 0;
    double grad_scalar = 0; // dloss at (y_hat, y)
};

// One projected-gradient-plus-retraction update in place.
StepInfo orgrad_step(LearnerState& state, const Covariate& x, double y);

struct TrajectoryRecord {
    std::int64_t t = 0;
    double eta = 0;
    double fro_err = 0, rel_err = 0;  // vs truth; NaN when truth unknown
    double sup_err = 0;               // NaN unless tracked
    double incoh = 0;                 // max factor incoherence; NaN unless tracked
    double regret = 0;                // 0.5 * sum_{s<=t} ||T_s - T*||_F^2; NaN when truth unknown
    double y_hat = 0;
    double y_mean = 0;                // E[Y_t] at the truth; NaN when truth unknown
};

struct TrajectoryLog {
    std::vector<TrajectoryRecord> records;
    std::int64_t horizon = 0;
    bool diverged = false;
    std::int64_t diverged_at = -1;
    double final_regret = 0.0;          // explicit form, 0.5 sum_{t<T} ||T_t - T*||_F^2
    double final_prediction_gap = 0.0;  // 0.5 sum_{t<T} (y_hat_t - E Y_t)^2 when tracked
};

struct RunOptions {
    std::int64_t horizon = 0;
    std::int64_t log_stride = 0;  // 0 -> max(1, horizon / 2000)
    bool track_sup = false;       // sup-norm error at recorded steps (densifies)
    bool track_incoh = false;
    bool track_prediction_gap = false;  // needs truth; evaluates E[Y_t] every step
};

struct RunResult {
    TuckerTensor final_estimate;
    TrajectoryLog log;
};

// Streams `horizon` observations through orgrad_step. Error columns are
// filled when `truth` is non-null; a divergence stops the run and flags the
// log rather than raising.
[[nodiscard]] RunResult run(LearnerState state, ObservationStream& stream,
                            const TuckerTensor* truth, const RunOptions& opt);

// Full-gradient counterpart on a fixed batch: `iterations` rounds of
// projected mean-gradient steps with constant eta. A single observation and a
// single iteration coincide with orgrad_step.
[[nodiscard]] TuckerTensor offline_rgrad(const std::vector<Observation>& batch,
                                         TuckerTensor init, const LossModel& model, double eta,
                                         std::int64_t iterations);

}  // namespace orgrad
