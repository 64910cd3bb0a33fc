#include "orgrad/learner.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace orgrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_incoherence(const TuckerTensor& t) {
    double v = 0;
    for (const Matrix& u : t.factors) v = std::max(v, incoherence_of(u));
    return v;
}

}  // namespace

StepSchedule StepSchedule::fixed(double eta) {
    if (!(eta >= 0) || !std::isfinite(eta))
        throw std::invalid_argument("fixed schedule needs eta >= 0");
    StepSchedule s;
    s.kind = Kind::Fixed;
    s.eta = eta;
    return s;
}

StepSchedule StepSchedule::adaptive(double eta0, std::int64_t t0) {
    if (!(eta0 > 0) || !std::isfinite(eta0))
        throw std::invalid_argument("adaptive schedule needs eta0 > 0");
    if (t0 < 1) throw std::invalid_argument("adaptive schedule needs t0 >= 1");
    StepSchedule s;
    s.kind = Kind::Adaptive;
    s.eta0 = eta0;
    s.t0 = t0;
    return s;
}

double step_size_at(const StepSchedule& s, std::int64_t t) {
    if (t < 0) throw std::invalid_argument("negative step index");
    if (s.kind == StepSchedule::Kind::Fixed) return s.eta;
    // t/t0 + 1 lies in [2^{k-1}, 2^k - 1] within phase k, so the phase index
    // is the bit width of that quotient.
    const std::uint64_t q = static_cast<std::uint64_t>(t / s.t0) + 1;
    const int k = std::bit_width(q);
    return std::ldexp(s.eta0, -k);
}

StepInfo orgrad_step(LearnerState& state, const Covariate& x, double y) {
    StepInfo info;
    info.eta = step_size_at(state.schedule, state.t);

    // A numerically rank-collapsed iterate surfaces as a runtime_error from
    // the pinv or SVD inside projection/retraction; that is a left-manifold
    // condition, reported like any other divergence.
    try {
        TangentVector tv = project_tangent(state.estimate, x);
        // <X, C x U's> = <X contracted by the U's, C>, and the contraction is
        // the projection's core part.
        info.y_hat = inner(tv.core_part, state.estimate.core);
        info.grad_scalar = dloss(state.model, info.y_hat, y);
        if (!std::isfinite(info.y_hat) || !std::isfinite(info.grad_scalar))
            throw DivergenceError(state.t);
        tv.scale(info.grad_scalar);
        state.estimate = retract(state.estimate, tv, info.eta);
    } catch (const DivergenceError&) {
        throw;
    } catch (const std::runtime_error&) {
        throw DivergenceError(state.t);
    }
    state.t += 1;

    for (double v : state.estimate.core.entries)
        if (!std::isfinite(v)) throw DivergenceError(state.t - 1);
    return info;
}

RunResult run(LearnerState state, ObservationStream& stream, const TuckerTensor* truth,
              const RunOptions& opt) {
    if (opt.horizon < 0) throw std::invalid_argument("negative horizon");
    const std::int64_t stride =
        opt.log_stride > 0 ? opt.log_stride : std::max<std::int64_t>(1, opt.horizon / 2000);

    RunResult out;
    out.log.horizon = opt.horizon;
    const double truth_norm = truth ? fro_norm(*truth) : kNaN;
    DenseTensor truth_dense;
    if (truth && opt.track_sup) truth_dense = materialize(*truth);

    double regret = 0.0, prediction_gap = 0.0;

    // Snapshot of the current iterate; the loop takes it before stepping so a
    // record labeled t always describes T_t.
    auto describe = [&](std::int64_t t, double fro_err) {
        TrajectoryRecord r;
        r.t = t;
        r.fro_err = fro_err;
        r.rel_err = truth ? fro_err / truth_norm : kNaN;
        if (truth && opt.track_sup) {
            DenseTensor diff = materialize(state.estimate);
            axpy(-1.0, truth_dense, diff);
            r.sup_err = sup_norm(diff);
        } else {
            r.sup_err = kNaN;
        }
        r.incoh = opt.track_incoh ? max_incoherence(state.estimate) : kNaN;
        r.regret = truth ? regret : kNaN;
        return r;
    };

    for (std::int64_t t = 0; t < opt.horizon; ++t) {
        const Observation obs = stream.next();
        const bool logged = (t % stride == 0);
        double y_mean = kNaN;
        if (truth && (opt.track_prediction_gap || logged))
            y_mean = mean_response(state.model, covariate_inner(obs.x, *truth));

        double fro_err = kNaN;
        if (truth) {
            fro_err = fro_dist(state.estimate, *truth);
            regret += 0.5 * fro_err * fro_err;
        }
        TrajectoryRecord rec;
        if (logged) rec = describe(t, fro_err);

        StepInfo info;
        try {
            info = orgrad_step(state, obs.x, obs.y);
        } catch (const DivergenceError& e) {
            out.log.diverged = true;
            out.log.diverged_at = e.t;
            break;
        }
        if (truth && opt.track_prediction_gap) {
            const double gap = info.y_hat - y_mean;
            prediction_gap += 0.5 * gap * gap;
        }
        if (logged) {
            rec.eta = info.eta;
            rec.y_hat = info.y_hat;
            rec.y_mean = y_mean;
            out.log.records.push_back(rec);
        }
    }

    out.log.final_regret = regret;
    out.log.final_prediction_gap = prediction_gap;
    if (!out.log.diverged) {
        TrajectoryRecord rec = describe(
            opt.horizon, truth ? fro_dist(state.estimate, *truth) : kNaN);
        rec.eta = step_size_at(state.schedule, opt.horizon);
        rec.y_hat = kNaN;
        rec.y_mean = kNaN;
        out.log.records.push_back(rec);
    }
    out.final_estimate = std::move(state.estimate);
    return out;
}

TuckerTensor offline_rgrad(const std::vector<Observation>& batch, TuckerTensor init,
                           const LossModel& model, double eta, std::int64_t iterations) {
    if (batch.empty()) throw std::invalid_argument("offline run needs a non-empty batch");
    if (iterations < 0) throw std::invalid_argument("negative iteration count");
    const Dims dims = init.dims();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (std::int64_t it = 0; it < iterations; ++it) {
        DenseTensor grad(dims);
        for (const Observation& obs : batch) {
            const double theta = covariate_inner(obs.x, init);
            const double g = dloss(model, theta, obs.y);
            if (!std::isfinite(g)) throw DivergenceError(it);
            if (obs.x.kind == DesignKind::Gaussian)
                axpy(g * inv_n, obs.x.dense, grad);
            else
                grad.at(obs.x.omega) += g * obs.x.scale * inv_n;
        }
        TangentVector tv = project_tangent(init, grad);
        init = retract(init, tv, eta);
        for (double v : init.core.entries)
            if (!std::isfinite(v)) throw DivergenceError(it);
    }
    return init;
}

}  // namespace orgrad
