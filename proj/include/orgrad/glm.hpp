#pragma once

#include "orgrad/rng.hpp"

namespace orgrad {

enum class LossKind { Linear, Logistic, Poisson };

// Per-observation loss family h(theta, y) where theta is the linear
// predictor. Extreme predictors are saturated (exp arguments clamped to +-30,
// log arguments floored at 1e-15) so evaluation never overflows.
struct LossModel {
    LossKind kind = LossKind::Linear;
    double sigma = 1.0;       // linear: response noise standard deviation
    double sigma_link = 1.0;  // logistic: link temperature in f(t) = 1/(1+e^{-t/sigma_link})
    double intensity = 1.0;   // poisson: exposure I in Y ~ Pois(I e^theta)

    static LossModel linear(double sigma = 1.0);
    static LossModel logistic(double sigma_link = 1.0);
    static LossModel poisson(double intensity = 1.0);
};

[[nodiscard]] double loss(const LossModel& m, double theta, double y);

// d/dtheta of loss.
[[nodiscard]] double dloss(const LossModel& m, double theta, double y);

// Strong convexity / smoothness of h in theta over [-alpha, alpha], plus the
// logistic link ratio sup |f'| / (f (1-f)). Fields are +inf where the family
// has no finite constant.
struct RegularityConstants {
    double gamma = 0;
    double mu = 0;
    double lip_ratio = 0;
};
[[nodiscard]] RegularityConstants regularity_constants(const LossModel& m, double alpha);

// E[Y | theta].
[[nodiscard]] double mean_response(const LossModel& m, double theta);

[[nodiscard]] double sample_response(const LossModel& m, double theta, Rng& rng);

}  // namespace orgrad
