#include "orgrad/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orgrad {

namespace {

constexpr double kExpClamp = 30.0;
constexpr double kLogFloor = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_exp_arg(double t) { return std::clamp(t, -kExpClamp, kExpClamp); }

double logistic_link(double theta, double sigma_link) {
    return 1.0 / (1.0 + std::exp(-clamp_exp_arg(theta / sigma_link)));
}

// Exact Poisson sampler: inversion by sequential search for small means,
// Hormann's PTRS transformed rejection otherwise.
std::int64_t sample_poisson(double lambda, Rng& rng) {
    if (lambda < 10.0) {
        const double l = std::exp(-lambda);
        std::int64_t k = 0;
        double p = rng.uniform();
        while (p > l) {
            ++k;
            p *= rng.uniform();
        }
        return k;
    }
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_lambda - lambda - std::lgamma(k + 1.0))
            return static_cast<std::int64_t>(k);
    }
}

}  // namespace

LossModel LossModel::linear(double sigma) {
    if (sigma < 0) throw std::invalid_argument("linear model needs sigma >= 0");
    return {LossKind::Linear, sigma, 1.0, 1.0};
}

LossModel LossModel::logistic(double sigma_link) {
    if (sigma_link <= 0) throw std::invalid_argument("logistic model needs sigma_link > 0");
    return {LossKind::Logistic, 1.0, sigma_link, 1.0};
}

LossModel LossModel::poisson(double intensity) {
    if (intensity <= 0) throw std::invalid_argument("poisson model needs intensity > 0");
    return {LossKind::Poisson, 1.0, 1.0, intensity};
}

double loss(const LossModel& m, double theta, double y) {
    switch (m.kind) {
        case LossKind::Linear: {
            const double r = theta - y;
            return 0.5 * r * r;
        }
        case LossKind::Logistic: {
            const double f = logistic_link(theta, m.sigma_link);
            return -y * std::log(std::max(f, kLogFloor)) -
                   (1.0 - y) * std::log(std::max(1.0 - f, kLogFloor));
        }
        case LossKind::Poisson:
            return -y * theta / m.intensity + std::exp(clamp_exp_arg(theta));
    }
    throw std::logic_error("unknown loss kind");
}

double dloss(const LossModel& m, double theta, double y) {
    switch (m.kind) {
        case LossKind::Linear:
            return theta - y;
        case LossKind::Logistic:
            return (logistic_link(theta, m.sigma_link) - y) / m.sigma_link;
        case LossKind::Poisson:
            return -y / m.intensity + std::exp(clamp_exp_arg(theta));
    }
    throw std::logic_error("unknown loss kind");
}

RegularityConstants regularity_constants(const LossModel& m, double alpha) {
    if (alpha <= 0) throw std::invalid_argument("regularity constants need alpha > 0");
    switch (m.kind) {
        case LossKind::Linear:
            return {1.0, 1.0, kInf};
        case LossKind::Logistic: {
            // Curvature f'(theta)/sigma is largest at 0 and smallest at +-alpha.
            const double s = m.sigma_link;
            const double e = std::exp(clamp_exp_arg(alpha / s));
            return {e / ((1.0 + e) * (1.0 + e) * s * s), 1.0 / (4.0 * s * s), 1.0 / s};
        }
        case LossKind::Poisson:
            return {std::exp(-alpha), std::exp(alpha), kInf};
    }
    throw std::logic_error("unknown loss kind");
}

double mean_response(const LossModel& m, double theta) {
    switch (m.kind) {
        case LossKind::Linear:
            return theta;
        case LossKind::Logistic:
            return logistic_link(theta, m.sigma_link);
        case LossKind::Poisson:
            return m.intensity * std::exp(clamp_exp_arg(theta));
    }
    throw std::logic_error("unknown loss kind");
}

double sample_response(const LossModel& m, double theta, Rng& rng) {
    switch (m.kind) {
        case LossKind::Linear:
            return theta + m.sigma * rng.normal();
        case LossKind::Logistic:
            return rng.uniform() < logistic_link(theta, m.sigma_link) ? 1.0 : 0.0;
        case LossKind::Poisson:
            return static_cast<double>(
                sample_poisson(m.intensity * std::exp(clamp_exp_arg(theta)), rng));
    }
    throw std::logic_error("unknown loss kind");
}

}  // namespace orgrad
