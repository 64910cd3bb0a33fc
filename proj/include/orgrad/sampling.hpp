#pragma once

#include "orgrad/glm.hpp"
#include "orgrad/manifold.hpp"
#include "orgrad/rng.hpp"
#include "orgrad/tucker.hpp"

#include <memory>
#include <string>

namespace orgrad {

enum class DesignKind { Gaussian, Entry };

[[nodiscard]] DesignKind parse_design(const std::string& name);

// Measurement tensor. Gaussian design carries a dense iid N(0,1) tensor;
// entry design is the scaled one-hot sqrt(d*) * E_omega and is never
// materialized.
struct Covariate {
    DesignKind kind = DesignKind::Gaussian;
    DenseTensor dense;  // Gaussian only
    Index omega;        // Entry only
    double scale = 1.0; // Entry only: sqrt(d*)
};

[[nodiscard]] Covariate draw_covariate(DesignKind kind, const Dims& dims, Rng& rng);

[[nodiscard]] double covariate_inner(const Covariate& x, const TuckerTensor& t);
[[nodiscard]] double covariate_inner(const Covariate& x, const DenseTensor& t);

// Dispatches to the dense or one-hot tangent projection.
[[nodiscard]] TangentVector project_tangent(const TuckerTensor& point, const Covariate& x);

[[nodiscard]] DenseTensor densify(const Covariate& x, const Dims& dims);

struct Observation {
    Covariate x;
    double y = 0.0;
    std::int64_t t = 0;
};

// Ground-truth generator. Recipes:
//   regression_7_1: core iid N(0,1), factors iid Unif(0,1), exact Tucker rank
//   completion_7_2: rank truncation (HOSVD) of an iid Unif(0,1) tensor
//   matrix_7_3:     rank truncation of an iid N(0,1) matrix (order 2)
//   explicit:       rank truncation of a provided tensor
struct TruthSpec {
    std::string recipe;
    Dims dims;
    Dims ranks;
    DenseTensor explicit_tensor;  // recipe == "explicit"
};

struct Truth {
    TuckerTensor tensor;
    SpectralReport report;
};

[[nodiscard]] Truth gen_truth(const TruthSpec& spec, Rng& rng);

class ObservationStream {
  public:
    virtual ~ObservationStream() = default;
    virtual Observation next() = 0;
};

// Streams (X_t, Y_t) pairs against a fixed truth: X_t from the design,
// Y_t = response sampled at theta = <X_t, truth>. Reproducible per seed.
class ModelStream : public ObservationStream {
  public:
    ModelStream(const TuckerTensor& truth, DesignKind design, LossModel model,
                std::uint64_t seed);
    Observation next() override;

  private:
    const TuckerTensor& truth_;
    DenseTensor truth_dense_;  // cached for the dense design's inner products
    Dims dims_;
    DesignKind design_;
    LossModel model_;
    Rng rng_;
    std::int64_t t_ = 0;
};

// Replays a fixed observation list (tests, data-backed streams).
class ReplayStream : public ObservationStream {
  public:
    explicit ReplayStream(std::vector<Observation> obs) : obs_(std::move(obs)) {}
    Observation next() override;

  private:
    std::vector<Observation> obs_;
    std::size_t pos_ = 0;
};

// Warm start at a controlled distance: HOSVD_r(truth + delta * N) with N a
// fixed random direction and delta calibrated by bisection until
// ||T_0 - truth||_F lands in [0.8c, c] * lambda_min(truth). Requires
// 0 < c < 1/2.
[[nodiscard]] TuckerTensor init_oracle_perturb(const TuckerTensor& truth, double c, Rng& rng);

// Spectral start from data: HOSVD_r of the first-moment estimator
// (1/N) sum y_i X_i, which is unbiased for the truth under both designs.
[[nodiscard]] TuckerTensor init_second_moment(const std::vector<Observation>& obs,
                                              const Dims& dims, const Dims& ranks);

}  // namespace orgrad
