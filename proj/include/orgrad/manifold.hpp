#pragma once

#include "orgrad/tucker.hpp"

namespace orgrad {

// Tangent vector at a Tucker point T = C x_1 U_1 ... x_m U_m, stored
// structurally as
//   Delta = Z x_{j=1}^m U_j  +  sum_i  C x_i W_i x_{j != i} U_j
// with U_i^T W_i = 0. The m+1 components are mutually orthogonal, so norms
// and scaling never need densification. `base` is a non-owning reference to
// the point the vector is anchored at.
struct TangentVector {
    const TuckerTensor* base = nullptr;
    DenseTensor core_part;     // Z, r_1 x ... x r_m
    std::vector<Matrix> arms;  // W_i, d_i x r_i

    void scale(double alpha);
    [[nodiscard]] double fro_norm() const;
};

// Orthogonal projection of X onto the tangent space at `point`.
[[nodiscard]] TangentVector project_tangent(const TuckerTensor& point, const DenseTensor& X);

// Same projection for X = scale * E_omega (scaled one-hot tensor); runs in
// O(sum_j d_j r_j) and never materializes X.
[[nodiscard]] TangentVector project_tangent_entry(const TuckerTensor& point, const Index& omega,
                                                  double scale);

[[nodiscard]] DenseTensor materialize(const TangentVector& v);

// X minus its tangent projection.
[[nodiscard]] DenseTensor project_tangent_complement(const TuckerTensor& point,
                                                     const DenseTensor& X);

// Rank-truncating retraction: HOSVD_r(point - eta * g) at the point's ranks.
// Works on an augmented Tucker form of width r_j + rank(W_j) per mode, so the
// cost stays polynomial in the ranks. Exact no-op when eta or g vanishes.
[[nodiscard]] TuckerTensor retract(const TuckerTensor& point, const TangentVector& g, double eta);

// (d/r) * max_i || e_i^T U ||^2 for orthonormal U; 1 is perfectly flat, d/r
// is a spike aligned with a coordinate axis.
[[nodiscard]] double incoherence_of(const Matrix& U);

// sqrt(d*) * ||X||_inf / ||X||_F.
[[nodiscard]] double spikiness_of(const DenseTensor& X);

struct SpectralReport {
    double lambda_min = 0;   // min over modes of the r_j-th unfolding singular value
    double lambda_max = 0;   // max over modes of the top unfolding singular value
    double kappa0 = 0;       // lambda_max / lambda_min
    double incoherence = 0;  // max over modes of incoherence_of(U_j)
    double spikiness = 0;
};

[[nodiscard]] SpectralReport spectral_report(const DenseTensor& X, const Dims& ranks);
[[nodiscard]] SpectralReport spectral_report(const TuckerTensor& X);

// Checks the structural bound spikiness <= sqrt(r*/r_max) * kappa0 * mu^{m/2}
// with mu and kappa0 measured from X itself.
[[nodiscard]] bool incoherence_to_spikiness_check(const TuckerTensor& X);

}  // namespace orgrad
