#pragma once

#include "orgrad/tensor.hpp"

namespace orgrad {

// Tucker-form tensor: core (s_1 x ... x s_m) with orthonormal factor columns
// (d_j x s_j). The represented tensor is core x_1 U_1 x_2 ... x_m U_m.
struct TuckerTensor {
    DenseTensor core;
    std::vector<Matrix> factors;

    [[nodiscard]] Dims dims() const;
    [[nodiscard]] Dims ranks() const { return core.dims; }
    [[nodiscard]] int order() const { return core.order(); }

    // Shape consistency and factor orthonormality (to tol); throws otherwise.
    void validate(double tol = 1e-10) const;
};

// Rank-(r_1,...,r_m) higher-order SVD: factor j holds the top r_j left
// singular vectors of the mode-j unfolding.
[[nodiscard]] TuckerTensor hosvd(const DenseTensor& T, const Dims& ranks);

// Same operator for a tensor already in Tucker form with orthonormal factors
// of width s_j >= r_j: only the s_j-sized core is decomposed, so the cost is
// independent of how the d_j compare to the s_j.
[[nodiscard]] TuckerTensor hosvd(const TuckerTensor& T, const Dims& ranks);

[[nodiscard]] DenseTensor materialize(const TuckerTensor& T);

[[nodiscard]] double entry_at(const TuckerTensor& T, const Index& idx);

[[nodiscard]] double inner(const TuckerTensor& a, const TuckerTensor& b);
[[nodiscard]] double inner(const TuckerTensor& a, const DenseTensor& b);
[[nodiscard]] double fro_norm(const TuckerTensor& a);

// ||a - b||_F via inner products, no densification. Guarded against negative
// roundoff under the square root.
[[nodiscard]] double fro_dist(const TuckerTensor& a, const TuckerTensor& b);

// Degrees of freedom of the rank-(r_1,...,r_m) manifold: prod r_j + sum d_j r_j.
[[nodiscard]] std::int64_t dof(const Dims& dims, const Dims& ranks);

}  // namespace orgrad
