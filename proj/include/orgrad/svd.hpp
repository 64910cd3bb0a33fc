#pragma once

#include "orgrad/tensor.hpp"

namespace orgrad {

struct ThinSvd {
    Matrix U;  // rows x rank, orthonormal columns
    Vector s;  // descending, nonnegative
    Matrix V;  // cols x rank, orthonormal columns
};

// Fixes signs in place so runs are reproducible: in every column of U the
// entry of largest magnitude is made nonnegative (ties break to the lowest
// row index) and the matching column of V is flipped along with it.
void deterministic_sign_fix(Matrix& U, Matrix& V);

// Rank-r truncated SVD, U*diag(s)*V^T ~ M.
[[nodiscard]] ThinSvd thin_svd(const Matrix& M, std::int64_t rank);

// Moore-Penrose inverse; singular values below rel_cutoff * s_max are treated
// as zero. effective_rank (if given) receives the count of retained values.
[[nodiscard]] Matrix pseudo_inverse(const Matrix& M, double rel_cutoff = 1e-12,
                                    std::int64_t* effective_rank = nullptr);

}  // namespace orgrad
