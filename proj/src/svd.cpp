#include "orgrad/svd.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace orgrad {

void deterministic_sign_fix(Matrix& U, Matrix& V) {
    if (U.cols() != V.cols()) throw std::invalid_argument("sign fix: column count mismatch");
    for (Eigen::Index c = 0; c < U.cols(); ++c) {
        Eigen::Index lead = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < U.rows(); ++i) {
            const double a = std::abs(U(i, c));
            if (a > best) {  // strict: ties keep the lowest index
                best = a;
                lead = i;
            }
        }
        if (U(lead, c) < 0.0) {
            U.col(c) = -U.col(c);
            V.col(c) = -V.col(c);
        }
    }
}

ThinSvd thin_svd(const Matrix& M, std::int64_t rank) {
    const std::int64_t minmn = std::min(M.rows(), M.cols());
    if (rank < 1 || rank > minmn) throw std::invalid_argument("thin_svd rank out of range");
    // a data condition rather than an interface misuse: overflowing iterates
    // land here, and callers that can recover treat it as a divergence
    if (!M.allFinite()) throw std::runtime_error("thin_svd input has non-finite entries");

    Matrix U, V;
    Vector s;
    if (minmn <= 16) {
        Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        U = svd.matrixU();
        V = svd.matrixV();
        s = svd.singularValues();
    } else {
        Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        U = svd.matrixU();
        V = svd.matrixV();
        s = svd.singularValues();
    }
    ThinSvd out{U.leftCols(rank), s.head(rank), V.leftCols(rank)};
    deterministic_sign_fix(out.U, out.V);
    return out;
}

Matrix pseudo_inverse(const Matrix& M, double rel_cutoff, std::int64_t* effective_rank) {
    const std::int64_t minmn = std::min(M.rows(), M.cols());
    ThinSvd svd = thin_svd(M, minmn);
    const double cutoff = rel_cutoff * svd.s(0);
    std::int64_t r = 0;
    while (r < minmn && svd.s(r) > cutoff && svd.s(r) > 0.0) ++r;
    if (effective_rank) *effective_rank = r;
    if (r == 0) return Matrix::Zero(M.cols(), M.rows());
    return svd.V.leftCols(r) * svd.s.head(r).cwiseInverse().asDiagonal() *
           svd.U.leftCols(r).transpose();
}

}  // namespace orgrad
