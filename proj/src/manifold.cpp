#include "orgrad/manifold.hpp"

#include "orgrad/svd.hpp"

#include <Eigen/QR>

#include <cmath>
#include <stdexcept>

namespace orgrad {

namespace {

// Pseudo-inverses of every core unfolding; throws if any unfolding is
// rank-deficient at the cutoff, since the tangent arms are then ill-defined.
std::vector<Matrix> core_pinvs(const TuckerTensor& point) {
    const int m = point.order();
    std::vector<Matrix> pinvs;
    pinvs.reserve(m);
    for (int i = 0; i < m; ++i) {
        const Matrix ci = matricize(point.core, i);
        std::int64_t rank = 0;
        pinvs.push_back(pseudo_inverse(ci, 1e-12, &rank));
        if (rank < ci.rows())
            throw std::runtime_error("tangent projection: core unfolding " + std::to_string(i) +
                                     " is rank-deficient at tolerance");
    }
    return pinvs;
}

// dest(idx + offset) += src(idx) over all of src.
void add_block(DenseTensor& dest, const DenseTensor& src, const Dims& offset) {
    const int m = src.order();
    Index idx(m, 0);
    for (std::int64_t flat = 0; flat < src.size(); ++flat) {
        Index shifted(m);
        for (int j = 0; j < m; ++j) shifted[j] = idx[j] + offset[j];
        dest.at(shifted) += src.entries[flat];
        for (int j = 0; j < m; ++j) {  // odometer in canonical (mode-0 fastest) order
            if (++idx[j] < src.dims[j]) break;
            idx[j] = 0;
        }
    }
}

}  // namespace

void TangentVector::scale(double alpha) {
    Eigen::Map<Vector>(core_part.entries.data(), core_part.size()) *= alpha;
    for (Matrix& W : arms) W *= alpha;
}

double TangentVector::fro_norm() const {
    // Components are mutually orthogonal and the factors are orthonormal, so
    // the squared norm splits into the core part plus one term per arm.
    double sq = 0;
    for (double v : core_part.entries) sq += v * v;
    for (std::size_t i = 0; i < arms.size(); ++i)
        sq += (arms[i] * matricize(base->core, static_cast<int>(i))).squaredNorm();
    return std::sqrt(sq);
}

TangentVector project_tangent(const TuckerTensor& point, const DenseTensor& X) {
    if (point.dims() != X.dims) throw std::invalid_argument("tangent projection shape mismatch");
    const int m = point.order();
    const auto pinvs = core_pinvs(point);

    TangentVector out;
    out.base = &point;
    out.arms.reserve(m);

    DenseTensor z = X;
    for (int j = 0; j < m; ++j)
        z = mode_product(z, Matrix(point.factors[j].transpose()), j);
    out.core_part = std::move(z);

    for (int i = 0; i < m; ++i) {
        DenseTensor a = X;
        for (int j = 0; j < m; ++j)
            if (j != i) a = mode_product(a, Matrix(point.factors[j].transpose()), j);
        const Matrix b = matricize(a, i);
        const Matrix& U = point.factors[i];
        const Matrix g = b - U * (U.transpose() * b);
        out.arms.push_back(g * pinvs[i]);
    }
    return out;
}

TangentVector project_tangent_entry(const TuckerTensor& point, const Index& omega, double scale) {
    const int m = point.order();
    const Dims dims = point.dims();
    const Dims& ranks = point.core.dims;
    if (static_cast<int>(omega.size()) != m)
        throw std::invalid_argument("tangent projection: index order mismatch");
    for (int j = 0; j < m; ++j)
        if (omega[j] < 0 || omega[j] >= dims[j])
            throw std::out_of_range("tangent projection: index out of range");
    const auto pinvs = core_pinvs(point);

    std::vector<Vector> rows(m);
    for (int j = 0; j < m; ++j) rows[j] = point.factors[j].row(omega[j]).transpose();

    TangentVector out;
    out.base = &point;
    out.arms.reserve(m);

    // Z = scale * (outer product of the factor rows).
    out.core_part = DenseTensor(ranks);
    {
        Index k(m, 0);
        for (std::int64_t flat = 0; flat < out.core_part.size(); ++flat) {
            double v = scale;
            for (int j = 0; j < m; ++j) v *= rows[j](k[j]);
            out.core_part.entries[flat] = v;
            for (int j = 0; j < m; ++j) {
                if (++k[j] < ranks[j]) break;
                k[j] = 0;
            }
        }
    }

    // Arm i: W_i = scale * (e_omega_i - U_i u_i) (v_i^T C_(i)^+), where v_i is
    // the Kronecker product of the other factor rows laid out to match the
    // mode-i unfolding columns.
    for (int i = 0; i < m; ++i) {
        std::int64_t vlen = 1;
        for (int j = 0; j < m; ++j)
            if (j != i) vlen *= ranks[j];
        Vector v = Vector::Zero(vlen);
        Dims rdims = ranks;
        rdims[i] = 1;
        std::int64_t inner = 1, outer = 1;
        for (int j = 0; j < i; ++j) inner *= ranks[j];
        for (int j = i + 1; j < m; ++j) outer *= ranks[j];
        Index k(m, 0);
        for (std::int64_t cnt = 0; cnt < vlen; ++cnt) {
            double prod = 1;
            std::int64_t in = 0, in_stride = 1, out = 0, out_stride = 1;
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                prod *= rows[j](k[j]);
                if (j < i) {
                    in += k[j] * in_stride;
                    in_stride *= ranks[j];
                } else {
                    out += k[j] * out_stride;
                    out_stride *= ranks[j];
                }
            }
            v(out + outer * in) = prod;
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                if (++k[j] < ranks[j]) break;
                k[j] = 0;
            }
        }
        Vector p = -(point.factors[i] * rows[i]);
        p(omega[i]) += 1.0;
        out.arms.push_back((scale * p) * (v.transpose() * pinvs[i]));
    }
    return out;
}

DenseTensor materialize(const TangentVector& v) {
    if (!v.base) throw std::invalid_argument("tangent vector has no base point");
    const TuckerTensor& point = *v.base;
    const int m = point.order();
    DenseTensor out = v.core_part;
    for (int j = 0; j < m; ++j) out = mode_product(out, point.factors[j], j);
    for (int i = 0; i < m; ++i) {
        DenseTensor term = point.core;
        for (int j = 0; j < m; ++j)
            term = mode_product(term, j == i ? v.arms[i] : point.factors[j], j);
        axpy(1.0, term, out);
    }
    return out;
}

DenseTensor project_tangent_complement(const TuckerTensor& point, const DenseTensor& X) {
    DenseTensor out = X;
    axpy(-1.0, materialize(project_tangent(point, X)), out);
    return out;
}

TuckerTensor retract(const TuckerTensor& point, const TangentVector& g, double eta) {
    if (g.base != &point) throw std::invalid_argument("retract: tangent vector from another point");
    const int m = point.order();
    const Dims& ranks = point.core.dims;
    if (eta == 0.0 || g.fro_norm() == 0.0) return point;

    // Augmented Tucker form of point - eta * g: factor j widens by the column
    // rank of W_j, and the augmented core carries C - eta*Z in the all-U block
    // plus one -eta * (C x_j R_j) block per mode.
    std::vector<Matrix> aug_factors(m);
    std::vector<Matrix> r_blocks(m);
    Dims aug_dims(m);
    for (int j = 0; j < m; ++j) {
        const Matrix& U = point.factors[j];
        // Orthonormal basis of col(W_j); W_j is orthogonal to U_j by
        // construction, so projecting out U_j only scrubs roundoff.
        Matrix W = g.arms[j] - U * (U.transpose() * g.arms[j]);
        Eigen::ColPivHouseholderQR<Matrix> qr(W);
        const std::int64_t q = std::min<std::int64_t>(qr.rank(), W.cols());
        if (q > 0) {
            Matrix Q = qr.householderQ() * Matrix::Identity(W.rows(), q);
            Matrix R = qr.matrixR()
                           .topLeftCorner(q, W.cols())
                           .template triangularView<Eigen::Upper>();
            r_blocks[j] = R * qr.colsPermutation().transpose();
            aug_factors[j] = Matrix(U.rows(), U.cols() + q);
            aug_factors[j] << U, Q;
        } else {
            r_blocks[j] = Matrix();
            aug_factors[j] = U;
        }
        aug_dims[j] = aug_factors[j].cols();
    }

    DenseTensor aug_core(aug_dims);
    DenseTensor top = point.core;
    axpy(-eta, g.core_part, top);
    add_block(aug_core, top, Dims(m, 0));
    for (int j = 0; j < m; ++j) {
        if (r_blocks[j].size() == 0) continue;
        DenseTensor block = mode_product(point.core, r_blocks[j], j);
        Dims offset(m, 0);
        offset[j] = ranks[j];
        Eigen::Map<Vector>(block.entries.data(), block.size()) *= -eta;
        add_block(aug_core, block, offset);
    }

    TuckerTensor aug{std::move(aug_core), std::move(aug_factors)};
    return hosvd(aug, ranks);
}

double incoherence_of(const Matrix& U) {
    if (U.rows() == 0 || U.cols() == 0) throw std::invalid_argument("incoherence of empty matrix");
    return static_cast<double>(U.rows()) / static_cast<double>(U.cols()) *
           U.rowwise().squaredNorm().maxCoeff();
}

double spikiness_of(const DenseTensor& X) {
    const double fro = fro_norm(X);
    if (fro == 0.0) throw std::invalid_argument("spikiness undefined for the zero tensor");
    return std::sqrt(static_cast<double>(X.size())) * sup_norm(X) / fro;
}

SpectralReport spectral_report(const DenseTensor& X, const Dims& ranks) {
    if (fro_norm(X) == 0.0) throw std::invalid_argument("spectral report undefined for the zero tensor");
    SpectralReport rep;
    rep.lambda_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < X.order(); ++j) {
        const ThinSvd svd = thin_svd(matricize(X, j), ranks[j]);
        rep.lambda_min = std::min(rep.lambda_min, svd.s(ranks[j] - 1));
        rep.lambda_max = std::max(rep.lambda_max, svd.s(0));
        rep.incoherence = std::max(rep.incoherence, incoherence_of(svd.U));
    }
    rep.kappa0 = rep.lambda_max / rep.lambda_min;
    rep.spikiness = spikiness_of(X);
    return rep;
}

SpectralReport spectral_report(const TuckerTensor& X) {
    if (fro_norm(X) == 0.0) throw std::invalid_argument("spectral report undefined for the zero tensor");
    SpectralReport rep;
    rep.lambda_min = std::numeric_limits<double>::infinity();
    // Orthonormal factors leave unfolding singular values equal to those of
    // the core unfoldings, and row norms of U_j are basis-independent.
    for (int j = 0; j < X.order(); ++j) {
        const std::int64_t rj = X.core.dims[j];
        const ThinSvd svd = thin_svd(matricize(X.core, j), rj);
        rep.lambda_min = std::min(rep.lambda_min, svd.s(rj - 1));
        rep.lambda_max = std::max(rep.lambda_max, svd.s(0));
        rep.incoherence = std::max(rep.incoherence, incoherence_of(X.factors[j]));
    }
    rep.kappa0 = rep.lambda_max / rep.lambda_min;
    rep.spikiness = std::sqrt(static_cast<double>(tensor_size(X.dims()))) *
                    sup_norm(materialize(X)) / fro_norm(X);
    return rep;
}

bool incoherence_to_spikiness_check(const TuckerTensor& X) {
    const SpectralReport rep = spectral_report(X);
    const int m = X.order();
    double rstar = 1, rmax = 0;
    for (auto r : X.core.dims) {
        rstar *= static_cast<double>(r);
        rmax = std::max(rmax, static_cast<double>(r));
    }
    const double bound =
        std::sqrt(rstar / rmax) * rep.kappa0 * std::pow(rep.incoherence, 0.5 * m);
    return rep.spikiness <= bound * (1.0 + 1e-12);
}

}  // namespace orgrad
