#include "oracles.hpp"

#include <Eigen/Dense>
#include <stdexcept>

namespace orgrad::testing {

namespace {

bool advance(Index& idx, const Dims& dims) {
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (++idx[j] < dims[j]) return true;
        idx[j] = 0;
    }
    return false;
}

}  // namespace

Matrix oracle_unfold(const DenseTensor& t, int mode) {
    const int m = static_cast<int>(t.dims.size());
    if (mode < 0 || mode >= m) throw std::invalid_argument("oracle_unfold: bad mode");
    const std::int64_t rows = t.dims[mode];
    const std::int64_t cols = t.size() / rows;
    Matrix out(rows, cols);
    Index idx(t.dims.size(), 0);
    do {
        // Remaining modes in cyclic order mode+1, ..., m-1, 0, ..., mode-1,
        // the first listed running fastest.
        std::int64_t col = 0, stride = 1;
        for (int step = 1; step < m; ++step) {
            const int k = (mode + step) % m;
            col += idx[k] * stride;
            stride *= t.dims[k];
        }
        out(idx[mode], col) = t.at(idx);
    } while (advance(idx, t.dims));
    return out;
}

DenseTensor oracle_mode_product(const DenseTensor& t, const Matrix& w, int mode) {
    const int m = static_cast<int>(t.dims.size());
    if (mode < 0 || mode >= m) throw std::invalid_argument("oracle_mode_product: bad mode");
    if (w.cols() != t.dims[mode])
        throw std::invalid_argument("oracle_mode_product: shape mismatch");
    Dims out_dims = t.dims;
    out_dims[mode] = w.rows();
    DenseTensor out(out_dims);
    Index idx(out_dims.size(), 0);
    do {
        double acc = 0;
        Index src = idx;
        for (std::int64_t s = 0; s < t.dims[mode]; ++s) {
            src[mode] = s;
            acc += w(idx[mode], s) * t.at(src);
        }
        out.entries[flat_index(out_dims, idx)] = acc;
    } while (advance(idx, out_dims));
    return out;
}

DenseTensor oracle_materialize(const DenseTensor& core, const std::vector<Matrix>& factors) {
    Dims dims;
    for (const Matrix& u : factors) dims.push_back(u.rows());
    DenseTensor out(dims);
    Index idx(dims.size(), 0);
    do {
        double acc = 0;
        Index k(core.dims.size(), 0);
        do {
            double term = core.at(k);
            for (std::size_t j = 0; j < factors.size(); ++j) term *= factors[j](idx[j], k[j]);
            acc += term;
        } while (advance(k, core.dims));
        out.entries[flat_index(dims, idx)] = acc;
    } while (advance(idx, dims));
    return out;
}

OracleTucker oracle_hosvd(const DenseTensor& t, const Dims& ranks) {
    OracleTucker out;
    for (std::size_t j = 0; j < t.dims.size(); ++j) {
        Eigen::JacobiSVD<Matrix> svd(oracle_unfold(t, static_cast<int>(j)),
                                     Eigen::ComputeThinU);
        out.factors.push_back(svd.matrixU().leftCols(ranks[j]));
    }
    out.core = t;
    for (std::size_t j = 0; j < out.factors.size(); ++j)
        out.core = oracle_mode_product(out.core, out.factors[j].transpose(),
                                       static_cast<int>(j));
    return out;
}

OracleTucker oracle_hooi(const DenseTensor& t, const Dims& ranks, int iterations) {
    OracleTucker cur = oracle_hosvd(t, ranks);
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t j = 0; j < t.dims.size(); ++j) {
            DenseTensor y = t;
            for (std::size_t k = 0; k < t.dims.size(); ++k) {
                if (k == j) continue;
                y = oracle_mode_product(y, cur.factors[k].transpose(), static_cast<int>(k));
            }
            Eigen::JacobiSVD<Matrix> svd(oracle_unfold(y, static_cast<int>(j)),
                                         Eigen::ComputeThinU);
            cur.factors[j] = svd.matrixU().leftCols(ranks[j]);
        }
    }
    cur.core = t;
    for (std::size_t j = 0; j < cur.factors.size(); ++j)
        cur.core = oracle_mode_product(cur.core, cur.factors[j].transpose(),
                                       static_cast<int>(j));
    return cur;
}

DenseTensor oracle_reconstruct(const OracleTucker& t) {
    return oracle_materialize(t.core, t.factors);
}

Vector vec_of(const DenseTensor& t) {
    return Eigen::Map<const Vector>(t.entries.data(),
                                    static_cast<Eigen::Index>(t.entries.size()));
}

Matrix oracle_tangent_projector(const TuckerTensor& point) {
    const Dims dims = point.dims();
    const Dims ranks = point.ranks();
    std::int64_t total = 1;
    for (std::int64_t d : dims) total *= d;

    std::int64_t n_span = 1;
    for (std::int64_t r : ranks) n_span *= r;
    for (std::size_t j = 0; j < dims.size(); ++j)
        n_span += (dims[j] - ranks[j]) * ranks[j];

    Matrix span(total, n_span);
    std::int64_t colno = 0;

    // Core directions: each core basis element pushed through the factors.
    Index k(ranks.size(), 0);
    do {
        DenseTensor ek(ranks);
        ek.entries[flat_index(ranks, k)] = 1.0;
        span.col(colno++) = vec_of(oracle_materialize(ek, point.factors));
    } while (advance(k, ranks));

    // Arm directions: complement column times rank row, other modes fixed.
    for (std::size_t j = 0; j < dims.size(); ++j) {
        Eigen::HouseholderQR<Matrix> qr(point.factors[j]);
        const Matrix full_q = qr.householderQ() * Matrix::Identity(dims[j], dims[j]);
        const Matrix comp = full_q.rightCols(dims[j] - ranks[j]);
        for (std::int64_t p = 0; p < comp.cols(); ++p) {
            for (std::int64_t s = 0; s < ranks[j]; ++s) {
                std::vector<Matrix> factors = point.factors;
                factors[j] = Matrix::Zero(dims[j], ranks[j]);
                factors[j].col(s) = comp.col(p);
                span.col(colno++) = vec_of(oracle_materialize(point.core, factors));
            }
        }
    }

    Eigen::ColPivHouseholderQR<Matrix> qr(span);
    if (qr.rank() != n_span)
        throw std::runtime_error("oracle_tangent_projector: spanning set is rank-deficient");
    const Matrix q = qr.householderQ() * Matrix::Identity(total, n_span);
    return q * q.transpose();
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace orgrad::testing
