#include "orgrad/tucker.hpp"

#include "orgrad/svd.hpp"

#include <cmath>
#include <stdexcept>

namespace orgrad {

namespace {

void check_ranks(const Dims& dims, const Dims& ranks) {
    if (ranks.size() != dims.size()) throw std::invalid_argument("rank order mismatch");
    for (std::size_t j = 0; j < dims.size(); ++j)
        if (ranks[j] < 1 || ranks[j] > dims[j])
            throw std::invalid_argument("rank out of range for mode " + std::to_string(j));
}

}  // namespace

Dims TuckerTensor::dims() const {
    Dims d(factors.size());
    for (std::size_t j = 0; j < factors.size(); ++j) d[j] = factors[j].rows();
    return d;
}

void TuckerTensor::validate(double tol) const {
    if (static_cast<int>(factors.size()) != core.order())
        throw std::invalid_argument("factor count does not match core order");
    for (std::size_t j = 0; j < factors.size(); ++j) {
        const Matrix& U = factors[j];
        if (U.cols() != core.dims[j])
            throw std::invalid_argument("factor width does not match core dimension");
        if (U.rows() < U.cols())
            throw std::invalid_argument("factor has more columns than rows");
        const double dev = (U.transpose() * U - Matrix::Identity(U.cols(), U.cols()))
                               .cwiseAbs()
                               .maxCoeff();
        if (!(dev <= tol))
            throw std::invalid_argument("factor columns not orthonormal (deviation " +
                                        std::to_string(dev) + ")");
    }
}

TuckerTensor hosvd(const DenseTensor& T, const Dims& ranks) {
    check_ranks(T.dims, ranks);
    TuckerTensor out;
    out.factors.reserve(ranks.size());
    for (int j = 0; j < T.order(); ++j)
        out.factors.push_back(thin_svd(matricize(T, j), ranks[j]).U);
    out.core = T;
    for (int j = 0; j < T.order(); ++j)
        out.core = mode_product(out.core, out.factors[j].transpose(), j);
    return out;
}

TuckerTensor hosvd(const TuckerTensor& T, const Dims& ranks) {
    check_ranks(T.ranks(), ranks);
    // With orthonormal factors the mode-j unfolding is U_j C_(j) K^T for an
    // orthonormal K, so its top left singular vectors are U_j times those of
    // the core unfolding.
    TuckerTensor out;
    out.core = T.core;
    out.factors.reserve(ranks.size());
    std::vector<Matrix> small;
    small.reserve(ranks.size());
    for (int j = 0; j < T.order(); ++j) {
        small.push_back(thin_svd(matricize(T.core, j), ranks[j]).U);
        out.factors.push_back(T.factors[j] * small.back());
    }
    for (int j = 0; j < T.order(); ++j)
        out.core = mode_product(out.core, small[j].transpose(), j);
    return out;
}

DenseTensor materialize(const TuckerTensor& T) {
    DenseTensor out = T.core;
    for (int j = 0; j < T.order(); ++j) out = mode_product(out, T.factors[j], j);
    return out;
}

double entry_at(const TuckerTensor& T, const Index& idx) {
    const int m = T.order();
    if (static_cast<int>(idx.size()) != m) throw std::invalid_argument("index order mismatch");
    // Contract the core against one factor row per mode, sweeping modes in
    // canonical order so each pass shrinks the leading dimension.
    std::vector<double> buf(T.core.entries);
    Dims rdims = T.core.dims;
    for (int j = 0; j < m; ++j) {
        const auto row = T.factors[j].row(idx[j]);
        const std::int64_t r = rdims[j];
        std::int64_t rest = 1;
        for (int l = j + 1; l < m; ++l) rest *= rdims[l];
        for (std::int64_t o = 0; o < rest; ++o) {
            double acc = 0;
            for (std::int64_t k = 0; k < r; ++k) acc += row(k) * buf[o * r + k];
            buf[o] = acc;
        }
    }
    return buf[0];
}

double inner(const TuckerTensor& a, const TuckerTensor& b) {
    if (a.dims() != b.dims()) throw std::invalid_argument("inner product dimension mismatch");
    DenseTensor t = b.core;
    for (int j = 0; j < a.order(); ++j)
        t = mode_product(t, Matrix(a.factors[j].transpose() * b.factors[j]), j);
    return inner(a.core, t);
}

double inner(const TuckerTensor& a, const DenseTensor& b) {
    if (a.dims() != b.dims) throw std::invalid_argument("inner product dimension mismatch");
    DenseTensor t = b;
    for (int j = 0; j < a.order(); ++j)
        t = mode_product(t, Matrix(a.factors[j].transpose()), j);
    return inner(a.core, t);
}

double fro_norm(const TuckerTensor& a) { return fro_norm(a.core); }

double fro_dist(const TuckerTensor& a, const TuckerTensor& b) {
    const double na = fro_norm(a), nb = fro_norm(b);
    const double sq = na * na + nb * nb - 2.0 * inner(a, b);
    return std::sqrt(std::max(sq, 0.0));
}

std::int64_t dof(const Dims& dims, const Dims& ranks) {
    check_ranks(dims, ranks);
    std::int64_t core = 1, arms = 0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        core *= ranks[j];
        arms += dims[j] * ranks[j];
    }
    return core + arms;
}

}  // namespace orgrad
