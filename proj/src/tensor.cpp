#include "orgrad/tensor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orgrad {

namespace {

void check_dims(const Dims& dims) {
    if (dims.empty()) throw std::invalid_argument("tensor order must be >= 1");
    for (auto d : dims)
        if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
}

void check_mode(const Dims& dims, int mode) {
    if (mode < 0 || mode >= static_cast<int>(dims.size()))
        throw std::invalid_argument("mode out of range");
}

// Entry counts below (inner) and above (outer) the given mode, so that
// flat = in + inner*(i_mode + d_mode*out).
std::pair<std::int64_t, std::int64_t> split_at(const Dims& dims, int mode) {
    std::int64_t inner = 1, outer = 1;
    for (int j = 0; j < mode; ++j) inner *= dims[j];
    for (int j = mode + 1; j < static_cast<int>(dims.size()); ++j) outer *= dims[j];
    return {inner, outer};
}

}  // namespace

std::int64_t tensor_size(const Dims& dims) {
    check_dims(dims);
    std::int64_t n = 1;
    for (auto d : dims) {
        if (n > (std::int64_t{1} << 40) / d)
            throw std::invalid_argument("tensor too large");
        n *= d;
    }
    return n;
}

std::int64_t flat_index(const Dims& dims, const Index& idx) {
    if (idx.size() != dims.size()) throw std::invalid_argument("index order mismatch");
    std::int64_t flat = 0, stride = 1;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (idx[j] < 0 || idx[j] >= dims[j]) throw std::out_of_range("tensor index out of range");
        flat += idx[j] * stride;
        stride *= dims[j];
    }
    return flat;
}

DenseTensor::DenseTensor(Dims d) : dims(std::move(d)), entries(tensor_size(dims), 0.0) {}

DenseTensor::DenseTensor(Dims d, std::vector<double> e) : dims(std::move(d)), entries(std::move(e)) {
    if (static_cast<std::int64_t>(entries.size()) != tensor_size(dims))
        throw std::invalid_argument("entry count does not match dimensions");
}

Matrix matricize(const DenseTensor& T, int mode) {
    check_mode(T.dims, mode);
    const auto [inner, outer] = split_at(T.dims, mode);
    const std::int64_t dj = T.dims[mode];
    Matrix M(dj, inner * outer);
    // Column of (in, out) is out + outer*in: the modes above `mode` come first
    // (cyclically nearest) and vary fastest.
    for (std::int64_t in = 0; in < inner; ++in)
        for (std::int64_t k = 0; k < dj; ++k) {
            const double* src = T.entries.data() + in + inner * k;
            for (std::int64_t out = 0; out < outer; ++out)
                M(k, out + outer * in) = src[inner * dj * out];
        }
    return M;
}

DenseTensor dematricize(const Matrix& M, const Dims& dims, int mode) {
    check_mode(dims, mode);
    const auto [inner, outer] = split_at(dims, mode);
    const std::int64_t dj = dims[mode];
    if (M.rows() != dj || M.cols() != inner * outer)
        throw std::invalid_argument("matrix shape does not match target dimensions");
    DenseTensor T(dims);
    for (std::int64_t in = 0; in < inner; ++in)
        for (std::int64_t k = 0; k < dj; ++k) {
            double* dst = T.entries.data() + in + inner * k;
            for (std::int64_t out = 0; out < outer; ++out)
                dst[inner * dj * out] = M(k, out + outer * in);
        }
    return T;
}

DenseTensor mode_product(const DenseTensor& T, const Matrix& W, int mode) {
    check_mode(T.dims, mode);
    if (W.cols() != T.dims[mode])
        throw std::invalid_argument("mode product shape mismatch");
    const auto [inner, outer] = split_at(T.dims, mode);
    const std::int64_t dj = T.dims[mode], p = W.rows();
    Dims odims = T.dims;
    odims[mode] = p;
    DenseTensor out(odims);
    // For each slab above the mode, the buffer is an (inner x d_j) column-major
    // block; the mode product is a GEMM with W^T on each block.
    for (std::int64_t o = 0; o < outer; ++o) {
        Eigen::Map<const Matrix> B(T.entries.data() + o * inner * dj, inner, dj);
        Eigen::Map<Matrix> C(out.entries.data() + o * inner * p, inner, p);
        C.noalias() = B * W.transpose();
    }
    return out;
}

double inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.dims != b.dims) throw std::invalid_argument("inner product dimension mismatch");
    return Eigen::Map<const Vector>(a.entries.data(), a.size())
        .dot(Eigen::Map<const Vector>(b.entries.data(), b.size()));
}

double fro_norm(const DenseTensor& a) {
    return Eigen::Map<const Vector>(a.entries.data(), a.size()).norm();
}

double sup_norm(const DenseTensor& a) {
    double s = 0.0;
    for (double v : a.entries) {
        if (std::isnan(v)) return v;
        s = std::max(s, std::abs(v));
    }
    return s;
}

void axpy(double alpha, const DenseTensor& x, DenseTensor& y) {
    if (x.dims != y.dims) throw std::invalid_argument("axpy dimension mismatch");
    Eigen::Map<Vector>(y.entries.data(), y.size()) +=
        alpha * Eigen::Map<const Vector>(x.entries.data(), x.size());
}

void save_tensor(const DenseTensor& T, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "dims:";
    for (auto d : T.dims) f << ' ' << d;
    f << '\n';
    char buf[40];
    for (std::int64_t i = 0; i < T.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", T.entries[i]);
        f << buf << (((i + 1) % 8 == 0 || i + 1 == T.size()) ? '\n' : ' ');
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

DenseTensor load_tensor(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string header;
    if (!std::getline(f, header)) throw std::runtime_error("empty tensor container: " + path);
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "dims:") throw std::runtime_error("missing 'dims:' header: " + path);
    Dims dims;
    std::int64_t d;
    while (hs >> d) dims.push_back(d);
    const std::int64_t n = tensor_size(dims);  // validates positivity
    std::vector<double> entries(n);
    for (std::int64_t i = 0; i < n; ++i)
        if (!(f >> entries[i]))
            throw std::runtime_error("tensor container truncated or non-numeric at entry " +
                                     std::to_string(i) + ": " + path);
    double extra;
    if (f >> extra) throw std::runtime_error("tensor container has trailing entries: " + path);
    return DenseTensor(std::move(dims), std::move(entries));
}

}  // namespace orgrad
