#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace orgrad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::vector<std::int64_t>;
using Index = std::vector<std::int64_t>;

[[nodiscard]] std::int64_t tensor_size(const Dims& dims);

// Flat offset of a zero-based multi-index under the canonical linearization:
// mode 0 varies fastest, so flat = i_0 + d_0*i_1 + d_0*d_1*i_2 + ...
[[nodiscard]] std::int64_t flat_index(const Dims& dims, const Index& idx);

// Dense tensor of order >= 1 stored in the canonical linearization.
struct DenseTensor {
    Dims dims;
    std::vector<double> entries;

    DenseTensor() = default;
    explicit DenseTensor(Dims d);  // zero-filled
    DenseTensor(Dims d, std::vector<double> e);

    [[nodiscard]] int order() const { return static_cast<int>(dims.size()); }
    [[nodiscard]] std::int64_t size() const { return static_cast<std::int64_t>(entries.size()); }
    [[nodiscard]] double& at(const Index& idx) { return entries[flat_index(dims, idx)]; }
    [[nodiscard]] double at(const Index& idx) const { return entries[flat_index(dims, idx)]; }
};

// Mode-j unfolding, zero-based modes. Rows run over mode j; columns enumerate
// the remaining modes cyclically (j+1, ..., m-1, 0, ..., j-1) with the first
// listed mode varying fastest, so the mode-0 unfolding is a pure reshape of
// the canonical buffer.
[[nodiscard]] Matrix matricize(const DenseTensor& T, int mode);

// Inverse of matricize for the stated target shape.
[[nodiscard]] DenseTensor dematricize(const Matrix& M, const Dims& dims, int mode);

// Mode-j product with W (p x d_j): matricize(out, j) = W * matricize(T, j).
[[nodiscard]] DenseTensor mode_product(const DenseTensor& T, const Matrix& W, int mode);

[[nodiscard]] double inner(const DenseTensor& a, const DenseTensor& b);
[[nodiscard]] double fro_norm(const DenseTensor& a);
[[nodiscard]] double sup_norm(const DenseTensor& a);

// y += alpha * x
void axpy(double alpha, const DenseTensor& x, DenseTensor& y);

// Text container: header line "dims: d1 d2 ... dm" followed by the entries in
// canonical order, whitespace-separated, printed so reload is bit-exact.
void save_tensor(const DenseTensor& T, const std::string& path);
[[nodiscard]] DenseTensor load_tensor(const std::string& path);

}  // namespace orgrad
