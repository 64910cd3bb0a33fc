#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "orgrad/rng.hpp"
#include "orgrad/svd.hpp"

using namespace orgrad;

namespace {

Matrix random_matrix(std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
    Matrix m(rows, cols);
    Rng rng(seed);
    for (std::int64_t j = 0; j < cols; ++j)
        for (std::int64_t i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

}  // namespace

TEST_SUITE("svd") {

TEST_CASE("diagonal matrix decomposes exactly") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 3;
    m(1, 1) = 2;
    m(2, 2) = 1;
    const ThinSvd svd = thin_svd(m, 3);
    CHECK(svd.s(0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(svd.s(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(svd.s(2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((svd.U - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((svd.V - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("thin svd reconstructs the input") {
    const Matrix m = random_matrix(6, 4, 101);
    const ThinSvd svd = thin_svd(m, 4);
    const Matrix back = svd.U * svd.s.asDiagonal() * svd.V.transpose();
    CHECK((back - m).cwiseAbs().maxCoeff() < 1e-12);
    // singular vectors orthonormal
    CHECK((svd.U.transpose() * svd.U - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((svd.V.transpose() * svd.V - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("rank argument is validated") {
    const Matrix m = random_matrix(4, 3, 102);
    CHECK_THROWS(thin_svd(m, 0));
    CHECK_THROWS(thin_svd(m, 4));  // exceeds min(4, 3)
    Matrix bad = m;
    bad(1, 1) = std::nan("");
    CHECK_THROWS(thin_svd(bad, 2));
}

TEST_CASE("large inputs take the divide-and-conquer path and agree with Jacobi") {
    const Matrix m = random_matrix(20, 24, 103);  // min dim above the Jacobi cutoff
    const ThinSvd svd = thin_svd(m, 20);
    Eigen::JacobiSVD<Matrix> ref(m);
    for (std::int64_t i = 0; i < 20; ++i)
        CHECK(svd.s(i) == doctest::Approx(ref.singularValues()(i)).epsilon(1e-11));
    const Matrix back = svd.U * svd.s.asDiagonal() * svd.V.transpose();
    CHECK((back - m).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("sign convention: dominant entry of each left vector is nonnegative") {
    const Matrix m = random_matrix(7, 5, 104);
    const ThinSvd svd = thin_svd(m, 5);
    for (std::int64_t j = 0; j < svd.U.cols(); ++j) {
        std::int64_t arg = 0;
        for (std::int64_t i = 1; i < svd.U.rows(); ++i)
            if (std::abs(svd.U(i, j)) > std::abs(svd.U(arg, j))) arg = i;
        CHECK(svd.U(arg, j) >= 0.0);
    }
    // applying the fix twice changes nothing
    Matrix u = svd.U, v = svd.V;
    deterministic_sign_fix(u, v);
    CHECK((u - svd.U).cwiseAbs().maxCoeff() == 0.0);
    CHECK((v - svd.V).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sign fix resolves magnitude ties by lowest row index") {
    Matrix u(2, 2);
    u << 0.5, -0.5, -0.5, 0.5;  // both columns tie in magnitude across rows
    Matrix v = Matrix::Identity(2, 2);
    deterministic_sign_fix(u, v);
    CHECK(u(0, 0) == 0.5);   // row 0 already nonnegative, kept
    CHECK(u(0, 1) == 0.5);   // row 0 was negative, column flipped
    CHECK(u(1, 1) == -0.5);
    CHECK(v(0, 0) == 1.0);
    CHECK(v(1, 1) == -1.0);  // flipped alongside its left vector
}

TEST_CASE("same subspace input yields identical output") {
    const Matrix m = random_matrix(6, 4, 105);
    const ThinSvd a = thin_svd(m, 3);
    const ThinSvd b = thin_svd(m, 3);
    CHECK((a.U - b.U).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.V - b.V).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pseudo-inverse satisfies the Moore-Penrose identities") {
    // rank-2 5x4 matrix by construction
    const Matrix m = random_matrix(5, 2, 106) * random_matrix(2, 4, 107);
    std::int64_t eff_rank = -1;
    const Matrix pinv = pseudo_inverse(m, 1e-12, &eff_rank);
    CHECK(eff_rank == 2);
    CHECK((m * pinv * m - m).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pinv * m * pinv - pinv).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(((m * pinv).transpose() - m * pinv).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(((pinv * m).transpose() - pinv * m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pseudo-inverse of a diagonal with a zero") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 2.0;
    const Matrix pinv = pseudo_inverse(m);
    CHECK(pinv(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(pinv(1, 1)) < 1e-14);
}

}  // TEST_SUITE
