#include "noisyica/metrics.hpp"

#include <cmath>

namespace noisyica {

namespace {

Matrix normalized_rows_of_inverse(const Matrix& B) {
    Eigen::FullPivLU<Matrix> lu(B);
    if (!lu.isInvertible()) throw RankError("amari_error: rank-deficient matrix");
    Matrix A = lu.inverse();
    for (Index i = 0; i < A.rows(); ++i) {
        const double nrm = A.row(i).norm();
        if (nrm == 0.0) throw RankError("amari_error: zero row in inverse");
        A.row(i) /= nrm;
    }
    return A;
}

} // namespace

double amari_error_from_W(const Matrix& W) {
    if (W.rows() != W.cols() || W.rows() < 1) throw InvalidInputError("amari_error: W must be square");
    if (!W.allFinite()) throw InvalidInputError("amari_error: non-finite W");
    const Index k = W.rows();
    const Matrix A = W.cwiseAbs();
    double total = 0.0;
    for (Index i = 0; i < k; ++i) {
        const double mx = A.row(i).maxCoeff();
        if (mx == 0.0) throw RankError("amari_error: all-zero row in W");
        total += A.row(i).sum() / mx;
    }
    for (Index j = 0; j < k; ++j) {
        const double mx = A.col(j).maxCoeff();
        if (mx == 0.0) throw RankError("amari_error: all-zero column in W");
        total += A.col(j).sum() / mx;
    }
    return total / static_cast<double>(k) - 2.0;
}

double amari_error(const Matrix& B_hat, const Matrix& B) {
    if (B_hat.rows() != B_hat.cols() || B.rows() != B.cols() || B_hat.rows() != B.rows())
        throw InvalidInputError("amari_error: matrices must be square and same size");
    const Matrix A_hat = normalized_rows_of_inverse(B_hat);
    const Matrix A_true = normalized_rows_of_inverse(B);
    Eigen::FullPivLU<Matrix> lu(A_true);
    if (!lu.isInvertible()) throw RankError("amari_error: rank-deficient reference");
    return amari_error_from_W(A_hat * lu.inverse());
}

} // namespace noisyica
