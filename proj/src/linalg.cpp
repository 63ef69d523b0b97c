#include "noisyica/linalg.hpp"

namespace noisyica {

Matrix sample_covariance(const Dataset& data) {
    if (data.n() < 2) throw InsufficientDataError("sample_covariance: needs at least 2 rows");
    return data.covariance();
}

PseudoInverse pseudo_inverse(const Matrix& M, double rel_cutoff) {
    if (!M.allFinite()) throw InvalidInputError("pseudo_inverse: non-finite entries");
    if (!(rel_cutoff > 0.0 && rel_cutoff < 1.0))
        throw InvalidInputError("pseudo_inverse: rel_cutoff must lie in (0,1)");
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double threshold = sv.size() > 0 ? rel_cutoff * sv(0) : 0.0;
    Vector inv_sv = Vector::Zero(sv.size());
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold && sv(i) > 0.0) {
            inv_sv(i) = 1.0 / sv(i);
            ++rank;
        }
    }
    PseudoInverse out;
    out.M_dag = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
    out.rank = rank;
    out.cutoff = rel_cutoff;
    return out;
}

SymmetricEigen sym_eigen(const Matrix& M) {
    if (!M.allFinite()) throw InvalidInputError("sym_eigen: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
    if (solver.info() != Eigen::Success) throw Error("sym_eigen: decomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Dataset symmetrize_dataset(const Dataset& data) {
    const Index n = data.n();
    if (n < 2) throw InsufficientDataError("symmetrize_dataset: needs at least 2 rows");
    const Index half = n / 2;
    const Matrix& X = data.samples();
    Matrix Y(half, data.k());
    for (Index i = 0; i < half; ++i) Y.row(i) = X.row(i) - X.row(half + i);
    return Dataset(std::move(Y));
}

} // namespace noisyica
