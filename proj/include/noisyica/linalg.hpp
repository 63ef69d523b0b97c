#ifndef NOISYICA_LINALG_HPP
#define NOISYICA_LINALG_HPP

#include "noisyica/synth.hpp"
#include "noisyica/types.hpp"

namespace noisyica {

constexpr double kDefaultPinvCutoff = 1e-10;

/// Moore-Penrose inverse with the relative singular-value cutoff that
/// produced it. Directions below cutoff * sigma_max are projected out.
struct PseudoInverse {
    Matrix M_dag;
    int rank = 0;
    double cutoff = kDefaultPinvCutoff;
};

/// Sample covariance of the dataset, divisor n. Requires n >= 2.
Matrix sample_covariance(const Dataset& data);

/// SVD-based pseudo-inverse. rel_cutoff must lie in (0, 1).
PseudoInverse pseudo_inverse(const Matrix& M, double rel_cutoff = kDefaultPinvCutoff);

/// Eigendecomposition of a symmetric matrix, ascending eigenvalues.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};
SymmetricEigen sym_eigen(const Matrix& M);

/// Pairwise differences y_i = x_i - x_{floor(n/2)+i}, i = 1..floor(n/2).
/// The output is a sample from a symmetrized version of the same mixing
/// model (same B, symmetrized sources, doubled noise covariance).
Dataset symmetrize_dataset(const Dataset& data);

} // namespace noisyica

#endif // NOISYICA_LINALG_HPP
