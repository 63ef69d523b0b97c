#ifndef NOISYICA_METRICS_HPP
#define NOISYICA_METRICS_HPP

#include "noisyica/types.hpp"

namespace noisyica {

/// Amari error between an estimated and a true mixing matrix:
///   W = rownorm(B_hat^{-1}) * rownorm(B^{-1})^{-1}
///   d = (1/k) (sum_i sum_j |W_ij| / max_j |W_ij|
///            + sum_j sum_i |W_ij| / max_i |W_ij|) - 2
/// Zero iff B_hat equals B up to permutation and column scaling.
double amari_error(const Matrix& B_hat, const Matrix& B);

/// The formula applied to a given W; exposed so tests can drive W directly.
double amari_error_from_W(const Matrix& W);

} // namespace noisyica

#endif // NOISYICA_METRICS_HPP
