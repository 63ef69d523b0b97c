#ifndef NOISYICA_CONTRAST_HPP
#define NOISYICA_CONTRAST_HPP

#include <string>
#include <vector>

#include "noisyica/linalg.hpp"
#include "noisyica/rng.hpp"
#include "noisyica/synth.hpp"
#include "noisyica/types.hpp"

namespace noisyica {

/// The three contrast families. Writing y = X u and S for the cached
/// covariance (divisor n):
///   Kurtosis: fourth cumulant of the projection, mean(y^4) - 3 mean(y^2)^2;
///             equals the excess kurtosis whenever the projection has unit
///             variance (true for the standardized test datasets at |u|=1).
///   CHF:      log((E cos y)^2 + (E sin y)^2) + u^T S u.
///   CGF:      log E exp(y) - u^T S u / 2, via max-shifted log-sum-exp.
enum class ContrastKind { Kurtosis, CHF, CGF };

const char* to_string(ContrastKind kind);
ContrastKind parse_contrast_kind(const std::string& name);

struct ContrastGuards {
    double chf_modulus_floor = 1e-12; // below this CF modulus the log is considered degenerate
    double cgf_clip = 50.0;           // clamp on the shifted log-sum-exp exponent
};

double eval_contrast(ContrastKind kind, const Vector& u, const Dataset& data,
                     const ContrastGuards& guards = {});

/// Gradient of the empirical contrast; matches central finite differences of
/// eval_contrast on the same dataset.
Vector grad_contrast(ContrastKind kind, const Vector& u, const Dataset& data,
                     const ContrastGuards& guards = {});

/// Hessian of the empirical contrast (symmetric).
Matrix hessian_contrast(ContrastKind kind, const Vector& u, const Dataset& data,
                        const ContrastGuards& guards = {});

/// Quasi-orthogonalization matrix C = B D B^T estimated as an average of
/// contrast Hessians at random unit probes, plus its pseudo-inverse.
struct QuasiOrthMatrix {
    Matrix C;
    PseudoInverse C_dag;
    std::vector<Vector> probes;
    ContrastKind kind = ContrastKind::Kurtosis;
};

QuasiOrthMatrix quasi_orth_matrix(ContrastKind kind, const Dataset& data, int num_probes, Rng& rng,
                                  const ContrastGuards& guards = {},
                                  double pinv_cutoff = kDefaultPinvCutoff);

/// Wraps an externally supplied C (e.g. B_hat B_hat^T from another method)
/// in the same structure used by the extraction loop.
QuasiOrthMatrix quasi_orth_from_matrix(ContrastKind kind, Matrix C,
                                       double pinv_cutoff = kDefaultPinvCutoff);

} // namespace noisyica

#endif // NOISYICA_CONTRAST_HPP
