#ifndef NOISYICA_EXTRACT_HPP
#define NOISYICA_EXTRACT_HPP

#include <functional>
#include <vector>

#include "noisyica/contrast.hpp"
#include "noisyica/rng.hpp"
#include "noisyica/synth.hpp"
#include "noisyica/types.hpp"

namespace noisyica {

struct PowerIterationResult {
    Vector u;
    int iterations = 0;
    bool converged = false;
};

/// Fixed-point iteration u <- grad f(C_dag u) / |grad f(C_dag u)|.
/// Stops when 1 - |<u_t, u_{t+1}>| < tol (sign-invariant) or after max_iter
/// updates. u0 must have unit norm. A gradient norm below 1e-12 raises
/// DegenerateGradientError; the caller restarts. When trace is non-null it
/// receives u0 followed by every iterate.
PowerIterationResult power_iterate(const Matrix& C_dag, ContrastKind kind, const Dataset& data,
                                   const Vector& u0, double tol, int max_iter,
                                   const ContrastGuards& guards = {},
                                   std::vector<Vector>* trace = nullptr);

struct ColumnDiagnostics {
    int iterations = 0;
    bool converged = false;
    int restarts_used = 0;
    double final_contrast = 0.0;
};

/// Full demixing estimate. Columns of U are the extracted unit vectors,
/// rows of V estimate B^{-1}. B_hat = U; B_hat_inv is the exact (or pseudo-)
/// inverse of B_hat, so B_hat_inv * B_hat = I whenever all columns converged.
struct DemixResult {
    Matrix U;
    Matrix V;
    Matrix B_hat;
    Matrix B_hat_inv;
    std::vector<ColumnDiagnostics> per_column;

    bool all_converged() const;
};

struct ExtractOptions {
    int restarts = 5;
    double tol = 1e-7;
    int max_iter = 200;
    ContrastGuards guards{};
};

/// Sequential extraction: for each column run power_iterate on the data
/// deflated by the already-extracted (U, V) pairs, trying both signs of C
/// per restart and keeping the run with the largest |final contrast|.
/// Deflation rows v = C_dag u / (u^T C_dag u). Columns whose restarts all
/// fail are marked converged = false and the inverse falls back to a
/// pseudo-inverse.
DemixResult extract_all(ContrastKind kind, const Dataset& data, const QuasiOrthMatrix& C, Rng& rng,
                        const ExtractOptions& opts = {});

using DemixScorer = std::function<double(const DemixResult&)>;

/// Runs extract_all num_inits times with independent derived seeds and
/// returns the result with the smallest scorer value (ties keep the first).
DemixResult best_of_restarts(ContrastKind kind, const Dataset& data, const QuasiOrthMatrix& C,
                             int num_inits, Rng& rng, const DemixScorer& scorer,
                             const ExtractOptions& opts = {});

} // namespace noisyica

#endif // NOISYICA_EXTRACT_HPP
