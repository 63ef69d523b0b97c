#include "noisyica/extract.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace noisyica {

namespace {
constexpr double kGradientFloor = 1e-12;
}

PowerIterationResult power_iterate(const Matrix& C_dag, ContrastKind kind, const Dataset& data,
                                   const Vector& u0, double tol, int max_iter,
                                   const ContrastGuards& guards, std::vector<Vector>* trace) {
    const Index k = data.k();
    if (C_dag.rows() != k || C_dag.cols() != k) throw InvalidInputError("power_iterate: C_dag has wrong shape");
    if (u0.size() != k) throw InvalidInputError("power_iterate: u0 has wrong dimension");
    if (std::abs(u0.norm() - 1.0) > 1e-8) throw InvalidInputError("power_iterate: u0 must have unit norm");
    if (!(tol > 0.0)) throw InvalidInputError("power_iterate: tol must be positive");
    if (max_iter < 0) throw InvalidInputError("power_iterate: max_iter must be nonnegative");

    Vector u = u0;
    if (trace) trace->push_back(u);
    PowerIterationResult out;
    out.u = u;
    for (int t = 0; t < max_iter; ++t) {
        const Vector g = grad_contrast(kind, C_dag * u, data, guards);
        const double gn = g.norm();
        if (gn < kGradientFloor) throw DegenerateGradientError("power_iterate: gradient vanished");
        const Vector u_next = g / gn;
        ++out.iterations;
        if (trace) trace->push_back(u_next);
        const bool done = 1.0 - std::abs(u.dot(u_next)) < tol;
        u = u_next;
        if (done) {
            out.converged = true;
            break;
        }
    }
    out.u = u;
    return out;
}

bool DemixResult::all_converged() const {
    for (const auto& col : per_column)
        if (!col.converged) return false;
    return true;
}

DemixResult extract_all(ContrastKind kind, const Dataset& data, const QuasiOrthMatrix& C, Rng& rng,
                        const ExtractOptions& opts) {
    if (opts.restarts < 1) throw InvalidInputError("extract_all: restarts must be at least 1");
    const Index k = data.k();
    if (C.C_dag.M_dag.rows() != k) throw InvalidInputError("extract_all: C does not match data dimension");

    DemixResult result;
    result.U = Matrix::Zero(k, k);
    result.V = Matrix::Zero(k, k);
    result.per_column.resize(static_cast<std::size_t>(k));

    struct Run {
        Vector u;
        int iterations = 0;
        bool converged = false;
        double contrast = 0.0;
    };

    Dataset deflated(data.samples());
    for (Index j = 0; j < k; ++j) {
        std::optional<Run> best;
        for (int r = 0; r < opts.restarts; ++r) {
            const Vector u0 = rng.unit_vector(k);
            for (const double sign : {1.0, -1.0}) {
                const Matrix C_dag = sign * C.C_dag.M_dag;
                try {
                    const auto it = power_iterate(C_dag, kind, deflated, u0, opts.tol, opts.max_iter, opts.guards);
                    const double fc = eval_contrast(kind, C_dag * it.u, deflated, opts.guards);
                    if (!best || std::abs(fc) > std::abs(best->contrast))
                        best = Run{it.u, it.iterations, it.converged, fc};
                } catch (const Error&) {
                    // failed run; remaining restarts cover it
                }
            }
        }

        auto& diag = result.per_column[static_cast<std::size_t>(j)];
        diag.restarts_used = opts.restarts;
        Vector u_j;
        Vector v_j;
        if (best) {
            u_j = best->u;
            diag.iterations = best->iterations;
            diag.converged = best->converged;
            diag.final_contrast = best->contrast;
        } else {
            u_j = rng.unit_vector(k);
            diag.converged = false;
        }

        const Vector cu = C.C_dag.M_dag * u_j;
        const double denom = u_j.dot(cu);
        if (best && std::isfinite(denom) && std::abs(denom) > 1e-12 * std::max(cu.norm(), 1e-300)) {
            v_j = cu / denom;
        } else {
            // degenerate pseudo-norm; fall back to Euclidean deflation
            v_j = u_j;
            diag.converged = false;
        }
        result.U.col(j) = u_j;
        result.V.row(j) = v_j.transpose();

        if (j + 1 < k) {
            const Matrix projector = Matrix::Identity(k, k) - result.V.transpose() * result.U.transpose();
            deflated = Dataset(data.samples() * projector);
        }
    }

    result.B_hat = result.U;
    Eigen::FullPivLU<Matrix> lu(result.U);
    if (result.all_converged() && lu.isInvertible()) {
        result.B_hat_inv = lu.inverse();
    } else {
        result.B_hat_inv = pseudo_inverse(result.U).M_dag;
    }
    // at completion the row estimates of B^{-1} are the rows of the inverse
    result.V = result.B_hat_inv;
    return result;
}

DemixResult best_of_restarts(ContrastKind kind, const Dataset& data, const QuasiOrthMatrix& C,
                             int num_inits, Rng& rng, const DemixScorer& scorer,
                             const ExtractOptions& opts) {
    if (num_inits < 1) throw InvalidInputError("best_of_restarts: num_inits must be at least 1");
    std::optional<DemixResult> best;
    double best_score = std::numeric_limits<double>::infinity();
    std::size_t failures = 0;
    for (int i = 0; i < num_inits; ++i) {
        Rng run_rng = rng.derive(static_cast<std::uint64_t>(i));
        try {
            DemixResult candidate = extract_all(kind, data, C, run_rng, opts);
            const double score = scorer(candidate);
            if (!best || score < best_score) {
                best = std::move(candidate);
                best_score = score;
            }
        } catch (const Error&) {
            ++failures;
        }
    }
    if (!best) throw EstimationFailureError("best_of_restarts: every initialization failed");
    (void)failures;
    return *best;
}

} // namespace noisyica
