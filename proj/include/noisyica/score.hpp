#ifndef NOISYICA_SCORE_HPP
#define NOISYICA_SCORE_HPP

#include <cstdint>
#include <utility>

#include "noisyica/synth.hpp"
#include "noisyica/types.hpp"

namespace noisyica {

/// Monte-Carlo independence score over probe directions t ~ N(0, I_k).
struct ScoreReport {
    double mean = 0.0;
    double stddev = 0.0;
    int num_probes = 0;
    bool corrected = true;
    std::uint64_t probe_seed = 0;
};

/// Corrected independence score
///   | E exp(i t^T F x) exp(-t^T diag(F S F^T) t / 2)
///     - prod_j E exp(i t_j (F x)_j) exp(-t^T F S F^T t / 2) |
/// with S the cached sample covariance. Zero at F = D P B^{-1}.
double corrected_score(const Vector& t, const Matrix& F, const Dataset& data);

/// Same discrepancy without the Gaussian correction exponentials.
double uncorrected_score(const Vector& t, const Matrix& F, const Dataset& data);

/// Mean and standard deviation of the chosen score over M probes drawn from
/// N(0, I_k); the probe sequence is fully determined by probe_seed. Failed
/// probes are excluded; more than half failing raises EstimationFailureError.
ScoreReport mc_score(const Matrix& F, const Dataset& data, int M, std::uint64_t probe_seed,
                     bool corrected = true);

/// Corrected and uncorrected reports from a single probe sweep (the two
/// scores share all empirical averages).
std::pair<ScoreReport, ScoreReport> mc_score_both(const Matrix& F, const Dataset& data, int M,
                                                  std::uint64_t probe_seed);

struct SequentialScore {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Column-wise score after extracting ell columns: U is k x ell, V is
/// ell x k. Projects the data onto each extracted component (plus the
/// residual when ell < k), contracts every projection with a random unit
/// vector and scores the joint-vs-product discrepancy of the resulting
/// min(ell+1, k) scalars, with covariance corrections as in the full score.
SequentialScore sequential_score(const Dataset& data, const Matrix& U, const Matrix& V, int M,
                                 std::uint64_t probe_seed);

} // namespace noisyica

#endif // NOISYICA_SCORE_HPP
