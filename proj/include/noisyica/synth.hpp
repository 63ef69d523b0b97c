#ifndef NOISYICA_SYNTH_HPP
#define NOISYICA_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "noisyica/rng.hpp"
#include "noisyica/types.hpp"

namespace noisyica {

enum class SourceKind { BernoulliScaled, Uniform, Exponential, Laplace, StudentT, Gaussian };

/// One independent source distribution. Draws are standardized to mean 0 and
/// variance 1 using the analytic moments of the underlying law.
struct SourceSpec {
    SourceKind kind = SourceKind::Gaussian;
    double param = 0.0; // p / rate / scale / dof; unused for Uniform and Gaussian

    static SourceSpec bernoulli(double p);
    static SourceSpec uniform();
    static SourceSpec exponential(double rate);
    static SourceSpec laplace(double scale);
    static SourceSpec student_t(double dof);
    static SourceSpec gaussian();

    double sample(Rng& rng) const;

    /// Analytic excess kurtosis of the standardized law. Infinite for
    /// StudentT with dof <= 4.
    double excess_kurtosis() const;
};

/// Scaled kurtosis of a Bernoulli(p): (1 - 6p(1-p)) / (p(1-p)).
double scaled_kurtosis_bernoulli(double p);

/// Ground truth for one synthetic experiment: x = B z + g with
/// g ~ N(0, Sigma), Sigma = (rho/k) R R^T.
struct MixingModel {
    Matrix B;
    Matrix Sigma;
    double rho = 0.0;
    std::vector<SourceSpec> sources;
    std::uint64_t seed = 0;
    Matrix noise_factor; // sqrt(rho/k) * R, so Sigma = noise_factor * noise_factor^T

    Index k() const { return B.rows(); }
};

/// n x k sample matrix (rows are observations) with cached statistics.
class Dataset {
public:
    explicit Dataset(Matrix samples);

    const Matrix& samples() const { return X_; }
    Index n() const { return X_.rows(); }
    Index k() const { return X_.cols(); }
    const Vector& mean() const { return mean_; }

    /// Sample covariance with divisor n (plug-in convention). Zero matrix
    /// when n == 1.
    const Matrix& covariance() const { return cov_; }

    static Vector compute_mean(const Matrix& X);
    static Matrix compute_covariance(const Matrix& X);

private:
    Matrix X_;
    Vector mean_;
    Matrix cov_;
};

/// Haar-distributed orthonormal matrix (QR of a Gaussian matrix with the
/// R-diagonal sign correction).
Matrix random_orthonormal(Index k, Rng& rng);

/// B = U diag(lambda) V^T with U, V Haar and lambda_i ~ Uniform[lambda_min, lambda_max].
Matrix make_mixing_matrix(Index k, Rng& rng, double lambda_min = 1.0, double lambda_max = 3.0);

/// (rho/k) R R^T with R a k x k standard Gaussian matrix.
Matrix make_noise_cov(Index k, double rho, Rng& rng);

/// Assembles a full model: mixing matrix, noise covariance (with its factor
/// retained for exact sampling) and the source list. All randomness comes
/// from Rng(seed).
MixingModel make_model(Index k, double rho, std::vector<SourceSpec> sources, std::uint64_t seed,
                       double lambda_min = 1.0, double lambda_max = 3.0);

/// n rows of B z + g; z per model.sources, g = noise_factor * xi with xi iid normal.
Dataset generate_dataset(const MixingModel& model, Index n, Rng& rng);

/// The nine-source plan: 3 Uniform, 3 Exponential(5), 3 zero-kurtosis Bernoulli.
std::vector<SourceSpec> nine_source_plan();

} // namespace noisyica

#endif // NOISYICA_SYNTH_HPP
