#include "noisyica/synth.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace noisyica {

SourceSpec SourceSpec::bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInputError("bernoulli: p must lie in (0,1)");
    return {SourceKind::BernoulliScaled, p};
}

SourceSpec SourceSpec::uniform() { return {SourceKind::Uniform, 0.0}; }

SourceSpec SourceSpec::exponential(double rate) {
    if (!(rate > 0.0)) throw InvalidInputError("exponential: rate must be positive");
    return {SourceKind::Exponential, rate};
}

SourceSpec SourceSpec::laplace(double scale) {
    if (!(scale > 0.0)) throw InvalidInputError("laplace: scale must be positive");
    return {SourceKind::Laplace, scale};
}

SourceSpec SourceSpec::student_t(double dof) {
    if (!(dof > 2.0)) throw InvalidInputError("student_t: dof must exceed 2");
    return {SourceKind::StudentT, dof};
}

SourceSpec SourceSpec::gaussian() { return {SourceKind::Gaussian, 0.0}; }

double SourceSpec::sample(Rng& rng) const {
    switch (kind) {
        case SourceKind::BernoulliScaled: {
            const double p = param;
            const double x = rng.uniform01() < p ? 1.0 : 0.0;
            return (x - p) / std::sqrt(p * (1.0 - p));
        }
        case SourceKind::Uniform:
            return rng.uniform(-std::sqrt(3.0), std::sqrt(3.0));
        case SourceKind::Exponential:
            // mean 1/rate, sd 1/rate
            return rng.exponential(param) * param - 1.0;
        case SourceKind::Laplace:
            return rng.laplace(param) / (param * std::sqrt(2.0));
        case SourceKind::StudentT:
            return rng.student_t(param) / std::sqrt(param / (param - 2.0));
        case SourceKind::Gaussian:
            return rng.normal();
    }
    throw InvalidInputError("unknown source kind");
}

double SourceSpec::excess_kurtosis() const {
    switch (kind) {
        case SourceKind::BernoulliScaled:
            return scaled_kurtosis_bernoulli(param);
        case SourceKind::Uniform:
            return -1.2;
        case SourceKind::Exponential:
            return 6.0;
        case SourceKind::Laplace:
            return 3.0;
        case SourceKind::StudentT:
            return param > 4.0 ? 6.0 / (param - 4.0) : std::numeric_limits<double>::infinity();
        case SourceKind::Gaussian:
            return 0.0;
    }
    throw InvalidInputError("unknown source kind");
}

double scaled_kurtosis_bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInputError("scaled_kurtosis_bernoulli: p must lie in (0,1)");
    const double pq = p * (1.0 - p);
    return (1.0 - 6.0 * pq) / pq;
}

Vector Dataset::compute_mean(const Matrix& X) { return X.colwise().mean().transpose(); }

Matrix Dataset::compute_covariance(const Matrix& X) {
    const Index n = X.rows();
    if (n < 2) return Matrix::Zero(X.cols(), X.cols());
    const Matrix centered = X.rowwise() - X.colwise().mean();
    Matrix cov = (centered.transpose() * centered) / static_cast<double>(n);
    cov = ((cov + cov.transpose()) * 0.5).eval();
    return cov;
}

Dataset::Dataset(Matrix samples) : X_(std::move(samples)) {
    if (X_.rows() < 1 || X_.cols() < 1) throw InvalidInputError("dataset: needs at least one row and column");
    if (!X_.allFinite()) throw InvalidInputError("dataset: non-finite samples");
    mean_ = compute_mean(X_);
    cov_ = compute_covariance(X_);
}

Matrix random_orthonormal(Index k, Rng& rng) {
    Matrix G(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ();
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < k; ++j)
        if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
    return Q;
}

Matrix make_mixing_matrix(Index k, Rng& rng, double lambda_min, double lambda_max) {
    if (k < 2) throw InvalidInputError("make_mixing_matrix: k must be at least 2");
    if (!(lambda_min > 0.0 && lambda_max >= lambda_min))
        throw InvalidInputError("make_mixing_matrix: invalid singular-value range");
    const Matrix U = random_orthonormal(k, rng);
    const Matrix V = random_orthonormal(k, rng);
    Vector lambda(k);
    for (Index i = 0; i < k; ++i) lambda(i) = rng.uniform(lambda_min, lambda_max);
    return U * lambda.asDiagonal() * V.transpose();
}

Matrix make_noise_cov(Index k, double rho, Rng& rng) {
    if (rho < 0.0) throw InvalidInputError("make_noise_cov: rho must be nonnegative");
    Matrix R(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) R(i, j) = rng.normal();
    Matrix Sigma = (rho / static_cast<double>(k)) * (R * R.transpose());
    return ((Sigma + Sigma.transpose()) * 0.5).eval();
}

MixingModel make_model(Index k, double rho, std::vector<SourceSpec> sources, std::uint64_t seed,
                       double lambda_min, double lambda_max) {
    if (static_cast<Index>(sources.size()) != k)
        throw InvalidInputError("make_model: sources must list one spec per dimension");
    if (rho < 0.0) throw InvalidInputError("make_model: rho must be nonnegative");
    Rng rng(seed);
    MixingModel model;
    model.B = make_mixing_matrix(k, rng, lambda_min, lambda_max);
    Matrix R(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) R(i, j) = rng.normal();
    model.noise_factor = std::sqrt(rho / static_cast<double>(k)) * R;
    Matrix Sigma = model.noise_factor * model.noise_factor.transpose();
    model.Sigma = ((Sigma + Sigma.transpose()) * 0.5).eval();
    model.rho = rho;
    model.sources = std::move(sources);
    model.seed = seed;
    return model;
}

Dataset generate_dataset(const MixingModel& model, Index n, Rng& rng) {
    if (n < 1) throw InvalidInputError("generate_dataset: n must be at least 1");
    const Index k = model.k();
    Matrix X(n, k);
    Vector z(k);
    Vector xi(k);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < k; ++j) z(j) = model.sources[static_cast<std::size_t>(j)].sample(rng);
        for (Index j = 0; j < k; ++j) xi(j) = rng.normal();
        X.row(i) = (model.B * z + model.noise_factor * xi).transpose();
    }
    return Dataset(std::move(X));
}

std::vector<SourceSpec> nine_source_plan() {
    const double p0 = 0.5 - 1.0 / std::sqrt(12.0);
    std::vector<SourceSpec> plan;
    for (int i = 0; i < 3; ++i) plan.push_back(SourceSpec::uniform());
    for (int i = 0; i < 3; ++i) plan.push_back(SourceSpec::exponential(5.0));
    for (int i = 0; i < 3; ++i) plan.push_back(SourceSpec::bernoulli(p0));
    return plan;
}

} // namespace noisyica
