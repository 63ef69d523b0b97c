#include "noisyica/score.hpp"

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "noisyica/rng.hpp"

namespace noisyica {

namespace {

using Complex = std::complex<double>;

// Shared per-F state so a Monte-Carlo loop projects the data only once.
struct ProjectedScore {
    Matrix Y; // n x k, rows (F x_i)^T
    Matrix G; // F S F^T

    ProjectedScore(const Matrix& F, const Dataset& data) {
        if (F.rows() != data.k() || F.cols() != data.k())
            throw InvalidInputError("score: F must be k x k");
        if (!F.allFinite()) throw InvalidInputError("score: non-finite F");
        Y = data.samples() * F.transpose();
        G = F * data.covariance() * F.transpose();
    }

    struct Pair {
        double corrected = 0.0;
        double uncorrected = 0.0;
    };

    Pair evaluate_pair(const Vector& t) const {
        const Index k = Y.cols();
        if (t.size() != k) throw InvalidInputError("score: t has wrong dimension");
        if (!t.allFinite()) throw InvalidInputError("score: non-finite t");

        const Array p = (Y * t).array();
        const Complex joint(p.cos().mean(), p.sin().mean());
        Complex prod(1.0, 0.0);
        for (Index j = 0; j < k; ++j) {
            const Array pj = t(j) * Y.col(j).array();
            prod *= Complex(pj.cos().mean(), pj.sin().mean());
        }
        double diag_quad = 0.0;
        for (Index j = 0; j < k; ++j) diag_quad += G(j, j) * t(j) * t(j);
        Pair out;
        out.uncorrected = std::abs(joint - prod);
        out.corrected = std::abs(joint * std::exp(-0.5 * diag_quad) - prod * std::exp(-0.5 * t.dot(G * t)));
        return out;
    }

    double evaluate(const Vector& t, bool corrected) const {
        const Pair pair = evaluate_pair(t);
        return corrected ? pair.corrected : pair.uncorrected;
    }
};

double stddev_population(const std::vector<double>& xs, double mean) {
    if (xs.empty()) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

} // namespace

double corrected_score(const Vector& t, const Matrix& F, const Dataset& data) {
    return ProjectedScore(F, data).evaluate(t, true);
}

double uncorrected_score(const Vector& t, const Matrix& F, const Dataset& data) {
    return ProjectedScore(F, data).evaluate(t, false);
}

ScoreReport mc_score(const Matrix& F, const Dataset& data, int M, std::uint64_t probe_seed,
                     bool corrected) {
    if (M < 1) throw InvalidInputError("mc_score: M must be at least 1");
    const ProjectedScore projected(F, data);
    Rng rng(probe_seed);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(M));
    int failed = 0;
    for (int m = 0; m < M; ++m) {
        const Vector t = rng.normal_vector(data.k());
        try {
            values.push_back(projected.evaluate(t, corrected));
        } catch (const Error&) {
            ++failed;
        }
    }
    if (failed * 2 > M) throw EstimationFailureError("mc_score: more than half of the probes failed");
    ScoreReport report;
    report.num_probes = static_cast<int>(values.size());
    report.corrected = corrected;
    report.probe_seed = probe_seed;
    double sum = 0.0;
    for (double v : values) sum += v;
    report.mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
    report.stddev = stddev_population(values, report.mean);
    return report;
}

std::pair<ScoreReport, ScoreReport> mc_score_both(const Matrix& F, const Dataset& data, int M,
                                                  std::uint64_t probe_seed) {
    if (M < 1) throw InvalidInputError("mc_score: M must be at least 1");
    const ProjectedScore projected(F, data);
    Rng rng(probe_seed);
    std::vector<double> corr, unc;
    corr.reserve(static_cast<std::size_t>(M));
    unc.reserve(static_cast<std::size_t>(M));
    int failed = 0;
    for (int m = 0; m < M; ++m) {
        const Vector t = rng.normal_vector(data.k());
        try {
            const auto pair = projected.evaluate_pair(t);
            corr.push_back(pair.corrected);
            unc.push_back(pair.uncorrected);
        } catch (const Error&) {
            ++failed;
        }
    }
    if (failed * 2 > M) throw EstimationFailureError("mc_score: more than half of the probes failed");
    auto make_report = [&](const std::vector<double>& values, bool corrected) {
        ScoreReport report;
        report.num_probes = static_cast<int>(values.size());
        report.corrected = corrected;
        report.probe_seed = probe_seed;
        double sum = 0.0;
        for (double v : values) sum += v;
        report.mean = values.empty() ? 0.0 : sum / static_cast<double>(values.size());
        report.stddev = stddev_population(values, report.mean);
        return report;
    };
    return {make_report(corr, true), make_report(unc, false)};
}

SequentialScore sequential_score(const Dataset& data, const Matrix& U, const Matrix& V, int M,
                                 std::uint64_t probe_seed) {
    const Index k = data.k();
    const Index ell = U.cols();
    if (ell < 1 || ell > k || U.rows() != k || V.rows() != ell || V.cols() != k)
        throw InvalidInputError("sequential_score: U must be k x ell and V ell x k with 1 <= ell <= k");
    if (!U.allFinite() || !V.allFinite()) throw InvalidInputError("sequential_score: non-finite U or V");
    if (M < 1) throw InvalidInputError("sequential_score: M must be at least 1");

    const Matrix& X = data.samples();
    const Index n = data.n();
    const Index k0 = std::min<Index>(ell + 1, k);

    // Y_a = X (u_a v_a^T)^T collapses to (X v_a) u_a^T, so each per-probe
    // column is (X v_a) scaled by u_a . t.
    Matrix XV(n, ell);
    for (Index a = 0; a < ell; ++a) XV.col(a) = X * V.row(a).transpose();
    Matrix Y_residual;
    if (ell < k) Y_residual = X * (Matrix::Identity(k, k) - V.transpose() * U.transpose());

    Rng rng(probe_seed);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(M));
    Matrix W(n, k0);
    for (int m = 0; m < M; ++m) {
        const Vector t = rng.unit_vector(k);
        for (Index a = 0; a < ell; ++a) W.col(a) = XV.col(a) * (U.col(a).dot(t));
        if (ell < k) W.col(k0 - 1) = Y_residual * t;

        const Matrix S = Dataset::compute_covariance(W);
        const Array total = W.rowwise().sum().array();
        Complex joint(total.cos().mean(), total.sin().mean());
        joint *= std::exp(-0.5 * S.trace());
        Complex prod(1.0, 0.0);
        for (Index a = 0; a < k0; ++a) {
            const Array wa = W.col(a).array();
            prod *= Complex(wa.cos().mean(), wa.sin().mean());
        }
        prod *= std::exp(-0.5 * S.sum());
        values.push_back(std::abs(joint - prod));
    }
    SequentialScore out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    out.stddev = stddev_population(values, out.mean);
    return out;
}

} // namespace noisyica
