#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "noisyica/contrast.hpp"
#include "noisyica/linalg.hpp"

using namespace noisyica;
using testutil::fd_gradient;
using testutil::fd_hessian;

namespace {

const std::vector<ContrastKind> kAllKinds = {ContrastKind::Kurtosis, ContrastKind::CHF,
                                             ContrastKind::CGF};

Dataset gaussian_dataset(Index k, Index n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix X(n, k);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < k; ++j) X(i, j) = rng.normal();
    return Dataset(std::move(X));
}

Dataset source_dataset(const std::vector<SourceSpec>& sources, const Matrix& B, Index n,
                       std::uint64_t seed) {
    Rng rng(seed);
    const Index k = static_cast<Index>(sources.size());
    Matrix X(n, k);
    Vector z(k);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < k; ++j) z(j) = sources[static_cast<std::size_t>(j)].sample(rng);
        X.row(i) = (B * z).transpose();
    }
    return Dataset(std::move(X));
}

} // namespace

TEST_CASE("contrast vanishes at u = 0") {
    const Dataset data = source_dataset({SourceSpec::exponential(5.0), SourceSpec::uniform()},
                                        Matrix::Identity(2, 2), 5000, 1);
    const Vector zero = Vector::Zero(2);
    for (const auto kind : kAllKinds) CHECK(eval_contrast(kind, zero, data) == 0.0);
}

TEST_CASE("cgf nullity on gaussian data") {
    const Dataset data = gaussian_dataset(1, 1000000, 2);
    Vector u(1);
    u << 0.5;
    CHECK(std::abs(eval_contrast(ContrastKind::CGF, u, data)) < 0.01);
}

TEST_CASE("kurtosis contrast vanishes for the zero-kurtosis bernoulli") {
    const double p0 = 0.5 - 1.0 / std::sqrt(12.0);
    const Dataset data = source_dataset({SourceSpec::bernoulli(p0)}, Matrix::Identity(1, 1), 1000000, 3);
    Vector u(1);
    u << 1.0;
    CHECK(std::abs(eval_contrast(ContrastKind::Kurtosis, u, data)) < 0.05);
}

TEST_CASE("gradient vanishes at u = 0 for symmetric sources") {
    const std::vector<SourceSpec> sources = {SourceSpec::uniform(), SourceSpec::laplace(1.0)};
    Rng brng(4);
    const Matrix B = make_mixing_matrix(2, brng);
    const Index n = 10000;
    const Dataset data = source_dataset(sources, B, n, 5);
    const Vector zero = Vector::Zero(2);
    for (const auto kind : kAllKinds) {
        const double bound = 5.0 * static_cast<double>(data.k()) / std::sqrt(static_cast<double>(n));
        CHECK(grad_contrast(kind, zero, data).norm() < bound);
    }
}

TEST_CASE("cgf gradient is small on gaussian data") {
    const Dataset data = gaussian_dataset(2, 1000000, 6);
    Vector u(2);
    u << 0.3, 0.4;
    CHECK(grad_contrast(ContrastKind::CGF, u, data).norm() < 0.02);
}

// Draws a direction whose CF modulus is healthy: near CF-degenerate points
// the log derivatives blow up and coarse finite differences lose validity.
static Vector well_conditioned_u(Rng& rng, const Dataset& data, double radius) {
    for (;;) {
        const Vector u = radius * rng.unit_vector(data.k());
        const Array y = (data.samples() * u).array();
        const double c = y.cos().mean();
        const double s = y.sin().mean();
        if (c * c + s * s > 5e-3) return u;
    }
}

TEST_CASE("gradients match central finite differences") {
    const std::vector<SourceSpec> sources = {SourceSpec::uniform(), SourceSpec::exponential(5.0),
                                             SourceSpec::bernoulli(0.3)};
    Rng brng(7);
    const Matrix B = make_mixing_matrix(3, brng);
    const Dataset data = source_dataset(sources, B, 10000, 8);
    Rng urng(9);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const ContrastKind kind = kAllKinds[static_cast<std::size_t>(trial) % 3];
        const Vector u = well_conditioned_u(urng, data, 0.8);
        const Vector g = grad_contrast(kind, u, data);
        const Vector g_fd = fd_gradient([&](const Vector& v) { return eval_contrast(kind, v, data); }, u);
        const double rel = (g - g_fd).norm() / std::max(g_fd.norm(), 1e-12);
        CAPTURE(trial);
        CHECK(rel < 1e-4);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("cgf hessian at zero is the zero matrix") {
    const std::vector<SourceSpec> sources = {SourceSpec::exponential(5.0), SourceSpec::uniform()};
    const Dataset data = source_dataset(sources, Matrix::Identity(2, 2), 5000, 10);
    const Matrix H = hessian_contrast(ContrastKind::CGF, Vector::Zero(2), data);
    CHECK(H.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hessians match finite differences entrywise") {
    const std::vector<SourceSpec> sources = {SourceSpec::uniform(), SourceSpec::bernoulli(0.25),
                                             SourceSpec::laplace(0.8)};
    Rng brng(11);
    const Matrix B = make_mixing_matrix(3, brng);
    const Dataset data = source_dataset(sources, B, 10000, 12);
    Rng urng(13);
    for (int trial = 0; trial < 12; ++trial) {
        const ContrastKind kind = kAllKinds[static_cast<std::size_t>(trial) % 3];
        const Vector u = well_conditioned_u(urng, data, 0.7);
        const Matrix H = hessian_contrast(kind, u, data);
        const Matrix H_fd =
            fd_hessian([&](const Vector& v) { return eval_contrast(kind, v, data); }, u);
        CAPTURE(trial);
        CHECK((H - H_fd).cwiseAbs().maxCoeff() < 1e-3);
        CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("hessian has the B D B^T structure") {
    const std::vector<SourceSpec> sources(3, SourceSpec::uniform());
    Rng brng(14);
    const Matrix B = make_mixing_matrix(3, brng);
    const Dataset data = source_dataset(sources, B, 100000, 15);
    Rng urng(16);
    const Vector u = urng.unit_vector(3);
    const Matrix H = hessian_contrast(ContrastKind::CGF, u, data);
    const Matrix D = B.inverse() * H * B.transpose().inverse();
    const double diag_mass = D.diagonal().norm();
    const double off_mass = (D - Matrix(D.diagonal().asDiagonal())).norm();
    CHECK(off_mass < 0.10 * diag_mass);
}

TEST_CASE("gaussian nullity across kinds") {
    const Dataset data = gaussian_dataset(3, 1000000, 17);
    Rng urng(18);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector u = urng.unit_vector(3);
        for (const auto kind : kAllKinds) {
            CAPTURE(trial);
            CHECK(std::abs(eval_contrast(kind, u, data)) < 0.02);
        }
    }
}

TEST_CASE("chf and cgf are additive over independent blocks") {
    // x = (z1, z2) with independent coordinates; block estimates give the
    // Monte-Carlo standard error of the additivity defect
    const SourceSpec s1 = SourceSpec::exponential(5.0);
    const SourceSpec s2 = SourceSpec::bernoulli(0.3);
    Rng rng(19);
    const Index n = 200000;
    Matrix X(n, 2);
    for (Index i = 0; i < n; ++i) {
        X(i, 0) = s1.sample(rng);
        X(i, 1) = s2.sample(rng);
    }
    Vector u(2);
    u << 0.6, -0.8;
    Vector ua(1), ub(1);
    ua << u(0);
    ub << u(1);

    for (const auto kind : {ContrastKind::CHF, ContrastKind::CGF}) {
        const int blocks = 20;
        const Index block_n = n / blocks;
        std::vector<double> defects;
        for (int b = 0; b < blocks; ++b) {
            const Matrix Xb = X.middleRows(b * block_n, block_n);
            const Dataset joint(Xb);
            const Dataset first(Matrix(Xb.col(0)));
            const Dataset second(Matrix(Xb.col(1)));
            defects.push_back(eval_contrast(kind, u, joint) - eval_contrast(kind, ua, first) -
                              eval_contrast(kind, ub, second));
        }
        double mean = 0.0;
        for (double d : defects) mean += d;
        mean /= blocks;
        double var = 0.0;
        for (double d : defects) var += (d - mean) * (d - mean);
        const double se = std::sqrt(var / blocks) / std::sqrt(static_cast<double>(blocks));
        CAPTURE(to_string(kind));
        CHECK(std::abs(mean) <= 3.0 * se + 1e-6);
    }
}

TEST_CASE("additive gaussian noise barely moves chf and cgf") {
    const std::vector<SourceSpec> sources = {SourceSpec::uniform(), SourceSpec::bernoulli(0.3)};
    Rng rng(20);
    const Matrix B = make_mixing_matrix(2, rng);
    const Matrix Sigma_factor = 0.3 * Matrix::Identity(2, 2);
    const Index n = 1000000;
    Matrix clean(n, 2), noisy(n, 2);
    Vector z(2);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < 2; ++j) z(j) = sources[static_cast<std::size_t>(j)].sample(rng);
        const Vector signal = B * z;
        clean.row(i) = signal.transpose();
        noisy.row(i) = (signal + Sigma_factor * rng.normal_vector(2)).transpose();
    }
    const Dataset clean_data(std::move(clean));
    const Dataset noisy_data(std::move(noisy));
    Rng urng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector u = urng.unit_vector(2);
        for (const auto kind : {ContrastKind::CHF, ContrastKind::CGF}) {
            CAPTURE(trial);
            CHECK(std::abs(eval_contrast(kind, u, noisy_data) - eval_contrast(kind, u, clean_data)) <
                  0.05);
        }
    }
}

TEST_CASE("contrasts are symmetric on symmetrized data") {
    const std::vector<SourceSpec> sources = {SourceSpec::exponential(5.0), SourceSpec::bernoulli(0.2)};
    Rng brng(22);
    const Matrix B = make_mixing_matrix(2, brng);
    const Dataset sym = symmetrize_dataset(source_dataset(sources, B, 200000, 23));
    Rng urng(24);
    const Index n = sym.n();
    const int blocks = 20;
    const Index block_n = n / blocks;
    for (const auto kind : kAllKinds) {
        const Vector u = urng.unit_vector(2);
        std::vector<double> defects;
        for (int b = 0; b < blocks; ++b) {
            const Dataset block(Matrix(sym.samples().middleRows(b * block_n, block_n)));
            defects.push_back(eval_contrast(kind, u, block) - eval_contrast(kind, Vector(-u), block));
        }
        double mean = 0.0;
        for (double d : defects) mean += d;
        mean /= blocks;
        double var = 0.0;
        for (double d : defects) var += (d - mean) * (d - mean);
        const double se = std::sqrt(var / blocks) / std::sqrt(static_cast<double>(blocks));
        CAPTURE(to_string(kind));
        CHECK(std::abs(mean) <= 3.0 * se + 1e-9);
    }
}

TEST_CASE("chf degenerate direction raises") {
    Matrix X(2, 1);
    X << M_PI / 2.0, -M_PI / 2.0; // empirical CF is numerically zero at u = 1
    const Dataset data(X);
    Vector u(1);
    u << 1.0;
    CHECK_THROWS_AS(eval_contrast(ContrastKind::CHF, u, data), DegenerateDirectionError);
    CHECK_THROWS_AS(grad_contrast(ContrastKind::CHF, u, data), DegenerateDirectionError);
}

TEST_CASE("cgf overflow raises") {
    Matrix X(2, 1);
    X << 1e200, -1e200;
    const Dataset data(X);
    Vector u(1);
    u << 1e200; // projection overflows doubles
    CHECK_THROWS_AS(eval_contrast(ContrastKind::CGF, u, data), CgfOverflowError);
}

TEST_CASE("guard parameters are validated") {
    const Dataset data = gaussian_dataset(1, 100, 25);
    Vector u(1);
    u << 1.0;
    ContrastGuards bad;
    bad.chf_modulus_floor = 0.0;
    CHECK_THROWS_AS(eval_contrast(ContrastKind::CHF, u, data, bad), InvalidInputError);
    bad = ContrastGuards{};
    bad.cgf_clip = -1.0;
    CHECK_THROWS_AS(eval_contrast(ContrastKind::CGF, u, data, bad), InvalidInputError);
}

TEST_CASE("quasi-orth matrix on gaussian data is near zero") {
    const Dataset data = gaussian_dataset(2, 1000000, 26);
    for (const auto kind : kAllKinds) {
        Rng rng(27);
        const QuasiOrthMatrix C = quasi_orth_matrix(kind, data, 1, rng);
        CAPTURE(to_string(kind));
        CHECK(C.C.norm() < 0.05 * static_cast<double>(data.k()));
    }
}

TEST_CASE("scalar kurtosis quasi-orth matches 12 kappa4") {
    // Bernoulli(1/2) standardizes to +-1, so the empirical fourth cumulant
    // of u x is exactly -2 u^4 and its second derivative at |u| = 1 is -24
    const Dataset data = source_dataset({SourceSpec::bernoulli(0.5)}, Matrix::Identity(1, 1), 1000000, 28);
    Rng rng(29);
    const QuasiOrthMatrix C = quasi_orth_matrix(ContrastKind::Kurtosis, data, 1, rng);
    CHECK(C.C(0, 0) < 0.0);
    CHECK(C.C(0, 0) == doctest::Approx(12.0 * (-2.0)).epsilon(1e-9));
    const Vector probe = C.probes.at(0);
    const Matrix fd = fd_hessian(
        [&](const Vector& v) { return eval_contrast(ContrastKind::Kurtosis, v, data); }, probe);
    CHECK(C.C(0, 0) == doctest::Approx(fd(0, 0)).epsilon(1e-4));
}

TEST_CASE("multi-probe quasi-orth is the exact mean of per-probe hessians") {
    const std::vector<SourceSpec> sources = {SourceSpec::uniform(), SourceSpec::exponential(5.0)};
    const Dataset data = source_dataset(sources, Matrix::Identity(2, 2), 20000, 30);
    Rng rng(31);
    const QuasiOrthMatrix C = quasi_orth_matrix(ContrastKind::CHF, data, 2, rng);
    REQUIRE(C.probes.size() == 2);
    const Matrix expected = 0.5 * (hessian_contrast(ContrastKind::CHF, C.probes[0], data) +
                                   hessian_contrast(ContrastKind::CHF, C.probes[1], data));
    CHECK((C.C - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((C.C - C.C.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK_THROWS_AS(quasi_orth_matrix(ContrastKind::CHF, data, 0, rng), InvalidInputError);
}

TEST_CASE("diagonalizability of the estimated C for chf and cgf") {
    const std::vector<SourceSpec> sources(4, SourceSpec::uniform());
    Rng brng(32);
    const Matrix B = make_mixing_matrix(4, brng);
    const Dataset data = source_dataset(sources, B, 100000, 33);
    for (const auto kind : {ContrastKind::CHF, ContrastKind::CGF}) {
        Rng rng(34);
        const QuasiOrthMatrix C = quasi_orth_matrix(kind, data, 1, rng);
        const Matrix D = B.inverse() * C.C * B.transpose().inverse();
        const double diag_mass = D.diagonal().norm();
        const double off_mass = (D - Matrix(D.diagonal().asDiagonal())).norm();
        CAPTURE(to_string(kind));
        CHECK(off_mass < 0.15 * diag_mass);
    }
}
