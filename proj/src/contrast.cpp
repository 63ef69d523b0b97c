#include "noisyica/contrast.hpp"

#include <cmath>

namespace noisyica {

namespace {

void check_input(const Vector& u, const Dataset& data, const ContrastGuards& guards) {
    if (u.size() != data.k()) throw InvalidInputError("contrast: u has wrong dimension");
    if (!u.allFinite()) throw InvalidInputError("contrast: u has non-finite entries");
    if (!(guards.chf_modulus_floor > 0.0)) throw InvalidInputError("contrast: chf_modulus_floor must be positive");
    if (!(guards.cgf_clip > 0.0)) throw InvalidInputError("contrast: cgf_clip must be positive");
}

// Normalized weights of the exponential tilt exp(y_i) / sum_j exp(y_j),
// computed with the max shift; shifted exponents clamped at -cgf_clip.
Array cgf_tilt_weights(const Array& y, double clip) {
    const double shift = y.maxCoeff();
    Array w = (y - shift).max(-clip).exp();
    return w / w.sum();
}

double cgf_log_mean_exp(const Array& y, double clip) {
    const double shift = y.maxCoeff();
    const Array e = (y - shift).max(-clip);
    return shift + std::log(e.exp().mean());
}

} // namespace

const char* to_string(ContrastKind kind) {
    switch (kind) {
        case ContrastKind::Kurtosis: return "kurtosis";
        case ContrastKind::CHF: return "chf";
        case ContrastKind::CGF: return "cgf";
    }
    return "?";
}

ContrastKind parse_contrast_kind(const std::string& name) {
    if (name == "kurtosis") return ContrastKind::Kurtosis;
    if (name == "chf") return ContrastKind::CHF;
    if (name == "cgf") return ContrastKind::CGF;
    throw InvalidInputError("unknown contrast kind: " + name);
}

double eval_contrast(ContrastKind kind, const Vector& u, const Dataset& data,
                     const ContrastGuards& guards) {
    check_input(u, data, guards);
    const Matrix& X = data.samples();
    const double n = static_cast<double>(data.n());
    const Array y = (X * u).array();

    switch (kind) {
        case ContrastKind::Kurtosis: {
            const Array y2 = y.square();
            const double m2 = y2.mean();
            const double m4 = y2.square().mean();
            return m4 - 3.0 * m2 * m2;
        }
        case ContrastKind::CHF: {
            const double c = y.cos().mean();
            const double s = y.sin().mean();
            const double modulus = c * c + s * s;
            if (modulus < guards.chf_modulus_floor)
                throw DegenerateDirectionError("chf: empirical CF modulus below floor");
            return std::log(modulus) + u.dot(data.covariance() * u);
        }
        case ContrastKind::CGF: {
            if (!y.allFinite()) throw CgfOverflowError("cgf: projection overflow");
            const double value = cgf_log_mean_exp(y, guards.cgf_clip) - 0.5 * u.dot(data.covariance() * u);
            if (!std::isfinite(value)) throw CgfOverflowError("cgf: value overflow");
            return value;
        }
    }
    (void)n;
    throw InvalidInputError("unknown contrast kind");
}

Vector grad_contrast(ContrastKind kind, const Vector& u, const Dataset& data,
                     const ContrastGuards& guards) {
    check_input(u, data, guards);
    const Matrix& X = data.samples();
    const double n = static_cast<double>(data.n());
    const Array y = (X * u).array();

    switch (kind) {
        case ContrastKind::Kurtosis: {
            const double m2 = y.square().mean();
            const Vector g1 = X.transpose() * y.cube().matrix() / n;
            const Vector g2 = X.transpose() * y.matrix() / n; // = S0 u
            return 4.0 * g1 - 12.0 * m2 * g2;
        }
        case ContrastKind::CHF: {
            const Array cy = y.cos();
            const Array sy = y.sin();
            const double c = cy.mean();
            const double s = sy.mean();
            const double modulus = c * c + s * s;
            if (modulus < guards.chf_modulus_floor)
                throw DegenerateDirectionError("chf: empirical CF modulus below floor");
            const Vector grad_c = -(X.transpose() * sy.matrix()) / n;
            const Vector grad_s = (X.transpose() * cy.matrix()) / n;
            return 2.0 * (c * grad_c + s * grad_s) / modulus + 2.0 * (data.covariance() * u);
        }
        case ContrastKind::CGF: {
            if (!y.allFinite()) throw CgfOverflowError("cgf: projection overflow");
            const Array w = cgf_tilt_weights(y, guards.cgf_clip);
            const Vector tilted_mean = X.transpose() * w.matrix();
            return tilted_mean - data.covariance() * u;
        }
    }
    throw InvalidInputError("unknown contrast kind");
}

Matrix hessian_contrast(ContrastKind kind, const Vector& u, const Dataset& data,
                        const ContrastGuards& guards) {
    check_input(u, data, guards);
    const Matrix& X = data.samples();
    const double n = static_cast<double>(data.n());
    const Array y = (X * u).array();
    Matrix H;

    switch (kind) {
        case ContrastKind::Kurtosis: {
            const Array y2 = y.square();
            const double m2 = y2.mean();
            const Matrix Wy2X = X.array().colwise() * y2;
            const Matrix M2xx = X.transpose() * Wy2X / n;
            const Matrix S0 = X.transpose() * X / n;
            const Vector s0u = X.transpose() * y.matrix() / n;
            H = 12.0 * M2xx - 24.0 * (s0u * s0u.transpose()) - 12.0 * m2 * S0;
            break;
        }
        case ContrastKind::CHF: {
            const Array cy = y.cos();
            const Array sy = y.sin();
            const double c = cy.mean();
            const double s = sy.mean();
            const double modulus = c * c + s * s;
            if (modulus < guards.chf_modulus_floor)
                throw DegenerateDirectionError("chf: empirical CF modulus below floor");
            const Vector grad_c = -(X.transpose() * sy.matrix()) / n;
            const Vector grad_s = (X.transpose() * cy.matrix()) / n;
            const Matrix hess_c = -(X.transpose() * (X.array().colwise() * cy).matrix()) / n;
            const Matrix hess_s = -(X.transpose() * (X.array().colwise() * sy).matrix()) / n;
            const Vector d = 2.0 * (c * grad_c + s * grad_s);
            H = 2.0 * (grad_c * grad_c.transpose() + c * hess_c + grad_s * grad_s.transpose() + s * hess_s) / modulus
                - (d * d.transpose()) / (modulus * modulus) + 2.0 * data.covariance();
            break;
        }
        case ContrastKind::CGF: {
            if (!y.allFinite()) throw CgfOverflowError("cgf: projection overflow");
            const Array w = cgf_tilt_weights(y, guards.cgf_clip);
            const Vector tilted_mean = X.transpose() * w.matrix();
            const Matrix tilted_second = X.transpose() * (X.array().colwise() * w).matrix();
            H = tilted_second - tilted_mean * tilted_mean.transpose() - data.covariance();
            break;
        }
        default:
            throw InvalidInputError("unknown contrast kind");
    }
    return ((H + H.transpose()) * 0.5).eval();
}

QuasiOrthMatrix quasi_orth_matrix(ContrastKind kind, const Dataset& data, int num_probes, Rng& rng,
                                  const ContrastGuards& guards, double pinv_cutoff) {
    if (num_probes < 1) throw InvalidInputError("quasi_orth_matrix: num_probes must be at least 1");
    const Index k = data.k();
    QuasiOrthMatrix out;
    out.kind = kind;
    Matrix sum = Matrix::Zero(k, k);
    int used = 0;
    for (int p = 0; p < num_probes; ++p) {
        const Vector probe = rng.unit_vector(k);
        try {
            sum += hessian_contrast(kind, probe, data, guards);
            out.probes.push_back(probe);
            ++used;
        } catch (const DegenerateDirectionError&) {
        } catch (const CgfOverflowError&) {
        }
    }
    if (used == 0) throw EstimationFailureError("quasi_orth_matrix: all probes degenerate");
    Matrix C = sum / static_cast<double>(used);
    out.C = ((C + C.transpose()) * 0.5).eval();
    out.C_dag = pseudo_inverse(out.C, pinv_cutoff);
    return out;
}

QuasiOrthMatrix quasi_orth_from_matrix(ContrastKind kind, Matrix C, double pinv_cutoff) {
    if (!C.allFinite() || C.rows() != C.cols()) throw InvalidInputError("quasi_orth_from_matrix: bad C");
    QuasiOrthMatrix out;
    out.kind = kind;
    out.C = ((C + C.transpose()) * 0.5).eval();
    out.C_dag = pseudo_inverse(out.C, pinv_cutoff);
    return out;
}

} // namespace noisyica
