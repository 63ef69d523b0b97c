#include "noisyica/meta.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "noisyica/io.hpp"

namespace noisyica {

namespace {

MetaResult run_meta_impl(const std::vector<Candidate>& registry, const Dataset& data, int M,
                         Rng& rng, bool corrected) {
    if (registry.empty()) throw InvalidInputError("run_meta: registry is empty");
    if (M < 1) throw InvalidInputError("run_meta: M must be at least 1");
    std::set<std::string> names;
    for (const auto& cand : registry)
        if (!names.insert(cand.name).second)
            throw InvalidInputError("run_meta: duplicate candidate name " + cand.name);

    const std::uint64_t base = rng.next_u64();
    MetaResult result;
    result.probe_seed = splitmix64(base ^ 0x7ca1d05eull);

    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < registry.size(); ++j) {
        const Candidate& cand = registry[j];
        CandidateOutcome outcome;
        outcome.name = cand.name;
        Rng cand_rng(splitmix64(base ^ (0x9e3779b9ull * (j + 1))));
        try {
            outcome.demix = cand.runner(data, cand_rng);
            outcome.score = mc_score(outcome.demix.B_hat_inv, data, M, result.probe_seed, corrected);
        } catch (const Error& err) {
            outcome.failed = true;
            outcome.error = err.what();
            outcome.score.mean = std::numeric_limits<double>::infinity();
            outcome.score.corrected = corrected;
            outcome.score.probe_seed = result.probe_seed;
        }
        if (!outcome.failed && outcome.score.mean < best_score) {
            best_score = outcome.score.mean;
            result.winner = outcome.name;
        }
        result.per_candidate.push_back(std::move(outcome));
    }
    if (result.winner.empty()) throw MetaFailureError("run_meta: every candidate failed");
    return result;
}

} // namespace

MetaResult run_meta(const std::vector<Candidate>& registry, const Dataset& data, int M, Rng& rng) {
    return run_meta_impl(registry, data, M, rng, true);
}

MetaResult uncorrected_meta(const std::vector<Candidate>& registry, const Dataset& data, int M,
                            Rng& rng) {
    return run_meta_impl(registry, data, M, rng, false);
}

std::vector<Candidate> builtin_registry(const ExtractOptions& opts, int num_probes) {
    auto make = [opts, num_probes](ContrastKind kind) {
        return [kind, opts, num_probes](const Dataset& data, Rng& rng) {
            const QuasiOrthMatrix C = quasi_orth_matrix(kind, data, num_probes, rng, opts.guards);
            return extract_all(kind, data, C, rng, opts);
        };
    };
    return {
        {"PEGI-k4", make(ContrastKind::Kurtosis), ContrastKind::Kurtosis},
        {"CHF", make(ContrastKind::CHF), ContrastKind::CHF},
        {"CGF", make(ContrastKind::CGF), ContrastKind::CGF},
    };
}

DemixResult demix_from_matrix(const Matrix& demixer) {
    if (demixer.rows() != demixer.cols() || !demixer.allFinite())
        throw InvalidInputError("demix_from_matrix: demixer must be a finite square matrix");
    const Index k = demixer.rows();
    DemixResult result;
    result.B_hat_inv = demixer;
    result.B_hat = pseudo_inverse(demixer).M_dag;
    result.U = result.B_hat;
    result.V = result.B_hat_inv;
    for (Index j = 0; j < k; ++j) {
        const double nrm = result.U.col(j).norm();
        if (nrm > 0.0) {
            result.U.col(j) /= nrm;
            result.V.row(j) *= nrm;
        }
    }
    result.per_column.assign(static_cast<std::size_t>(k), ColumnDiagnostics{0, true, 0, 0.0});
    return result;
}

Candidate file_candidate(const std::string& name, const std::string& csv_path) {
    Matrix demixer;
    try {
        demixer = read_matrix_csv(csv_path);
    } catch (const Error& err) {
        throw ConfigError("candidate " + name + ": " + err.what());
    }
    if (demixer.rows() != demixer.cols())
        throw ConfigError("candidate " + name + ": demixing matrix must be square");
    return {name, [demixer](const Dataset& data, Rng&) {
                if (demixer.rows() != data.k())
                    throw InvalidInputError("file candidate: matrix does not match data dimension");
                return demix_from_matrix(demixer);
            },
            std::nullopt};
}

} // namespace noisyica
