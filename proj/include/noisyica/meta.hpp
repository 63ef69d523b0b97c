#ifndef NOISYICA_META_HPP
#define NOISYICA_META_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "noisyica/extract.hpp"
#include "noisyica/score.hpp"

namespace noisyica {

/// One entrant of the meta selection: a named algorithm producing a
/// demixing estimate from a dataset.
struct Candidate {
    std::string name;
    std::function<DemixResult(const Dataset&, Rng&)> runner;
    std::optional<ContrastKind> kind_tag;
};

struct CandidateOutcome {
    std::string name;
    ScoreReport score;
    std::optional<double> amari; // filled by the experiment harness when ground truth is known
    DemixResult demix;
    bool failed = false;
    std::string error;
};

struct MetaResult {
    std::string winner;
    std::vector<CandidateOutcome> per_candidate;
    std::uint64_t probe_seed = 0;
};

/// Runs every candidate, scores each B_j^{-1} with the corrected score over
/// a probe set shared across candidates, and returns the argmin. Ties break
/// by registry order; failing candidates are recorded with an infinite
/// score and excluded unless all fail.
MetaResult run_meta(const std::vector<Candidate>& registry, const Dataset& data, int M, Rng& rng);

/// Same selection with the uncorrected score.
MetaResult uncorrected_meta(const std::vector<Candidate>& registry, const Dataset& data, int M,
                            Rng& rng);

/// The built-in candidates: PEGI-k4 (kurtosis contrast with its own
/// probe-Hessian C), CHF and CGF.
std::vector<Candidate> builtin_registry(const ExtractOptions& opts = {}, int num_probes = 1);

/// External algorithm adapter: a k x k demixing matrix read from a CSV file
/// (comma-separated, row-major, no header).
Candidate file_candidate(const std::string& name, const std::string& csv_path);

/// Adapter used by file_candidate and available to tests: wraps a fixed
/// demixing matrix as a DemixResult.
DemixResult demix_from_matrix(const Matrix& demixer);

} // namespace noisyica

#endif // NOISYICA_META_HPP
