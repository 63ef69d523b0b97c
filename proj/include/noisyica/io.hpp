#ifndef NOISYICA_IO_HPP
#define NOISYICA_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "noisyica/extract.hpp"
#include "noisyica/meta.hpp"
#include "noisyica/score.hpp"
#include "noisyica/synth.hpp"

namespace noisyica {

using Json = nlohmann::json;

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_g17(double value);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Dataset CSV: header x1..xk, one observation per row, 17 significant digits.
std::string dataset_to_csv(const Dataset& data);
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

/// Headerless comma-separated matrix, row-major.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const Matrix& M, const std::string& path);

/// Model specification file: keys k, rho, seed, sources (list of
/// {kind, params}), optional n.
struct ModelConfig {
    Index k = 0;
    double rho = 0.0;
    std::uint64_t seed = 0;
    Index n = 0; // optional sample count used by `gen`
    std::vector<SourceSpec> sources;
};

Json source_to_json(const SourceSpec& spec);
SourceSpec source_from_json(const Json& j);
Json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const Json& j);
ModelConfig load_model_config(const std::string& path);
MixingModel realize_model(const ModelConfig& cfg);

Json score_report_to_json(const ScoreReport& report);
ScoreReport score_report_from_json(const Json& j);

Json matrix_to_json(const Matrix& M);
Json demix_result_to_json(const DemixResult& result);
Json meta_result_to_json(const MetaResult& result);

} // namespace noisyica

#endif // NOISYICA_IO_HPP
