#include "noisyica/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace noisyica {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string dataset_to_csv(const Dataset& data) {
    std::string out;
    const Index k = data.k();
    for (Index j = 0; j < k; ++j) {
        out += "x" + std::to_string(j + 1);
        out += (j + 1 < k) ? ',' : '\n';
    }
    const Matrix& X = data.samples();
    for (Index i = 0; i < data.n(); ++i) {
        for (Index j = 0; j < k; ++j) {
            out += format_g17(X(i, j));
            out += (j + 1 < k) ? ',' : '\n';
        }
    }
    return out;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    write_text_file(path, dataset_to_csv(data));
}

namespace {

std::vector<std::vector<double>> parse_numeric_rows(const std::string& text, const std::string& origin,
                                                    bool skip_header) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error(origin + ": cannot parse value '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error(origin + ": ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(origin + ": no data rows");
    return rows;
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
    const Index n = static_cast<Index>(rows.size());
    const Index k = static_cast<Index>(rows.front().size());
    Matrix M(n, k);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < k; ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return M;
}

} // namespace

Dataset read_dataset_csv(const std::string& path) {
    const auto rows = parse_numeric_rows(read_text_file(path), path, /*skip_header=*/true);
    return Dataset(rows_to_matrix(rows));
}

Matrix read_matrix_csv(const std::string& path) {
    const auto rows = parse_numeric_rows(read_text_file(path), path, /*skip_header=*/false);
    return rows_to_matrix(rows);
}

void write_matrix_csv(const Matrix& M, const std::string& path) {
    std::string out;
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) {
            out += format_g17(M(i, j));
            out += (j + 1 < M.cols()) ? ',' : '\n';
        }
    write_text_file(path, out);
}

Json source_to_json(const SourceSpec& spec) {
    switch (spec.kind) {
        case SourceKind::BernoulliScaled: return {{"kind", "bernoulli"}, {"p", spec.param}};
        case SourceKind::Uniform: return {{"kind", "uniform"}};
        case SourceKind::Exponential: return {{"kind", "exponential"}, {"rate", spec.param}};
        case SourceKind::Laplace: return {{"kind", "laplace"}, {"scale", spec.param}};
        case SourceKind::StudentT: return {{"kind", "student_t"}, {"dof", spec.param}};
        case SourceKind::Gaussian: return {{"kind", "gaussian"}};
    }
    throw InvalidInputError("unknown source kind");
}

SourceSpec source_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "bernoulli") return SourceSpec::bernoulli(j.at("p").get<double>());
        if (kind == "uniform") return SourceSpec::uniform();
        if (kind == "exponential") return SourceSpec::exponential(j.at("rate").get<double>());
        if (kind == "laplace") return SourceSpec::laplace(j.at("scale").get<double>());
        if (kind == "student_t") return SourceSpec::student_t(j.at("dof").get<double>());
        if (kind == "gaussian") return SourceSpec::gaussian();
    } catch (const Json::exception& err) {
        throw ConfigError(std::string("source: ") + err.what());
    }
    throw ConfigError("unknown source kind: " + kind);
}

Json model_config_to_json(const ModelConfig& cfg) {
    Json sources = Json::array();
    for (const auto& s : cfg.sources) sources.push_back(source_to_json(s));
    Json j{{"k", cfg.k}, {"rho", cfg.rho}, {"seed", cfg.seed}, {"sources", sources}};
    if (cfg.n > 0) j["n"] = cfg.n;
    return j;
}

ModelConfig model_config_from_json(const Json& j) {
    ModelConfig cfg;
    try {
        cfg.k = j.at("k").get<Index>();
        cfg.rho = j.at("rho").get<double>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.n = j.value("n", Index{0});
        for (const auto& s : j.at("sources")) cfg.sources.push_back(source_from_json(s));
    } catch (const Json::exception& err) {
        throw ConfigError(std::string("model config: ") + err.what());
    }
    if (static_cast<Index>(cfg.sources.size()) != cfg.k)
        throw ConfigError("model config: sources list must have k entries");
    if (cfg.rho < 0.0) throw ConfigError("model config: rho must be nonnegative");
    return cfg;
}

ModelConfig load_model_config(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const Json::exception& err) {
        throw ConfigError(path + ": " + err.what());
    }
    return model_config_from_json(j);
}

MixingModel realize_model(const ModelConfig& cfg) {
    return make_model(cfg.k, cfg.rho, cfg.sources, cfg.seed);
}

Json score_report_to_json(const ScoreReport& report) {
    return {{"mean", report.mean},
            {"stddev", report.stddev},
            {"num_probes", report.num_probes},
            {"corrected", report.corrected},
            {"probe_seed", report.probe_seed}};
}

ScoreReport score_report_from_json(const Json& j) {
    ScoreReport report;
    report.mean = j.at("mean").get<double>();
    report.stddev = j.at("stddev").get<double>();
    report.num_probes = j.at("num_probes").get<int>();
    report.corrected = j.at("corrected").get<bool>();
    report.probe_seed = j.at("probe_seed").get<std::uint64_t>();
    return report;
}

Json matrix_to_json(const Matrix& M) {
    Json rows = Json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json demix_result_to_json(const DemixResult& result) {
    Json cols = Json::array();
    for (const auto& col : result.per_column)
        cols.push_back({{"iterations", col.iterations},
                        {"converged", col.converged},
                        {"restarts_used", col.restarts_used},
                        {"final_contrast", col.final_contrast}});
    return {{"B_hat", matrix_to_json(result.B_hat)},
            {"B_hat_inv", matrix_to_json(result.B_hat_inv)},
            {"U", matrix_to_json(result.U)},
            {"V", matrix_to_json(result.V)},
            {"per_column", cols}};
}

Json meta_result_to_json(const MetaResult& result) {
    Json entries = Json::array();
    for (const auto& outcome : result.per_candidate) {
        Json entry{{"name", outcome.name},
                   {"score", score_report_to_json(outcome.score)},
                   {"failed", outcome.failed}};
        if (outcome.failed) entry["error"] = outcome.error;
        if (outcome.amari) entry["amari"] = *outcome.amari;
        if (!outcome.failed) entry["demix"] = demix_result_to_json(outcome.demix);
        entries.push_back(std::move(entry));
    }
    return {{"winner", result.winner},
            {"probe_seed", result.probe_seed},
            {"per_candidate", entries}};
}

} // namespace noisyica
