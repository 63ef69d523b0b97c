#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "noisyica/experiments.hpp"
#include "noisyica/io.hpp"
#include "noisyica/metrics.hpp"

namespace {

using namespace noisyica;

std::pair<std::string, std::string> split_candidate_spec(const std::string& spec) {
    const auto pos = spec.find('=');
    if (pos == std::string::npos || pos == 0 || pos + 1 == spec.size())
        throw ConfigError("--candidate-file expects name=path.csv, got: " + spec);
    return {spec.substr(0, pos), spec.substr(pos + 1)};
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_text_file(out_path, content);
        std::cout << out_path << "\n";
    }
}

struct ExperimentCli {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int probes = 0;
    bool full = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file (JSON)")->required();
        cmd->add_option("--out", out_path, "output CSV path (default: config 'out')");
        cmd->add_option("--seed", seed, "override the config seed")->each([this](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--probes", probes, "override the probe count M");
        cmd->add_flag("--full", full, "paper-scale protocol (100 runs, n = 1e5)");
    }

    ExperimentConfig load(std::initializer_list<ExperimentKind> allowed) const {
        ExperimentConfig cfg = load_experiment_config(config_path);
        bool ok = false;
        for (const auto kind : allowed) ok = ok || cfg.experiment == kind;
        if (!ok) throw ConfigError("config experiment kind does not match this subcommand");
        if (seed_set) {
            cfg.seed = seed;
            cfg.seeds.clear();
        }
        if (probes > 0) cfg.probes = probes;
        ExperimentConfig out = cfg;
        if (full) apply_full_scale(out);
        return out;
    }

    void run(std::initializer_list<ExperimentKind> allowed) const {
        const ExperimentConfig cfg = load(allowed);
        const std::string csv = run_experiment(cfg);
        const std::string target = !out_path.empty() ? out_path : cfg.out_path;
        emit(csv, target);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"noisy-ica-kit: contrast-based noisy ICA with an independence-score meta selector"};
    app.set_version_flag("--version", std::string("noisy-ica-kit v") + NOISYICA_VERSION);
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV from a model config");
    std::string gen_config, gen_out;
    std::uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    Index gen_n = 0;
    gen->add_option("--config", gen_config, "model config (k, rho, seed, sources, optional n)")->required();
    gen->add_option("--out", gen_out, "output CSV path")->required();
    gen->add_option("--seed", gen_seed, "override the model seed")->each([&](const std::string&) {
        gen_seed_set = true;
    });
    gen->add_option("-n,--samples", gen_n, "override the sample count");

    // demix
    auto* demix = app.add_subcommand("demix", "run one contrast-based extraction on a dataset CSV");
    std::string demix_data, demix_kind = "chf", demix_out;
    std::uint64_t demix_seed = 1;
    int demix_restarts = 5, demix_qo_probes = 1;
    demix->add_option("--data", demix_data, "dataset CSV (as written by gen)")->required();
    demix->add_option("--kind", demix_kind, "contrast: kurtosis | chf | cgf");
    demix->add_option("--seed", demix_seed, "extraction seed");
    demix->add_option("--restarts", demix_restarts, "restarts per column");
    demix->add_option("--qo-probes", demix_qo_probes, "probes for the quasi-orthogonalization matrix");
    demix->add_option("--out", demix_out, "output JSON path (default: stdout)");

    // score
    auto* score = app.add_subcommand("score", "independence score of a demixing matrix on a dataset");
    std::string score_data, score_matrix, score_out;
    std::uint64_t score_seed = 1;
    int score_probes = 100;
    bool score_uncorrected = false;
    score->add_option("--data", score_data, "dataset CSV")->required();
    score->add_option("--matrix", score_matrix, "k x k demixing matrix CSV")->required();
    score->add_option("--probes", score_probes, "number of Monte-Carlo probes M");
    score->add_option("--seed", score_seed, "probe seed");
    score->add_flag("--uncorrected", score_uncorrected, "use the uncorrected score");
    score->add_option("--out", score_out, "output JSON path (default: stdout)");

    // meta
    auto* meta = app.add_subcommand("meta", "run all candidates and pick the best by score");
    std::string meta_data, meta_out;
    std::uint64_t meta_seed = 1;
    int meta_probes = 100;
    bool meta_uncorrected = false;
    std::vector<std::string> meta_files;
    meta->add_option("--data", meta_data, "dataset CSV")->required();
    meta->add_option("--probes", meta_probes, "number of Monte-Carlo probes M");
    meta->add_option("--seed", meta_seed, "meta seed");
    meta->add_flag("--uncorrected", meta_uncorrected, "select with the uncorrected score");
    meta->add_option("--candidate-file", meta_files,
                     "external candidate name=path.csv (k x k demixing matrix, row-major)");
    meta->add_option("--out", meta_out, "output JSON path (default: stdout)");

    // experiment subcommands
    ExperimentCli table_cli, sweep_cli, interp_cli, landscape_cli, hist_cli;
    auto* table = app.add_subcommand("table", "median Amari per algorithm over a Bernoulli(p) grid");
    table_cli.attach(table);
    auto* sweep = app.add_subcommand("sweep", "median Amari while sweeping noise power or sample size");
    sweep_cli.attach(sweep);
    auto* interp = app.add_subcommand("interp", "score vs Amari along B' = eps B + (1-eps) I");
    interp_cli.attach(interp);
    auto* landscape = app.add_subcommand("landscape", "contrast landscape on the k=2 unit circle");
    landscape_cli.attach(landscape);
    auto* hist = app.add_subcommand("hist", "single-init vs best-of-inits Amari histogram data");
    hist_cli.attach(hist);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            ModelConfig cfg = load_model_config(gen_config);
            if (gen_seed_set) cfg.seed = gen_seed;
            if (gen_n > 0) cfg.n = gen_n;
            if (cfg.n < 1) throw ConfigError("gen: sample count missing (config 'n' or -n)");
            const MixingModel model = realize_model(cfg);
            Rng rng(splitmix64(cfg.seed ^ 0xDA7Aull));
            write_dataset_csv(generate_dataset(model, cfg.n, rng), gen_out);
            std::cout << gen_out << "\n";
        } else if (demix->parsed()) {
            const Dataset data = read_dataset_csv(demix_data);
            const ContrastKind kind = parse_contrast_kind(demix_kind);
            Rng rng(demix_seed);
            ExtractOptions opts;
            opts.restarts = demix_restarts;
            const QuasiOrthMatrix C = quasi_orth_matrix(kind, data, demix_qo_probes, rng);
            const DemixResult result = extract_all(kind, data, C, rng, opts);
            emit(demix_result_to_json(result).dump(2) + "\n", demix_out);
        } else if (score->parsed()) {
            const Dataset data = read_dataset_csv(score_data);
            const Matrix F = read_matrix_csv(score_matrix);
            const ScoreReport report = mc_score(F, data, score_probes, score_seed, !score_uncorrected);
            emit(score_report_to_json(report).dump(2) + "\n", score_out);
        } else if (meta->parsed()) {
            const Dataset data = read_dataset_csv(meta_data);
            std::vector<Candidate> registry = builtin_registry();
            for (const auto& spec : meta_files) {
                const auto [name, path] = split_candidate_spec(spec);
                registry.push_back(file_candidate(name, path));
            }
            Rng rng(meta_seed);
            const MetaResult result = meta_uncorrected ? uncorrected_meta(registry, data, meta_probes, rng)
                                                       : run_meta(registry, data, meta_probes, rng);
            emit(meta_result_to_json(result).dump(2) + "\n", meta_out);
        } else if (table->parsed()) {
            table_cli.run({ExperimentKind::TableKurtosis});
        } else if (sweep->parsed()) {
            sweep_cli.run({ExperimentKind::SweepNoise, ExperimentKind::SweepN});
        } else if (interp->parsed()) {
            interp_cli.run({ExperimentKind::InterpolationScore});
        } else if (landscape->parsed()) {
            landscape_cli.run({ExperimentKind::Landscape});
        } else if (hist->parsed()) {
            hist_cli.run({ExperimentKind::HistogramRestarts});
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
