#include "noisyica/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <mutex>
#include <thread>

#include "noisyica/metrics.hpp"

namespace noisyica {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(master ^ splitmix64(a)) ^ b);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

// Work-pool over run indices; results land in caller-owned slots, so the
// aggregation order never depends on scheduling.
template <typename Body>
void parallel_runs(int count, Body&& body) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t run_base_seed(const ExperimentConfig& cfg, int run) {
    if (!cfg.seeds.empty()) return cfg.seeds[static_cast<std::size_t>(run)];
    return derive_seed(cfg.seed, 0x52u, static_cast<std::uint64_t>(run));
}

int run_count(const ExperimentConfig& cfg) {
    return cfg.seeds.empty() ? cfg.runs : static_cast<int>(cfg.seeds.size());
}

std::vector<SourceSpec> planned_sources(const ExperimentConfig& cfg) {
    if (cfg.source_plan == "nine_source") return nine_source_plan();
    if (!cfg.source_plan.empty()) throw ConfigError("unknown source_plan: " + cfg.source_plan);
    if (!cfg.sources.empty()) return cfg.sources;
    return nine_source_plan();
}

// Outcome of one dataset draw: per-candidate Amari errors and score means,
// plus the (corrected / uncorrected) argmin picks.
struct RunOutcome {
    std::vector<double> amari;
    std::vector<double> corrected;
    std::vector<double> uncorrected;
    int meta_pick = -1;
    int unc_pick = -1;
};

RunOutcome evaluate_run(const MixingModel& model, Index n, std::uint64_t run_seed,
                        const std::vector<Candidate>& candidates, const ExperimentConfig& cfg) {
    Rng data_rng(derive_seed(run_seed, 0xDA7Au));
    const Dataset data = generate_dataset(model, n, data_rng);
    const std::uint64_t probe_seed = derive_seed(run_seed, 0x9120u);

    RunOutcome out;
    const std::size_t m = candidates.size();
    out.amari.assign(m, kInf);
    out.corrected.assign(m, kInf);
    out.uncorrected.assign(m, kInf);
    for (std::size_t j = 0; j < m; ++j) {
        Rng cand_rng(derive_seed(run_seed, 0xCA4Du, j));
        try {
            const DemixResult demix = candidates[j].runner(data, cand_rng);
            const auto [corr, unc] = mc_score_both(demix.B_hat_inv, data, cfg.probes, probe_seed);
            out.corrected[j] = corr.mean;
            out.uncorrected[j] = unc.mean;
            out.amari[j] = amari_error(demix.B_hat, model.B);
        } catch (const Error&) {
            // candidate failed on this draw; kept at infinity
        }
    }
    auto argmin = [](const std::vector<double>& v) {
        int best = -1;
        double best_val = kInf;
        for (std::size_t j = 0; j < v.size(); ++j)
            if (v[j] < best_val) {
                best_val = v[j];
                best = static_cast<int>(j);
            }
        return best;
    };
    out.meta_pick = argmin(out.corrected);
    out.unc_pick = argmin(out.uncorrected);
    return out;
}

std::string csv_header(const char* experiment) {
    return std::string("# noisy-ica-kit v") + NOISYICA_VERSION + " " + experiment + "\n";
}

void require_kind(const ExperimentConfig& cfg, ExperimentKind kind) {
    if (cfg.experiment != kind)
        throw ConfigError(std::string("config experiment must be ") + to_string(kind));
}

void append_row(std::string& csv, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& cell : cells) {
        if (!first) csv += ',';
        csv += cell;
        first = false;
    }
    csv += '\n';
}

// Per-algorithm Amari and score aggregates for one experiment cell. Rows
// cover every candidate plus the Meta and Unc-Meta selections.
struct CellAggregate {
    std::vector<std::string> names;
    std::vector<std::vector<double>> amari;
    std::vector<std::vector<double>> score;
};

CellAggregate aggregate_cell(const std::vector<RunOutcome>& outcomes,
                             const std::vector<Candidate>& candidates) {
    CellAggregate agg;
    const std::size_t m = candidates.size();
    for (const auto& cand : candidates) agg.names.push_back(cand.name);
    agg.names.push_back("Meta");
    agg.names.push_back("Unc-Meta");
    agg.amari.assign(m + 2, {});
    agg.score.assign(m + 2, {});
    for (const auto& run : outcomes) {
        for (std::size_t j = 0; j < m; ++j) {
            agg.amari[j].push_back(run.amari[j]);
            agg.score[j].push_back(run.corrected[j]);
        }
        if (run.meta_pick >= 0) {
            agg.amari[m].push_back(run.amari[static_cast<std::size_t>(run.meta_pick)]);
            agg.score[m].push_back(run.corrected[static_cast<std::size_t>(run.meta_pick)]);
        } else {
            agg.amari[m].push_back(kInf);
            agg.score[m].push_back(kInf);
        }
        if (run.unc_pick >= 0) {
            agg.amari[m + 1].push_back(run.amari[static_cast<std::size_t>(run.unc_pick)]);
            agg.score[m + 1].push_back(run.uncorrected[static_cast<std::size_t>(run.unc_pick)]);
        } else {
            agg.amari[m + 1].push_back(kInf);
            agg.score[m + 1].push_back(kInf);
        }
    }
    return agg;
}

} // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::TableKurtosis: return "table_kurtosis";
        case ExperimentKind::SweepNoise: return "sweep_noise";
        case ExperimentKind::SweepN: return "sweep_n";
        case ExperimentKind::HistogramRestarts: return "histogram_restarts";
        case ExperimentKind::InterpolationScore: return "interpolation_score";
        case ExperimentKind::Landscape: return "landscape";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    if (name == "table_kurtosis") return ExperimentKind::TableKurtosis;
    if (name == "sweep_noise") return ExperimentKind::SweepNoise;
    if (name == "sweep_n") return ExperimentKind::SweepN;
    if (name == "histogram_restarts") return ExperimentKind::HistogramRestarts;
    if (name == "interpolation_score") return ExperimentKind::InterpolationScore;
    if (name == "landscape") return ExperimentKind::Landscape;
    throw ConfigError("unknown experiment: " + name);
}

ExperimentConfig experiment_config_from_json(const Json& j) {
    ExperimentConfig cfg;
    try {
        cfg.experiment = parse_experiment_kind(j.at("experiment").get<std::string>());
        cfg.k = j.value("k", cfg.k);
        cfg.n = j.value("n", cfg.n);
        cfg.rho = j.value("rho", cfg.rho);
        cfg.runs = j.value("runs", cfg.runs);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        cfg.probes = j.value("probes", cfg.probes);
        if (j.contains("candidates")) cfg.candidates = j.at("candidates").get<std::vector<std::string>>();
        if (j.contains("external_candidates"))
            for (const auto& e : j.at("external_candidates"))
                cfg.external_candidates.emplace_back(e.at("name").get<std::string>(),
                                                     e.at("path").get<std::string>());
        cfg.source_plan = j.value("source_plan", cfg.source_plan);
        if (j.contains("sources"))
            for (const auto& s : j.at("sources")) cfg.sources.push_back(source_from_json(s));
        if (j.contains("p_list")) cfg.p_list = j.at("p_list").get<std::vector<double>>();
        if (j.contains("sweep_values")) cfg.sweep_values = j.at("sweep_values").get<std::vector<double>>();
        if (j.contains("epsilon_grid")) cfg.epsilon_grid = j.at("epsilon_grid").get<std::vector<double>>();
        cfg.resolution = j.value("resolution", cfg.resolution);
        cfg.origin_exclusion = j.value("origin_exclusion", cfg.origin_exclusion);
        if (j.contains("kind")) cfg.kind = parse_contrast_kind(j.at("kind").get<std::string>());
        cfg.inits = j.value("inits", cfg.inits);
        cfg.extract.restarts = j.value("restarts", cfg.extract.restarts);
        cfg.extract.tol = j.value("tol", cfg.extract.tol);
        cfg.extract.max_iter = j.value("max_iter", cfg.extract.max_iter);
        cfg.out_path = j.value("out", cfg.out_path);
    } catch (const Json::exception& err) {
        throw ConfigError(std::string("experiment config: ") + err.what());
    }
    if (cfg.runs < 1) throw ConfigError("experiment config: runs must be at least 1");
    if (cfg.probes < 1) throw ConfigError("experiment config: probes must be at least 1");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const Json::exception& err) {
        throw ConfigError(path + ": " + err.what());
    }
    return experiment_config_from_json(j);
}

void apply_full_scale(ExperimentConfig& cfg) {
    cfg.runs = 100;
    cfg.n = 100000;
    cfg.seeds.clear();
}

std::vector<Candidate> resolve_candidates(const ExperimentConfig& cfg) {
    std::vector<Candidate> pool = builtin_registry(cfg.extract);
    for (const auto& [name, path] : cfg.external_candidates) pool.push_back(file_candidate(name, path));
    if (cfg.candidates.empty()) return pool;
    std::vector<Candidate> chosen;
    for (const auto& name : cfg.candidates) {
        const auto it = std::find_if(pool.begin(), pool.end(),
                                     [&](const Candidate& c) { return c.name == name; });
        if (it == pool.end()) throw ConfigError("unresolvable candidate: " + name);
        chosen.push_back(*it);
    }
    return chosen;
}

std::string run_table_experiment(const ExperimentConfig& cfg) {
    require_kind(cfg, ExperimentKind::TableKurtosis);
    const std::vector<Candidate> candidates = resolve_candidates(cfg);
    if (cfg.p_list.empty()) throw ConfigError("table_kurtosis: p_list is required");

    std::string csv = csv_header("table_kurtosis");
    csv += "p,scaled_kurtosis,algorithm,median_amari,mean_amari,stddev_amari\n";
    const int runs = run_count(cfg);
    const std::uint64_t model_seed = derive_seed(cfg.seed, 0xB0DE1u);
    for (std::size_t pi = 0; pi < cfg.p_list.size(); ++pi) {
        const double p = cfg.p_list[pi];
        std::vector<SourceSpec> sources(static_cast<std::size_t>(cfg.k), SourceSpec::bernoulli(p));
        const MixingModel model = make_model(cfg.k, cfg.rho, sources, model_seed);
        std::vector<RunOutcome> outcomes(static_cast<std::size_t>(runs));
        parallel_runs(runs, [&](int r) {
            const std::uint64_t run_seed = derive_seed(run_base_seed(cfg, r), 0xCE11u, pi);
            outcomes[static_cast<std::size_t>(r)] = evaluate_run(model, cfg.n, run_seed, candidates, cfg);
        });
        const CellAggregate agg = aggregate_cell(outcomes, candidates);
        for (std::size_t a = 0; a < agg.names.size(); ++a)
            append_row(csv, {format_g17(p), format_g17(scaled_kurtosis_bernoulli(p)), agg.names[a],
                             format_g17(median_of(agg.amari[a])), format_g17(mean_of(agg.amari[a])),
                             format_g17(stddev_of(agg.amari[a]))});
    }
    return csv;
}

std::string run_sweep(const ExperimentConfig& cfg) {
    if (cfg.experiment != ExperimentKind::SweepNoise && cfg.experiment != ExperimentKind::SweepN)
        throw ConfigError("config experiment must be sweep_noise or sweep_n");
    const bool noise_sweep = cfg.experiment == ExperimentKind::SweepNoise;
    const std::vector<Candidate> candidates = resolve_candidates(cfg);
    const std::vector<SourceSpec> sources = planned_sources(cfg);
    const Index k = static_cast<Index>(sources.size());

    std::string csv = csv_header(noise_sweep ? "sweep_noise" : "sweep_n");
    csv += "sweep_value,algorithm,median_amari,mean_score\n";
    const int runs = run_count(cfg);
    const std::uint64_t model_seed = derive_seed(cfg.seed, 0xB0DE1u);
    for (std::size_t vi = 0; vi < cfg.sweep_values.size(); ++vi) {
        const double value = cfg.sweep_values[vi];
        const double rho = noise_sweep ? value : cfg.rho;
        const Index n = noise_sweep ? cfg.n : static_cast<Index>(value);
        if (!noise_sweep && n < 2) throw ConfigError("sweep_n: sample sizes must be at least 2");
        if (noise_sweep && rho < 0.0) throw ConfigError("sweep_noise: noise powers must be nonnegative");
        // same seed for every cell: B and the noise shape stay fixed
        const MixingModel model = make_model(k, rho, sources, model_seed);
        std::vector<RunOutcome> outcomes(static_cast<std::size_t>(runs));
        parallel_runs(runs, [&](int r) {
            const std::uint64_t run_seed = derive_seed(run_base_seed(cfg, r), 0x53EEu, vi);
            outcomes[static_cast<std::size_t>(r)] = evaluate_run(model, n, run_seed, candidates, cfg);
        });
        const CellAggregate agg = aggregate_cell(outcomes, candidates);
        for (std::size_t a = 0; a < agg.names.size(); ++a)
            append_row(csv, {format_g17(value), agg.names[a], format_g17(median_of(agg.amari[a])),
                             format_g17(mean_of(agg.score[a]))});
    }
    return csv;
}

std::string run_interpolation(const ExperimentConfig& cfg) {
    require_kind(cfg, ExperimentKind::InterpolationScore);
    if (cfg.epsilon_grid.empty()) throw ConfigError("interpolation_score: epsilon_grid is required");
    for (double eps : cfg.epsilon_grid)
        if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("interpolation_score: epsilon must lie in (0, 1]");
    const std::vector<SourceSpec> sources = planned_sources(cfg);
    const Index k = static_cast<Index>(sources.size());
    const MixingModel model = make_model(k, cfg.rho, sources, derive_seed(cfg.seed, 0xB0DE1u));
    const Matrix identity = Matrix::Identity(k, k);

    const int runs = run_count(cfg);
    const std::size_t grid = cfg.epsilon_grid.size();
    std::vector<std::vector<double>> score_by_eps(grid, std::vector<double>(static_cast<std::size_t>(runs)));
    parallel_runs(runs, [&](int r) {
        const std::uint64_t run_seed = derive_seed(run_base_seed(cfg, r), 0x17E4u);
        Rng data_rng(derive_seed(run_seed, 0xDA7Au));
        const Dataset data = generate_dataset(model, cfg.n, data_rng);
        const std::uint64_t probe_seed = derive_seed(run_seed, 0x9120u); // shared across the grid
        for (std::size_t e = 0; e < grid; ++e) {
            const double eps = cfg.epsilon_grid[e];
            const Matrix B_eps = eps * model.B + (1.0 - eps) * identity;
            const Matrix F = pseudo_inverse(B_eps).M_dag;
            score_by_eps[e][static_cast<std::size_t>(r)] =
                mc_score(F, data, cfg.probes, probe_seed, true).mean;
        }
    });

    std::string csv = csv_header("interpolation_score");
    csv += "epsilon,amari,score_mean,score_std\n";
    for (std::size_t e = 0; e < grid; ++e) {
        const double eps = cfg.epsilon_grid[e];
        const Matrix B_eps = eps * model.B + (1.0 - eps) * identity;
        append_row(csv, {format_g17(eps), format_g17(amari_error(B_eps, model.B)),
                         format_g17(mean_of(score_by_eps[e])), format_g17(stddev_of(score_by_eps[e]))});
    }
    return csv;
}

std::string landscape_grid(const ExperimentConfig& cfg) {
    require_kind(cfg, ExperimentKind::Landscape);
    if (cfg.k != 2) throw ConfigError("landscape: k must be 2");
    if (cfg.resolution < 8) throw ConfigError("landscape: resolution must be at least 8");
    std::vector<SourceSpec> sources = cfg.sources;
    if (sources.empty()) sources = {SourceSpec::uniform(), SourceSpec::uniform()};
    if (sources.size() != 2) throw ConfigError("landscape: exactly two sources required");

    // Mixing with orthogonal columns (B = U Lambda); rotating the data by
    // U^T puts the columns of B on the coordinate axes.
    Rng rng(derive_seed(cfg.seed, 0xB0DE1u));
    const Matrix U = random_orthonormal(2, rng);
    Vector lambda(2);
    for (Index i = 0; i < 2; ++i) lambda(i) = rng.uniform(1.0, 3.0);
    MixingModel model;
    model.B = U * lambda.asDiagonal();
    Matrix R(2, 2);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) R(i, j) = rng.normal();
    model.noise_factor = std::sqrt(cfg.rho / 2.0) * R;
    model.Sigma = model.noise_factor * model.noise_factor.transpose();
    model.rho = cfg.rho;
    model.sources = sources;
    model.seed = cfg.seed;

    Rng data_rng(derive_seed(cfg.seed, 0xDA7Au));
    const Dataset raw = generate_dataset(model, cfg.n, data_rng);
    const Dataset data(raw.samples() * U); // rows become (U^T x)^T
    const Vector lambda_inv = lambda.cwiseInverse();

    std::string csv = csv_header("landscape");
    csv += "x,y,contrast\n";
    const Index res = cfg.resolution;
    for (Index iy = 0; iy < res; ++iy) {
        for (Index ix = 0; ix < res; ++ix) {
            const double x = -1.0 + 2.0 * static_cast<double>(ix) / static_cast<double>(res - 1);
            const double y = -1.0 + 2.0 * static_cast<double>(iy) / static_cast<double>(res - 1);
            const double r = std::hypot(x, y);
            if (r < cfg.origin_exclusion) continue;
            Vector u(2);
            u << x / r, y / r;
            double value;
            try {
                value = eval_contrast(cfg.kind, lambda_inv.asDiagonal() * u, data, cfg.extract.guards);
            } catch (const Error&) {
                value = std::numeric_limits<double>::quiet_NaN();
            }
            append_row(csv, {format_g17(x), format_g17(y), format_g17(value)});
        }
    }
    return csv;
}

std::string run_histogram_restarts(const ExperimentConfig& cfg) {
    require_kind(cfg, ExperimentKind::HistogramRestarts);
    if (cfg.inits < 1) throw ConfigError("histogram_restarts: inits must be at least 1");
    const std::vector<SourceSpec> sources = planned_sources(cfg);
    const Index k = static_cast<Index>(sources.size());
    const MixingModel model = make_model(k, cfg.rho, sources, derive_seed(cfg.seed, 0xB0DE1u));

    const int runs = run_count(cfg);
    std::vector<double> single(static_cast<std::size_t>(runs));
    std::vector<double> best(static_cast<std::size_t>(runs));
    parallel_runs(runs, [&](int r) {
        const std::uint64_t run_seed = derive_seed(run_base_seed(cfg, r), 0x415Bu);
        Rng data_rng(derive_seed(run_seed, 0xDA7Au));
        const Dataset data = generate_dataset(model, cfg.n, data_rng);
        Rng c_rng(derive_seed(run_seed, 0xC0u));
        const QuasiOrthMatrix C = quasi_orth_matrix(cfg.kind, data, 1, c_rng, cfg.extract.guards);
        const std::uint64_t probe_seed = derive_seed(run_seed, 0x9120u);
        const DemixScorer scorer = [&](const DemixResult& d) {
            return mc_score(d.B_hat_inv, data, cfg.probes, probe_seed, true).mean;
        };
        Rng single_rng(derive_seed(run_seed, 0x51u));
        single[static_cast<std::size_t>(r)] =
            amari_error(extract_all(cfg.kind, data, C, single_rng, cfg.extract).B_hat, model.B);
        Rng multi_rng(derive_seed(run_seed, 0xB5u));
        best[static_cast<std::size_t>(r)] =
            amari_error(best_of_restarts(cfg.kind, data, C, cfg.inits, multi_rng, scorer, cfg.extract).B_hat,
                        model.B);
    });

    std::string csv = csv_header("histogram_restarts");
    csv += "run,amari_single,amari_best\n";
    for (int r = 0; r < runs; ++r)
        append_row(csv, {std::to_string(r), format_g17(single[static_cast<std::size_t>(r)]),
                         format_g17(best[static_cast<std::size_t>(r)])});
    return csv;
}

std::string run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
        case ExperimentKind::TableKurtosis: return run_table_experiment(cfg);
        case ExperimentKind::SweepNoise:
        case ExperimentKind::SweepN: return run_sweep(cfg);
        case ExperimentKind::HistogramRestarts: return run_histogram_restarts(cfg);
        case ExperimentKind::InterpolationScore: return run_interpolation(cfg);
        case ExperimentKind::Landscape: return landscape_grid(cfg);
    }
    throw ConfigError("unknown experiment kind");
}

} // namespace noisyica
