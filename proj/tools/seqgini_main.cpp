// seqgini: sequential minimum-risk point estimation of the Gini index.
//
// Subcommands:
//   simulate  run a seeded Monte Carlo replication study of the stopping rule
//   estimate  run the sequential procedure over a real income file
//   params    print exact population parameters for a distribution
//   tables    reproduce the full study-design tables into an output directory
//
// Exit codes: 0 success, 2 validation failure, 3 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqgini/seqgini.hpp"

namespace {

using nlohmann::json;
using namespace seqgini;

constexpr std::uint64_t default_seed = 1;

std::uint64_t seed_from_environment() {
    const char* env = std::getenv("SEQGINI_SEED");
    if (env == nullptr) return default_seed;
    try {
        return static_cast<std::uint64_t>(std::stoull(env));
    } catch (const std::exception&) {
        throw config_error("SEQGINI_SEED must be a non-negative integer");
    }
}

// Applies values from an optional JSON config file to options the user did
// not pass on the command line. Flags always win over the file.
class config_overlay {
  public:
    config_overlay(CLI::App* cmd, const std::string& config_path) : cmd_(cmd) {
        if (config_path.empty()) return;
        std::ifstream in(config_path);
        if (!in) throw config_error("cannot open config file '" + config_path + "'");
        try {
            in >> data_;
        } catch (const json::exception& e) {
            throw config_error("config file '" + config_path + "' is not valid JSON: " +
                               e.what());
        }
    }

    template <typename T>
    void merge(const std::string& flag, const std::string& key, T& var) const {
        if (cmd_->count(flag) > 0 || !data_.contains(key)) return;
        try {
            var = data_.at(key).get<T>();
        } catch (const json::exception&) {
            throw config_error("config key '" + key + "' has the wrong type");
        }
    }

    bool has(const std::string& key) const { return data_.contains(key); }

  private:
    CLI::App* cmd_;
    json data_ = json::object();
};

struct DistOptions {
    std::string dist;
    std::vector<std::string> params;
};

PopulationModel make_model(const DistOptions& opts) {
    if (opts.dist.empty()) throw config_error("--dist is required");
    PopulationModel model;
    model.family = opts.dist;
    for (const std::string& kv : opts.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size()) {
            throw config_error("--param expects key=value, got '" + kv + "'");
        }
        const std::string key = kv.substr(0, eq);
        model.params[key] = io::parse_double(kv.substr(eq + 1), "--param " + key);
    }
    return model;
}

void require_format(const std::string& format) {
    if (format != "csv" && format != "json") {
        throw config_error("--format must be csv or json, got '" + format + "'");
    }
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
    DistOptions dist;
    double A = 50000.0;
    double c = 0.1;
    std::size_t m = 10;
    std::size_t reps = 5000;
    std::uint64_t seed = default_seed;
    std::string rule = "plain";
    double gamma = 0.25;
    std::size_t cap = 1000000;
    unsigned workers = 0;
    std::string out;
    std::string format = "csv";
    std::string config_path;
};

int run_simulate(const SimulateOptions& opts) {
    require_format(opts.format);
    if (opts.out.empty()) throw config_error("--out is required");

    StudyConfig config;
    config.A = opts.A;
    config.c = opts.c;
    config.m = opts.m;
    config.rule = stopping_rule_from_string(opts.rule);
    config.gamma = opts.gamma;
    config.seed = opts.seed;
    config.cap = opts.cap;

    const PopulationModel model = make_model(opts.dist);
    const mc::ReplicationSummary summary = mc::run_study(model, config, opts.reps, opts.workers);

    if (opts.format == "csv") {
        io::write_text_file(opts.out, io::summary_to_csv(summary));
    } else {
        io::write_text_file(opts.out, io::summary_to_json(summary).dump(2) + "\n");
    }
    std::printf("N_bar=%.4f (se %.4f)  n_c=%.4f  ratio_regret=%.4f  -> %s\n", summary.n_bar,
                summary.se_n, summary.risk_report.n_c, summary.risk_report.ratio_regret,
                opts.out.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

struct EstimateOptions {
    std::string input;
    double A = 50000.0;
    double c = 0.1;
    std::size_t m = 10;
    std::string rule = "plain";
    double gamma = 0.25;
    std::size_t cap = 1000000;
    std::string format = "csv";
    std::string config_path;
};

int run_estimate(const EstimateOptions& opts) {
    require_format(opts.format);
    if (opts.input.empty()) throw config_error("--input is required");

    StudyConfig config;
    config.A = opts.A;
    config.c = opts.c;
    config.m = opts.m;
    config.rule = stopping_rule_from_string(opts.rule);
    config.gamma = opts.gamma;
    config.cap = opts.cap;
    config.record_trajectory = true;
    config.validate();

    const Sample sample = io::read_income_file(opts.input);
    sample_source source(sample);
    const StoppingResult result = run_sequential(source, config);
    if (result.stopped_by_cap) {
        throw replication_error(0, "safety cap of " + std::to_string(config.cap) +
                                       " observations reached before stopping");
    }

    const double total_cost = config.c * static_cast<double>(result.n_final);
    if (opts.format == "csv") {
        std::printf("n_final,gini,v2,threshold_evaluations,total_cost\n");
        std::printf("%zu,%s,%s,%zu,%s\n", result.n_final,
                    io::format_double(result.gini_final).c_str(),
                    io::format_double(result.v2_final).c_str(), result.trajectory.size(),
                    io::format_double(total_cost).c_str());
    } else {
        json j;
        j["n_final"] = result.n_final;
        j["gini"] = result.gini_final;
        j["v2"] = result.v2_final;
        j["threshold_evaluations"] = result.trajectory.size();
        j["total_cost"] = total_cost;
        std::printf("%s\n", j.dump(2).c_str());
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ParamsOptions {
    DistOptions dist;
    double A = 0.0;
    double c = 0.0;
    bool have_A = false;
    bool have_c = false;
    std::string format = "csv";
    std::string config_path;
};

int run_params(const ParamsOptions& opts) {
    require_format(opts.format);
    const PopulationModel model = make_model(opts.dist);
    const PopulationParams params = population_params(model);

    auto fields = io::params_fields(params);
    if (opts.have_A != opts.have_c) {
        throw config_error("--A and --c must be given together");
    }
    if (opts.have_A && opts.have_c) {
        if (!(opts.A > 0.0) || !(opts.c > 0.0)) throw config_error("A and c must be positive");
        const double n_c = risk::optimal_n(params.xi2, opts.A, opts.c);
        fields.emplace_back("n_c", n_c);
        fields.emplace_back("min_risk", 2.0 * opts.c * n_c);
    }

    if (opts.format == "csv") {
        std::string header;
        std::string row;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) {
                header += ',';
                row += ',';
            }
            header += fields[i].first;
            row += io::format_double(fields[i].second);
        }
        std::printf("%s\n%s\n", header.c_str(), row.c_str());
    } else {
        json j = json::object();
        for (const auto& [key, value] : fields) j[key] = value;
        std::printf("%s\n", j.dump(2).c_str());
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct TablesOptions {
    std::uint64_t seed = default_seed;
    std::string out_dir;
    std::size_t reps = 5000;
    std::size_t batches = 10;
    std::size_t batch_reps = 500;
    unsigned workers = 0;
    bool emit_raw = false;
    std::string config_path;
};

int run_tables(const TablesOptions& opts) {
    if (opts.out_dir.empty()) throw config_error("--out-dir is required");
    std::filesystem::create_directories(opts.out_dir);

    StudyConfig config;  // the fixed study design behind the published tables
    config.A = 50000.0;
    config.c = 0.1;
    config.m = 10;
    config.rule = StoppingRule::plain;

    std::vector<io::TableStudy> studies;
    studies.push_back({"exponential", {"exponential", {{"rate", 5.0}}}, {}});
    studies.push_back({"gamma", {"gamma", {{"shape", 2.649}, {"rate", 0.84}}}, {}});
    studies.push_back({"lognormal", {"lognormal", {{"meanlog", 2.185}, {"sdlog", 0.562}}}, {}});

    for (std::size_t d = 0; d < studies.size(); ++d) {
        io::TableStudy& st = studies[d];
        StudyConfig per_dist = config;
        per_dist.seed = derive_seed(opts.seed, {seed_domain::tables, d});
        st.summary = mc::run_study(st.model, per_dist, opts.reps, opts.workers);
        st.summary.second_order = mc::run_second_order_batches(st.model, per_dist,
                                                               opts.batch_reps, opts.batches,
                                                               opts.workers);
        std::printf("%-12s N_bar=%.4f n_c=%.4f ratio_regret=%.4f\n", st.name.c_str(),
                    st.summary.n_bar, st.summary.risk_report.n_c,
                    st.summary.risk_report.ratio_regret);
    }

    const auto path = [&](const char* name) {
        return (std::filesystem::path(opts.out_dir) / name).string();
    };
    io::write_text_file(path("table1.csv"), io::table1_csv(studies));
    io::write_text_file(path("table2.csv"), io::table2_csv(studies));
    io::write_text_file(path("table3.csv"), io::batch_table_csv(studies, false));
    io::write_text_file(path("table4.csv"), io::batch_table_csv(studies, true));
    if (opts.emit_raw) {
        io::write_text_file(path("raw.csv"), io::raw_replications_csv(studies));
    }

    json manifest;
    manifest["seed"] = opts.seed;
    manifest["reps"] = opts.reps;
    manifest["batches"] = opts.batches;
    manifest["batch_reps"] = opts.batch_reps;
    manifest["config"] = {{"A", config.A},
                          {"c", config.c},
                          {"m", config.m},
                          {"rule", to_string(config.rule)},
                          {"gamma", config.gamma},
                          {"cap", config.cap}};
    manifest["distributions"] = json::array();
    for (const io::TableStudy& st : studies) {
        json d;
        d["name"] = st.name;
        d["family"] = st.model.family;
        d["params"] = st.model.params;
        manifest["distributions"].push_back(d);
    }
    manifest["tolerances"] = {{"quadrature_abs_tol", quadrature_abs_tol},
                              {"published_value_relative_tol", 0.005}};
    io::write_text_file(path("manifest.json"), manifest.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------

void add_dist_options(CLI::App* cmd, DistOptions& opts) {
    cmd->add_option("--dist", opts.dist, "distribution family (exponential|gamma|lognormal)");
    cmd->add_option("--param", opts.params, "distribution parameter key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential minimum-risk point estimation of the Gini index"};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "run a replication study");
    add_dist_options(sim_cmd, sim.dist);
    sim_cmd->add_option("--A", sim.A, "weight per unit squared estimation error");
    sim_cmd->add_option("--c", sim.c, "cost per observation");
    sim_cmd->add_option("--m", sim.m, "pilot sample size");
    sim_cmd->add_option("--reps", sim.reps, "number of replications");
    sim_cmd->add_option("--seed", sim.seed, "base seed");
    sim_cmd->add_option("--rule", sim.rule, "stopping rule (plain|guarded)");
    sim_cmd->add_option("--gamma", sim.gamma, "guard exponent in (0,0.5)");
    sim_cmd->add_option("--cap", sim.cap, "safety bound on the sample size");
    sim_cmd->add_option("--workers", sim.workers, "worker threads (0 = auto)");
    sim_cmd->add_option("--out", sim.out, "output file path");
    sim_cmd->add_option("--format", sim.format, "output format (csv|json)");
    sim_cmd->add_option("--config", sim.config_path, "JSON config file (flags override)");

    EstimateOptions est;
    CLI::App* est_cmd = app.add_subcommand("estimate", "sequential estimate from an income file");
    est_cmd->add_option("--input", est.input, "income CSV (header 'income')");
    est_cmd->add_option("--A", est.A, "weight per unit squared estimation error");
    est_cmd->add_option("--c", est.c, "cost per observation");
    est_cmd->add_option("--m", est.m, "pilot sample size");
    est_cmd->add_option("--rule", est.rule, "stopping rule (plain|guarded)");
    est_cmd->add_option("--gamma", est.gamma, "guard exponent in (0,0.5)");
    est_cmd->add_option("--cap", est.cap, "safety bound on the sample size");
    est_cmd->add_option("--format", est.format, "output format (csv|json)");
    est_cmd->add_option("--config", est.config_path, "JSON config file (flags override)");

    ParamsOptions par;
    CLI::App* par_cmd = app.add_subcommand("params", "print exact population parameters");
    add_dist_options(par_cmd, par.dist);
    CLI::Option* par_A = par_cmd->add_option("--A", par.A, "also print n_c and min risk");
    CLI::Option* par_c = par_cmd->add_option("--c", par.c, "cost per observation");
    par_cmd->add_option("--format", par.format, "output format (csv|json)");
    par_cmd->add_option("--config", par.config_path, "JSON config file (flags override)");

    TablesOptions tab;
    CLI::App* tab_cmd = app.add_subcommand("tables", "reproduce the study tables");
    tab_cmd->add_option("--seed", tab.seed, "base seed");
    tab_cmd->add_option("--out-dir", tab.out_dir, "output directory");
    tab_cmd->add_option("--reps", tab.reps, "replications per study");
    tab_cmd->add_option("--batches", tab.batches, "second-order batches");
    tab_cmd->add_option("--batch-reps", tab.batch_reps, "replications per batch");
    tab_cmd->add_option("--workers", tab.workers, "worker threads (0 = auto)");
    tab_cmd->add_flag("--emit-raw", tab.emit_raw, "also write per-replication raw.csv");
    tab_cmd->add_option("--config", tab.config_path, "JSON config file (flags override)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim_cmd->parsed()) {
            config_overlay overlay(sim_cmd, sim.config_path);
            overlay.merge("--dist", "dist", sim.dist.dist);
            overlay.merge("--param", "param", sim.dist.params);
            overlay.merge("--A", "A", sim.A);
            overlay.merge("--c", "c", sim.c);
            overlay.merge("--m", "m", sim.m);
            overlay.merge("--reps", "reps", sim.reps);
            overlay.merge("--rule", "rule", sim.rule);
            overlay.merge("--gamma", "gamma", sim.gamma);
            overlay.merge("--cap", "cap", sim.cap);
            overlay.merge("--workers", "workers", sim.workers);
            overlay.merge("--out", "out", sim.out);
            overlay.merge("--format", "format", sim.format);
            if (sim_cmd->count("--seed") == 0) {
                if (overlay.has("seed")) {
                    overlay.merge("--seed", "seed", sim.seed);
                } else {
                    sim.seed = seed_from_environment();
                }
            }
            return run_simulate(sim);
        }
        if (est_cmd->parsed()) {
            config_overlay overlay(est_cmd, est.config_path);
            overlay.merge("--input", "input", est.input);
            overlay.merge("--A", "A", est.A);
            overlay.merge("--c", "c", est.c);
            overlay.merge("--m", "m", est.m);
            overlay.merge("--rule", "rule", est.rule);
            overlay.merge("--gamma", "gamma", est.gamma);
            overlay.merge("--cap", "cap", est.cap);
            overlay.merge("--format", "format", est.format);
            return run_estimate(est);
        }
        if (par_cmd->parsed()) {
            config_overlay overlay(par_cmd, par.config_path);
            overlay.merge("--dist", "dist", par.dist.dist);
            overlay.merge("--param", "param", par.dist.params);
            overlay.merge("--A", "A", par.A);
            overlay.merge("--c", "c", par.c);
            overlay.merge("--format", "format", par.format);
            par.have_A = par_A->count() > 0 || overlay.has("A");
            par.have_c = par_c->count() > 0 || overlay.has("c");
            return run_params(par);
        }
        if (tab_cmd->parsed()) {
            config_overlay overlay(tab_cmd, tab.config_path);
            overlay.merge("--out-dir", "out_dir", tab.out_dir);
            overlay.merge("--reps", "reps", tab.reps);
            overlay.merge("--batches", "batches", tab.batches);
            overlay.merge("--batch-reps", "batch_reps", tab.batch_reps);
            overlay.merge("--workers", "workers", tab.workers);
            overlay.merge("--emit-raw", "emit_raw", tab.emit_raw);
            if (tab_cmd->count("--seed") == 0) {
                if (overlay.has("seed")) {
                    overlay.merge("--seed", "seed", tab.seed);
                } else {
                    tab.seed = seed_from_environment();
                }
            }
            return run_tables(tab);
        }
    } catch (const insufficient_data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const replication_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const quadrature_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const rejected_observation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const insufficient_sample_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const insufficient_replications_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
