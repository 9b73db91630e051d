#include "tailcv/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tailcv/dependence.hpp"
#include "tailcv/experiment.hpp"
#include "tailcv/io.hpp"
#include "tailcv/transfer.hpp"

namespace tailcv::cli {

namespace {

namespace fs = std::filesystem;

struct CommonRunOptions {
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

void add_run_options(CLI::App* cmd, CommonRunOptions& o) {
    cmd->add_option("--seed", o.seed, "Override the config seed");
    cmd->add_option("--threads", o.threads,
                    "Worker threads (default: TAILCV_THREADS or hardware concurrency)");
}

ExperimentConfig load_with_overrides(const std::string& path, const CommonRunOptions& o) {
    ExperimentConfig c = io::load_config(path);
    if (o.seed) c.seed = *o.seed;
    return c;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string data;
    std::size_t k = 0;
    std::optional<std::size_t> k_source;
    std::string methods = "hill,transferred_hill";
    std::string out;
};

void run_estimate(const EstimateArgs& a, std::ostream& log) {
    const auto file = io::read_data_file(a.data);
    const auto ds = file.to_dataset();
    const std::size_t k_source = a.k_source.value_or(a.k);

    nlohmann::json estimates = nlohmann::json::array();
    for (Method m : io::parse_method_list(a.methods)) {
        estimates.push_back(io::to_json(estimate(m, ds, a.k, k_source)));
    }

    nlohmann::json doc = {{"data", {{"path", a.data}, {"n", ds.n()}, {"m", ds.m()}}},
                          {"k", a.k},
                          {"k_source", k_source},
                          {"estimates", estimates}};
    try {
        doc["dependence"] = io::to_json(dependence_report(ds, a.k, k_source));
    } catch (const Error& e) {
        doc["dependence"] = nullptr;
        doc["dependence_error"] = e.what();
    }
    io::write_text_file(a.out, doc.dump(2) + "\n");
    log << "wrote " << estimates.size() << " estimate(s) to " << a.out << '\n';
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out;
    CommonRunOptions run;
};

void run_simulate(const SimulateArgs& a, std::ostream& log) {
    const auto config = load_with_overrides(a.config, a.run);
    const auto report = run_rvr_experiment(config, a.run.threads);
    const fs::path dir(a.out);
    io::write_text_file(dir / "rvr_report.json", io::to_json(report).dump(2) + "\n");
    io::write_csv_table(dir / "estimates.csv", io::estimates_table(report));
    for (const auto& p : report.pairs) {
        log << to_string(p.transferred) << " vs " << to_string(p.baseline)
            << ": rvr = " << io::format_double(p.rvr) << '\n';
    }
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::string vary;
    std::string values;
    std::string out;
    CommonRunOptions run;
};

ExperimentConfig with_value(ExperimentConfig c, const std::string& vary, double value) {
    if (vary == "theta") {
        c.theta = value;
    } else if (vary == "m") {
        c.m = static_cast<std::size_t>(value);
    } else if (vary == "n") {
        c.n = static_cast<std::size_t>(value);
        c.k = default_k(c.n);
        c.k_source = c.k;
    } else if (vary == "gamma_t") {
        c.gamma_t = value;
    } else if (vary == "gamma_s") {
        c.source_marginal = marginal_for_evi(value, c.y_m);
    } else {
        throw Error("--vary must be one of theta, m, n, gamma_t, gamma_s");
    }
    return c;
}

void run_sweep(const SweepArgs& a, std::ostream& log) {
    const auto base = load_with_overrides(a.config, a.run);
    std::vector<std::string> raw_values;
    {
        std::stringstream ss(a.values);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) raw_values.push_back(item);
        }
    }
    if (raw_values.empty()) throw Error("--values is empty");

    const fs::path dir(a.out);
    io::CsvTable sweep;
    sweep.header = {a.vary, "pair", "rvr", "var_base", "var_new", "lambda_hat"};
    for (std::size_t i = 0; i < raw_values.size(); ++i) {
        const double value = io::parse_double(raw_values[i]);
        const auto config = with_value(base, a.vary, value);
        const auto report = run_rvr_experiment(config, a.run.threads);
        io::write_text_file(dir / ("rvr_report_" + std::to_string(i) + ".json"),
                            io::to_json(report).dump(2) + "\n");
        for (const auto& p : report.pairs) {
            sweep.rows.push_back({io::format_double(value),
                                  std::string(to_string(p.baseline)) + "/" +
                                      std::string(to_string(p.transferred)),
                                  io::format_double(p.rvr), io::format_double(p.var_base),
                                  io::format_double(p.var_new),
                                  io::format_double(report.dependence.lambda_hat.mean)});
        }
        log << a.vary << " = " << raw_values[i] << " done\n";
    }
    io::write_csv_table(dir / "sweep.csv", sweep);
}

// ---------------------------------------------------------------------------

struct HillPlotArgs {
    std::string data;
    std::size_t k_min = 1;
    std::size_t k_max = 1;
    std::size_t step = 1;
    std::string out;
};

void run_hill_plot(const HillPlotArgs& a, std::ostream& log) {
    const auto ds = io::load_semi_supervised_csv(a.data);
    const auto series = hill_plot(ds.paired_target(), a.k_min, a.k_max, a.step);
    io::write_csv_table(a.out, io::hill_plot_table(series));
    log << "wrote " << series.k_values.size() << " point(s) to " << a.out << '\n';
}

// ---------------------------------------------------------------------------

struct ScanArgs {
    std::string config;
    std::size_t l_min = 1;
    std::size_t l_max = 1;
    std::size_t l_step = 1;
    std::string out;
    CommonRunOptions run;
};

void run_scan(const ScanArgs& a, std::ostream& log) {
    const auto config = load_with_overrides(a.config, a.run);
    if (a.l_step == 0 || a.l_min > a.l_max) throw Error("empty l range");
    std::vector<std::size_t> ls;
    for (std::size_t l = a.l_min; l <= a.l_max; l += a.l_step) ls.push_back(l);
    const auto rows = source_threshold_scan(config, ls, a.run.threads);
    io::write_csv_table(a.out, io::threshold_scan_table(rows));
    const auto best = std::min_element(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
        return x.median < y.median;
    });
    log << "minimum median analytical variance at l = " << best->l << '\n';
}

// ---------------------------------------------------------------------------

struct BootstrapArgs {
    std::string data;
    std::size_t n_sub = 0;
    std::size_t resamples = 500;
    std::size_t k = 0;
    std::optional<std::size_t> k_source;
    std::string methods = "hill,transferred_hill";
    std::string out;
    std::uint64_t seed = 1;
    bool with_replacement = false;
};

void run_bootstrap(const BootstrapArgs& a, std::ostream& log) {
    const auto pool = io::load_semi_supervised_csv(a.data);
    BootstrapOptions opts;
    opts.n_sub = a.n_sub;
    opts.resamples = a.resamples;
    opts.k = a.k;
    opts.k_source = a.k_source;
    opts.methods = io::parse_method_list(a.methods);
    opts.seed = a.seed;
    opts.with_replacement = a.with_replacement;
    const auto series = bootstrap_study(pool, opts);
    io::write_csv_table(a.out, io::bootstrap_table(series));
    for (const auto& s : series) {
        log << to_string(s.method) << ": " << s.values.size() << " value(s), " << s.failures
            << " failure(s)\n";
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transferred extreme value index estimators and RVR simulations", "tailcv"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Estimate the target EVI from a data file");
    c_est->add_option("--data", est.data, "CSV with header target,source")->required();
    c_est->add_option("--k", est.k, "Number of target extremes")->required();
    c_est->add_option("--k-source", est.k_source, "Number of source extremes (default: k)");
    c_est->add_option("--methods", est.methods, "Comma-separated method list")->required();
    c_est->add_option("--out", est.out, "Output JSON file")->required();

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Run one replicated RVR experiment");
    c_sim->add_option("--config", sim.config, "Experiment config file")->required();
    c_sim->add_option("--out", sim.out, "Output directory")->required();
    add_run_options(c_sim, sim.run);

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("rvr-sweep", "Run RVR experiments over one parameter");
    c_sweep->add_option("--config", sweep.config, "Experiment config file")->required();
    c_sweep->add_option("--vary", sweep.vary, "theta, m, n, gamma_t or gamma_s")
        ->required()
        ->check(CLI::IsMember({"theta", "m", "n", "gamma_t", "gamma_s"}));
    c_sweep->add_option("--values", sweep.values, "Comma-separated values")->required();
    c_sweep->add_option("--out", sweep.out, "Output directory")->required();
    add_run_options(c_sweep, sweep.run);

    HillPlotArgs hp;
    auto* c_hp = app.add_subcommand("hill-plot", "Hill estimates over a range of k");
    c_hp->add_option("--data", hp.data, "CSV with header target,source")->required();
    c_hp->add_option("--k-min", hp.k_min)->required();
    c_hp->add_option("--k-max", hp.k_max)->required();
    c_hp->add_option("--step", hp.step)->required();
    c_hp->add_option("--out", hp.out, "Output CSV file")->required();

    ScanArgs scan;
    auto* c_scan = app.add_subcommand("threshold-scan", "Analytical variance over source extremes l");
    c_scan->add_option("--config", scan.config, "Experiment config file")->required();
    c_scan->add_option("--l-min", scan.l_min)->required();
    c_scan->add_option("--l-max", scan.l_max)->required();
    c_scan->add_option("--l-step", scan.l_step, "Step between scanned l values");
    c_scan->add_option("--out", scan.out, "Output CSV file")->required();
    add_run_options(c_scan, scan.run);

    BootstrapArgs boot;
    auto* c_boot = app.add_subcommand("bootstrap", "Subsample bootstrap of the estimators");
    c_boot->add_option("--data", boot.data, "CSV with header target,source")->required();
    c_boot->add_option("--n-sub", boot.n_sub, "Coupled pairs per subsample")->required();
    c_boot->add_option("--resamples", boot.resamples)->required();
    c_boot->add_option("--k", boot.k)->required();
    c_boot->add_option("--k-source", boot.k_source);
    c_boot->add_option("--methods", boot.methods)->required();
    c_boot->add_option("--out", boot.out, "Output CSV file")->required();
    c_boot->add_option("--seed", boot.seed);
    c_boot->add_flag("--with-replacement", boot.with_replacement, "Resample with replacement");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code != 0) err << app.help();
        return code;
    }

    try {
        if (c_est->parsed()) run_estimate(est, err);
        if (c_sim->parsed()) run_simulate(sim, err);
        if (c_sweep->parsed()) run_sweep(sweep, err);
        if (c_hp->parsed()) run_hill_plot(hp, err);
        if (c_scan->parsed()) run_scan(scan, err);
        if (c_boot->parsed()) run_bootstrap(boot, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace tailcv::cli
