#include "sdkg/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "sdkg/config.hpp"
#include "sdkg/errors.hpp"
#include "sdkg/reports.hpp"

namespace sdkg {

namespace {

struct Options {
    int jobs = 1;
    bool force = false;
};

// Runs task(i) for i < n on `jobs` threads; results are indexed, so the
// caller's reduction order does not depend on scheduling.
template <class F>
void parallel_for(int n, int jobs, F&& task) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[static_cast<size_t>(i)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw InvalidInput("failed writing output file '" + path + "'");
}

std::string report_document(const RunConfig& cfg, Json report) {
    Json doc;
    doc["config"] = config_json(cfg);
    doc["report"] = std::move(report);
    return cfg.output_format == "jsonl" ? doc.dump() + "\n" : doc.dump(2) + "\n";
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double relative_drift(const TrajectoryRecord& rec) {
    const double q0 = rec.charge.front(), q1 = rec.charge.back();
    return q0 > 0.0 ? std::abs(q1 - q0) / q0 : std::abs(q1 - q0);
}

int total_iterations(const TrajectoryRecord& rec) {
    int n = 0;
    for (const auto& p : rec.picard_reports) n += p.iterations;
    return n;
}

int run_simulate(const RunConfig& cfg) {
    const auto solver = solver_config(cfg);
    const auto rec = solve_trajectory(solver, initial_state(cfg));
    std::ostringstream out;
    const auto rows = trajectory_rows(rec);
    if (cfg.output_format == "csv") {
        write_csv_header(out, cfg, trajectory_columns);
        for (const auto& r : rows) write_csv_row(out, r);
    } else {
        write_jsonl_header(out, cfg);
        for (const auto& r : rows) write_jsonl_row(out, trajectory_columns, r);
    }
    write_file(cfg.output_path, out.str());
    std::cout << "simulate: charge_drift=" << fmt("%.3e", relative_drift(rec)) << " tau_R=" << fmt("%.6g", rec.tau_R)
              << " picard_iterations=" << total_iterations(rec) << " rows=" << rows.size()
              << " output=" << cfg.output_path << "\n";
    return 0;
}

const std::vector<std::string> ensemble_columns = {
    "R", "seed", "status", "tau_R", "tau_reached", "charge_initial", "charge_final", "charge_drift",
    "picard_iterations", "xnorm2_sum_final"};

int run_ensemble(const RunConfig& cfg, const Options& opt) {
    const auto base = solver_config(cfg);
    const auto u0 = initial_state(cfg);
    const int n = cfg.n_trajectories;
    const int n_tasks = n * static_cast<int>(cfg.r_ladder.size());
    std::vector<std::optional<TrajectoryRecord>> results(static_cast<size_t>(n_tasks));
    parallel_for(n_tasks, opt.jobs, [&](int i) {
        SolverConfig c = base;
        c.truncation_R = cfg.r_ladder[static_cast<size_t>(i / n)];
        c.seed = cfg.base_seed + static_cast<std::uint64_t>(i % n);
        try {
            results[static_cast<size_t>(i)] = solve_trajectory(c, u0);
        } catch (const SubintervalDivergence&) {
        }
    });

    std::ostringstream out;
    if (cfg.output_format == "csv")
        write_csv_header(out, cfg, ensemble_columns);
    else
        write_jsonl_header(out, cfg);
    std::vector<LadderEnsemble> ladder;
    int failed = 0;
    for (size_t l = 0; l < cfg.r_ladder.size(); ++l) {
        LadderEnsemble e{cfg.r_ladder[l], {}, 0};
        for (int i = 0; i < n; ++i) {
            auto& res = results[l * static_cast<size_t>(n) + static_cast<size_t>(i)];
            std::vector<double> row{e.R, static_cast<double>(cfg.base_seed + static_cast<std::uint64_t>(i))};
            if (res) {
                const auto& rec = *res;
                double sum = 0.0;
                for (const auto& v : rec.running_norms) sum += v.empty() ? 0.0 : v.back();
                row.insert(row.end(), {0.0, rec.tau_R, rec.tau_reached ? 1.0 : 0.0, rec.charge.front(),
                                       rec.charge.back(), relative_drift(rec),
                                       static_cast<double>(total_iterations(rec)), sum});
                e.records.push_back(std::move(*res));
            } else {
                row.insert(row.end(), {1.0, NAN, NAN, NAN, NAN, NAN, NAN, NAN});
                ++e.n_failed;
                ++failed;
            }
            if (cfg.output_format == "csv")
                write_csv_row(out, row);
            else
                write_jsonl_row(out, ensemble_columns, row);
        }
        ladder.push_back(std::move(e));
    }
    write_file(cfg.output_path, out.str());

    std::string monitor = "skipped (global hypotheses not met)";
    bool hypotheses = true;
    try {
        check_global_hypotheses(cfg.s, cfg.r, cfg.b);
    } catch (const InvalidInput&) {
        hypotheses = false;
    }
    if (hypotheses) {
        const auto stats = monitor_global_bounds(ladder, cfg.r, cfg.b);
        write_file(cfg.output_path + ".report.json", report_document(cfg, to_json(stats)));
        monitor = "phi_trend_slope=" + fmt("%.3g", stats.phi_trend_slope);
    }
    std::cout << "ensemble: trajectories=" << n_tasks << " failed=" << failed << " monitor: " << monitor
              << " output=" << cfg.output_path << "\n";
    return failed == 0 ? 0 : 2;
}

ProbeOptions probe_options(const Options& opt) {
    ProbeOptions p;
    p.force = opt.force;
    return p;
}

int run_probe(const RunConfig& cfg, const Options& opt) {
    const auto id = parse_estimate(cfg.probe_estimate);
    const auto popt = probe_options(opt);
    const auto rep = probe_bilinear(id, cfg.s, cfg.r, cfg.b, cfg.probe_trials, cfg.probe_seed, popt);
    Json j = to_json(rep);
    if (id == BilinearEstimate::m_plus_bound)
        j["duality"] = to_json(probe_duality(cfg.s, cfg.r, cfg.b, std::min(cfg.probe_trials, 20), cfg.probe_seed, popt));
    write_file(cfg.output_path, report_document(cfg, j));
    std::cout << "probe-bilinear: " << rep.estimate_id << " max_ratio=" << fmt("%.6g", rep.max_ratio)
              << " mesh_change=" << fmt("%.3g", rep.mesh_change()) << " output=" << cfg.output_path << "\n";
    return std::isfinite(rep.max_ratio) ? 0 : 3;
}

int run_check_norms(const RunConfig& cfg) {
    const auto solver = solver_config(cfg);
    const GridSpec& g = solver.grid;
    const auto u0 = initial_state(cfg);
    Json j;

    const CellBasis basis(g, g.n_modes);
    const double mk = ito_correction(solver.kernel1);
    double ito_err = 0.0;
    for (double c : basis_square_sum(solver.kernel1, basis))
        ito_err = std::max(ito_err, mk > 0.0 ? std::abs(0.5 * c - mk) / mk : std::abs(0.5 * c));
    const double hs = hs_norm_multiplication(u0.psi_plus, solver.kernel1, basis);
    const double hs_ref = sobolev_norm(u0.psi_plus, 0.0) * sobolev_norm(solver.kernel1.kernel, 0.0);
    const double hs_err = hs_ref > 0.0 ? std::abs(hs - hs_ref) / hs_ref : hs;
    j["ito_correction"] = mk;
    j["ito_identity_max_relative_error"] = ito_err;
    j["hs_identity_relative_error"] = hs_err;

    double mod_err = 0.0;
    Json mods = Json::array();
    for (int c = 0; c < 3; ++c) {
        const auto h = component_symbols[static_cast<size_t>(c)];
        const double sc = c == 2 ? cfg.r : cfg.s;
        SpaceTimePath p{g, {}, {}};
        for (int n = 0; n <= solver.n_steps(); ++n) {
            const double t = n * solver.dt;
            p.times.push_back(t);
            p.slices.push_back(group_apply(h, t, u0.component(c)));
        }
        const double T = solver.horizon;
        const double lhs = modified_norm(p, NormSpec(sc, cfg.b, h, 0.0, T));
        const double rhs = std::pow(T, 0.5 - cfg.b) * sobolev_norm(u0.component(c), sc);
        const double err = rhs > 0.0 ? std::abs(lhs - rhs) / rhs : lhs;
        mod_err = std::max(mod_err, err);
        mods.push_back({{"modified_norm", lhs}, {"expected", rhs}});
    }
    j["free_evolution"] = mods;
    j["free_evolution_max_relative_error"] = mod_err;

    std::vector<double> ratios;
    for (int e = 2; e <= 8; ++e) {
        const double T = std::ldexp(1.0, -e);
        std::vector<cplx> ones(65, cplx(1.0, 0.0));
        ratios.push_back(hb_norm_sharp_cutoff(ones, T / 64.0, cfg.b) / std::pow(T, 0.5 - cfg.b));
    }
    const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
    j["indicator_ratios"] = ratios;
    j["indicator_spread"] = spread;

    const auto cut = probe_cutoff(cfg.b, cfg.probe_trials, cfg.probe_seed);
    j["cutoff_probe"] = to_json(cut);

    const bool pass = ito_err < 1e-8 && hs_err < 1e-8 && mod_err < 1e-10 && spread < 3.0;
    j["identities_pass"] = pass;
    write_file(cfg.output_path, report_document(cfg, j));
    std::cout << "check-norms: ito_err=" << fmt("%.2e", ito_err) << " hs_err=" << fmt("%.2e", hs_err)
              << " free_err=" << fmt("%.2e", mod_err) << " indicator_spread=" << fmt("%.4g", spread)
              << " cutoff_bound=" << fmt("%.4g", cut.bound_constant_coarse) << (pass ? " PASS" : " FAIL")
              << " output=" << cfg.output_path << "\n";
    return pass ? 0 : 3;
}

int run_check_ito(const RunConfig& cfg) {
    const auto solver = solver_config(cfg);
    const auto s = ito_stratonovich_series(solver, initial_state(cfg), cfg.ito_trajectories, cfg.ito_halvings);
    write_file(cfg.output_path, report_document(cfg, to_json(s)));
    std::cout << "check-ito: discrepancy=" << fmt("%.3e", s.discrepancy.front()) << " slope=" << fmt("%.3g", s.slope)
              << " output=" << cfg.output_path << "\n";
    return 0;
}

int run_check_charge(const RunConfig& cfg, const Options& opt) {
    const auto base = solver_config(cfg);
    const auto u0 = initial_state(cfg);
    const int levels = cfg.charge_levels;
    const int n = cfg.n_trajectories;
    const int factor_max = 1 << (levels - 1);
    const double dt_fine = base.dt / factor_max;
    std::vector<double> drift(static_cast<size_t>(n * levels), 0.0);
    std::vector<int> iters(static_cast<size_t>(n * levels), 0);
    parallel_for(n * levels, opt.jobs, [&](int task) {
        const int i = task / levels, l = task % levels;
        SolverConfig c = base;
        c.dt = base.dt / (1 << l);
        c.seed = cfg.base_seed + static_cast<std::uint64_t>(i);
        const auto w = sample_increments(c.seed, c.basis_size(), base.n_steps() * factor_max, dt_fine);
        const int f = factor_max >> l;
        const auto rec = solve_trajectory(c, u0, f == 1 ? w : coarsen(w, f));
        drift[static_cast<size_t>(task)] = relative_drift(rec);
        iters[static_cast<size_t>(task)] = total_iterations(rec);
    });
    std::vector<double> dts, mean(static_cast<size_t>(levels), 0.0), worst(static_cast<size_t>(levels), 0.0);
    for (int l = 0; l < levels; ++l) {
        dts.push_back(base.dt / (1 << l));
        for (int i = 0; i < n; ++i) {
            const double d = drift[static_cast<size_t>(i * levels + l)];
            mean[static_cast<size_t>(l)] += d / n;
            worst[static_cast<size_t>(l)] = std::max(worst[static_cast<size_t>(l)], d);
        }
    }
    const double slope = log_log_slope(dts, mean);
    Json j;
    j["dt"] = dts;
    j["charge_drift_mean"] = mean;
    j["charge_drift_max"] = worst;
    j["slope"] = slope;
    write_file(cfg.output_path, report_document(cfg, j));
    std::cout << "check-charge: drift=" << fmt("%.3e", mean.back()) << " slope=" << fmt("%.3g", slope)
              << " output=" << cfg.output_path << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Stochastic Dirac-Klein-Gordon solver"};
    std::string command, config_path, output;
    Options opt;
    app.add_option("command", command, "simulate, ensemble, probe-bilinear, check-norms, check-ito, check-charge")
        ->required()
        ->check(CLI::IsMember({"simulate", "ensemble", "probe-bilinear", "check-norms", "check-ito", "check-charge"}));
    app.add_option("--config", config_path, "key = value run configuration")->required();
    app.add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--output", output, "output path (overrides output_path)");
    app.add_flag("--force", opt.force, "allow probes outside the admissible parameter range");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig cfg = load_config(config_path);
        cfg.command = command;
        if (!output.empty()) cfg.output_path = output;
        validate(cfg);
        if (command == "simulate") return run_simulate(cfg);
        if (command == "ensemble") return run_ensemble(cfg, opt);
        if (command == "probe-bilinear") return run_probe(cfg, opt);
        if (command == "check-norms") return run_check_norms(cfg);
        if (command == "check-ito") return run_check_ito(cfg);
        return run_check_charge(cfg, opt);
    } catch (const SubintervalDivergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sdkg
