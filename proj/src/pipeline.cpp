#include "fb/pipeline.hpp"
#include "fb/errors.hpp"
#include "fb/freeboundary.hpp"
#include "fb/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

namespace fb {

namespace fs = std::filesystem;

SolveArtifacts run_solve(const RunConfig& cfg, const std::string& out_dir,
                         bool with_nehari_crosscheck) {
    // validate everything before touching the filesystem
    const Grid grid = cfg.make_grid();
    const NonlinearityModel model = cfg.make_model();
    const EpsSchedule sched = cfg.make_schedule(grid);
    const ContinuationOptions sopt = cfg.solver_options(grid);
    const VerifyOptions vopt = cfg.verify_options();
    const std::uint64_t hash = cfg.hash();

    fs::create_directories(out_dir);
    write_text_file(out_dir + "/config.cfg", cfg.canonical_text());

    SolveArtifacts art;
    const Field u0 = default_initial_field(grid);
    art.trace = continue_branch(grid, model, sched, u0, sopt);

    art.report = run_verification(grid, model, art.trace, vopt);
    art.report.config_hash = hash;
    art.report.seed = cfg.seed;

    if (with_nehari_crosscheck && !model.critical) {
        const MinimizeResult mr = minimize_on_M(grid, model, u0);
        art.report.energy.has_inf_M = true;
        art.report.energy.inf_M_level = mr.level;
        art.report.energy.cross_method_gap =
            std::abs(art.report.energy.level_last - mr.level) / std::abs(mr.level);
    }

    // artifacts
    for (std::size_t i = 0; i < art.trace.entries.size(); ++i) {
        const std::string stem = out_dir + "/u_eps_" + std::to_string(i);
        write_field_csv(stem + ".csv", grid, art.trace.entries[i].u, hash);
        if (cfg.get_int("output.write_binary", 1) != 0)
            write_field_bin(stem + ".bin", grid, art.trace.entries[i].u, hash);
    }
    const FreeBoundary fb = extract_free_boundary(grid, art.trace.entries.back().u);
    write_polyline_csv(out_dir + "/polyline.csv", fb, hash);
    write_normals_csv(out_dir + "/normals.csv", fb, hash);
    write_text_file(out_dir + "/trace.json", trace_to_json(art.trace, hash, cfg.seed));
    write_text_file(out_dir + "/report.json", report_to_json(art.report));

    // wall times live in a sidecar outside the determinism contract
    std::string timings = "eps,seconds\n";
    char buf[64];
    for (const TraceEntry& e : art.trace.entries) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.3f\n", e.eps, e.seconds);
        timings += buf;
    }
    write_text_file(out_dir + "/timings.csv", timings);

    art.exit_code = art.report.all_pass() ? kExitOk : kExitVerification;
    return art;
}

int run_sweep(const RunConfig& cfg, const std::string& out_dir, int threads) {
    const std::string axis = cfg.get("sweep.axis", "");
    if (axis.empty()) throw ConfigError("sweep needs sweep.axis");
    const std::vector<double> values = cfg.get_list("sweep.values");
    {
        // reject unknown axes before any compute
        RunConfig probe = cfg;
        probe.kv[axis] = probe.get(axis, "1");
        (void)probe.make_grid();
        (void)probe.make_model();
    }

    fs::create_directories(out_dir);
    struct Row {
        double value;
        int exit_code = kExitSolver;
        double level = 0.0;
        double grad_norm = 0.0;
        bool all_pass = false;
    };
    std::vector<Row> rows(values.size());

    auto run_one = [&](std::size_t i) {
        RunConfig sub = cfg;
        sub.kv.erase("sweep.axis");
        sub.kv.erase("sweep.values");
        char val[32];
        std::snprintf(val, sizeof(val), "%.17g", values[i]);
        sub.kv[axis] = val;
        char dirname[64];
        std::snprintf(dirname, sizeof(dirname), "run_%03zu", i);
        rows[i].value = values[i];
        try {
            SolveArtifacts art = run_solve(sub, out_dir + "/" + dirname);
            rows[i].exit_code = art.exit_code;
            rows[i].level = art.trace.entries.back().level;
            rows[i].grad_norm = art.trace.entries.back().grad_norm;
            rows[i].all_pass = art.report.all_pass();
        } catch (const SolverError&) {
            rows[i].exit_code = kExitSolver;
        } catch (const ModelError&) {
            rows[i].exit_code = kExitSolver;
        }
    };

    if (threads <= 1) {
        for (std::size_t i = 0; i < values.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t]() {
                for (std::size_t i = t; i < values.size(); i += threads) run_one(i);
            });
        for (auto& th : pool) th.join();
        (void)next;
    }

    std::string summary = "value,exit_code,level,grad_norm,all_pass\n";
    char buf[160];
    for (const Row& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%.17g,%d\n", r.value, r.exit_code, r.level,
                      r.grad_norm, r.all_pass ? 1 : 0);
        summary += buf;
    }
    write_text_file(out_dir + "/summary.csv", summary);

    for (const Row& r : rows)
        if (r.exit_code != kExitOk) return r.exit_code;
    return kExitOk;
}

int run_verify(const RunConfig& cfg, const std::string& run_dir, const std::string& out_path) {
    const Grid grid = cfg.make_grid();
    const NonlinearityModel model = cfg.make_model();
    const VerifyOptions vopt = cfg.verify_options();

    if (!fs::exists(run_dir + "/trace.json"))
        throw IoError("missing trace.json in " + run_dir);
    const std::string jt = read_text_file(run_dir + "/trace.json");
    const SolveTrace trace = trace_from_json(run_dir, jt, grid);

    VerificationReport rep = run_verification(grid, model, trace, vopt);
    rep.config_hash = cfg.hash();
    rep.seed = cfg.seed;
    write_text_file(out_path, report_to_json(rep));
    return rep.all_pass() ? kExitOk : kExitVerification;
}

} // namespace fb
