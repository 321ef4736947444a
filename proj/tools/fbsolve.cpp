// fbsolve: mountain-pass solver and verification lab for the obstacle-type
// free boundary problem  -Δu = g(x,(u-1)_+),  |∇u+|^2 - |∇u-|^2 = 2 on ∂{u>1}.
//
// Subcommands: solve, sweep, verify, dump-presets.

#include "fb/errors.hpp"
#include "fb/io.hpp"
#include "fb/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

namespace {

fb::RunConfig load_config(const std::string& path, long seed_override) {
    fb::RunConfig cfg = fb::RunConfig::parse_file(path);
    if (seed_override >= 0) {
        cfg.kv["seed"] = std::to_string(seed_override);
        cfg.seed = static_cast<std::uint64_t>(seed_override);
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"free-boundary mountain pass laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", run_dir, out_path;
    long seed = -1;
    int threads = 1;
    bool crosscheck = false;

    CLI::App* solve = app.add_subcommand("solve", "solve one configuration and verify");
    solve->add_option("--config", config_path, "config file")->required();
    solve->add_option("--out", out_dir, "output directory");
    solve->add_option("--seed", seed, "seed recorded in artifacts");
    solve->add_option("--threads", threads, "unused for single solves");
    solve->add_flag("--nehari-crosscheck", crosscheck,
                    "also minimize the sharp functional over the Nehari set");

    CLI::App* sweep = app.add_subcommand("sweep", "repeat solve over sweep.values");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--seed", seed, "seed recorded in artifacts");
    sweep->add_option("--threads", threads, "parallel sweep entries");

    CLI::App* verify = app.add_subcommand("verify", "re-run verification on stored fields");
    verify->add_option("--config", config_path, "config file")->required();
    verify->add_option("--run", run_dir, "directory with trace.json and fields")->required();
    verify->add_option("--out", out_path, "report path (default <run>/report_verify.json)");
    verify->add_option("--seed", seed, "seed recorded in artifacts");

    CLI::App* dump = app.add_subcommand("dump-presets", "write preset config files");
    dump->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fb::kExitUsage;
    }

    try {
        if (*solve) {
            const fb::RunConfig cfg = load_config(config_path, seed);
            const fb::SolveArtifacts art = fb::run_solve(cfg, out_dir, crosscheck);
            std::printf("solve: level %.12g, grad norm %.3e, %s\n",
                        art.trace.entries.back().level, art.trace.entries.back().grad_norm,
                        art.report.all_pass() ? "all checks passed" : "verification FAILED");
            return art.exit_code;
        }
        if (*sweep) {
            const fb::RunConfig cfg = load_config(config_path, seed);
            return fb::run_sweep(cfg, out_dir, threads);
        }
        if (*verify) {
            const fb::RunConfig cfg = load_config(config_path, seed);
            if (out_path.empty()) out_path = run_dir + "/report_verify.json";
            return fb::run_verify(cfg, run_dir, out_path);
        }
        if (*dump) {
            std::filesystem::create_directories(out_dir);
            for (const std::string& name : fb::preset_names()) {
                fb::write_text_file(out_dir + "/" + name + ".cfg", fb::preset_text(name));
                std::printf("wrote %s/%s.cfg\n", out_dir.c_str(), name.c_str());
            }
            return fb::kExitOk;
        }
    } catch (const fb::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return fb::kExitUsage;
    } catch (const fb::SchemaError& e) {
        std::fprintf(stderr, "schema error: %s\n", e.what());
        return fb::kExitSchema;
    } catch (const fb::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return fb::kExitIo;
    } catch (const fb::ModelError& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return fb::kExitSolver;
    } catch (const fb::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return fb::kExitSolver;
    }
    return fb::kExitUsage;
}
