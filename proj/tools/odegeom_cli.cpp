#include "cli.hpp"
#include "odegeom/parse.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

using cli::json;

namespace {

// the first word that names no subcommand where one is expected, or empty
std::string unknown_subcommand(CLI::App& app, int argc, char** argv) {
    CLI::App* cur = &app;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a.rfind("-", 0) == 0) {
            const CLI::Option* opt = nullptr;
            for (CLI::App* s = cur; s && !opt; s = s->get_parent()) opt = s->get_option_no_throw(a);
            if (opt && opt->get_type_size_max() > 0 && a.find('=') == std::string::npos) ++i;
            continue;
        }
        if (cur->get_subcommands({}).empty()) return "";
        CLI::App* sub = cur->get_subcommand_no_throw(a);
        if (!sub) return a;
        cur = sub;
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    cli::CommandSet commands;
    CLI::App& app = commands.app();

    cli::RunConfig cfg;
    std::string config_path;
    if (const char* env = std::getenv("ODEGEOM_CONFIG")) config_path = env;
    double tol = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> box;
    auto* tol_opt = app.add_option("--tol", tol, "relative zero-test tolerance (default 1e-9)");
    auto* samples_opt = app.add_option("--samples", samples, "sample points per zero test (default 20)");
    auto* seed_opt = app.add_option("--seed", seed, "sampler seed (default 0)");
    app.add_option("--box", box, "sampling range sym:lo:hi, repeatable");
    auto* json_flag = app.add_flag("--json", "emit a JSON report");
    app.add_option("--config", config_path, "JSON config file (default from ODEGEOM_CONFIG)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const std::string word = unknown_subcommand(app, argc, argv);
        if (!word.empty())
            std::cerr << "unknown subcommand: " << word << "\n";
        else
            std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    cli::Outcome out;
    try {
        if (!config_path.empty()) cli::apply_config_file(cfg, config_path);
        if (*tol_opt) {
            cfg.tol = tol;
            cfg.tol_set = true;
        }
        if (*samples_opt) cfg.samples = samples;
        if (*seed_opt) cfg.seed = seed;
        if (!box.empty()) cfg.box = box;
        if (*json_flag) cfg.json_output = true;
        cfg.validate();
        out = commands.run(cfg);
    } catch (const cli::BoxError& e) {
        std::cerr << "box violation: " << e.what() << "\n";
        return 2;
    } catch (const cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const odegeom::ParseError& e) {
        std::cerr << "malformed formula: " << e.what() << "\n";
        return 2;
    } catch (const odegeom::BoxUnusable& e) {
        std::cerr << "box violation: " << e.what() << "\n";
        return 2;
    } catch (const odegeom::EvalError& e) {
        std::cerr << "box violation: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    }

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.report["command"] = commands.command();
    out.report["config"] = cfg.to_json();
    if (!out.report.contains("inputs")) out.report["inputs"] = json::object();
    out.report["status"] = out.pass ? "pass" : "mismatch";
    out.report["seconds"] = seconds;
    if (cfg.json_output)
        std::cout << out.report.dump(2) << "\n";
    else {
        for (const auto& l : out.lines) std::cout << l << "\n";
        if (!out.pass) std::cout << "status: mismatch\n";
    }
    return out.pass ? 0 : 1;
}
