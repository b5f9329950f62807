// Command-line front end.
//
//   ehfbl bounds    --config cfg.json [--out f] [--format csv|json]
//   ehfbl moments   --config cfg.json [--trials T] [--seed S] [--out f]
//   ehfbl simulate  --config cfg.json [--trials T] [--seed S] [--out f] [--format ...]
//   ehfbl sweep     --config cfg.json [...]          bounds plus simulation rows
//   ehfbl plot-data --config cfg.json [--out f]      gnuplot blocks per (a, eps)
//
// Exit codes: 0 success; 1 invalid values (domain errors); 2 parse or numeric
// failures (malformed config/CLI, accuracy-contract violations).
// EHFBL_THREADS caps simulation worker threads.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ehfbl/ehfbl.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_path;    // empty = stdout
    std::string format = "csv";
    std::optional<long long> trials;
    std::optional<std::uint64_t> seed;
};

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ehfbl::ParseError("cannot open output file \"" + out_path + "\"");
    out << text;
}

void add_common(CLI::App* sub, CliOptions& opt, bool with_format) {
    sub->add_option("--config", opt.config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--out", opt.out_path, "output file (default: stdout)");
    sub->add_option("--trials", opt.trials, "override config trial count");
    sub->add_option("--seed", opt.seed, "override config seed");
    if (with_format)
        sub->add_option("--format", opt.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
}

int run(const std::string& mode, const CliOptions& opt) {
    auto cfg = ehfbl::harness::load_config(opt.config_path);
    if (opt.trials) {
        if (*opt.trials < 0) throw ehfbl::ValidationError("--trials must be >= 0");
        cfg.trials = *opt.trials;
    }
    if (opt.seed) cfg.seed = *opt.seed;

    if (mode == "moments") {
        write_output(ehfbl::harness::moments_report(cfg).dump(2) + "\n", opt.out_path);
        return 0;
    }
    const int threads = ehfbl::harness::resolve_threads();
    const auto rows = ehfbl::harness::run_sweep(cfg, mode, threads);
    if (mode == "plot-data") {
        write_output(ehfbl::harness::emit_plot_data(rows), opt.out_path);
        return 0;
    }
    write_output(opt.format == "json" ? ehfbl::harness::emit_json(rows)
                                      : ehfbl::harness::emit_csv(rows),
                 opt.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-blocklength bounds for energy-harvesting AWGN channels"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string mode;
    for (const char* name : {"bounds", "moments", "simulate", "sweep", "plot-data"}) {
        auto* sub = app.add_subcommand(name);
        add_common(sub, opt, std::string(name) != "plot-data" && std::string(name) != "moments");
        sub->callback([&mode, name] { mode = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are parse failures
    }

    try {
        return run(mode, opt);
    } catch (const ehfbl::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ehfbl::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ehfbl::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
