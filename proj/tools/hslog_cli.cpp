#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <hslog/cli/commands.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for weighted Hardy-Sobolev inequalities with a logarithmic term"};
    app.require_subcommand(1);

    std::string config, out, suite = "all";
    int threads = 1;
    app.add_option("--config", config, "flat key=value config file (defaults used when omitted)");
    app.add_option("--out", out, "output directory (overrides output_dir from the config)");
    app.add_option("--threads", threads, "worker threads for sweeps and scans");

    for (const auto& [name, _] : hslog::cli::commands()) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
        if (name == "verify") {
            sub->add_option("--suite", suite, "bliss, rates, sweep, mp, ncs, orlicz or all")
                ->check(CLI::IsMember({"bliss", "rates", "sweep", "mp", "ncs", "orlicz", "all"}));
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    hslog::cli::Context ctx{out, threads, suite};
    return hslog::cli::run_command(cmd, config, ctx, std::cout, std::cerr);
}
