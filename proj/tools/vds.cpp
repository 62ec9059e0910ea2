// Command-line front end: simulate one config, sweep a parameter, certify
// feasibility, or re-fit the decay law of an existing energy.csv.

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vds/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"viscoelastic delayed-feedback wave simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* simulate = app.add_subcommand("simulate", "run a config and write csv outputs");
    simulate->add_option("-c,--config", config_path, "config file")->required();
    simulate->add_option("-o,--out", out_dir, "output directory (VDS_OUT overrides)");

    auto* check = app.add_subcommand("check-feasibility", "print the certificate; exit 2 if infeasible");
    check->add_option("-c,--config", config_path, "config file")->required();

    std::string param;
    std::vector<std::string> values;
    unsigned jobs = 0;
    auto* sweep = app.add_subcommand("sweep", "run a config once per value of one parameter");
    sweep->add_option("-c,--config", config_path, "template config file")->required();
    sweep->add_option("-p,--param", param, "parameter path, e.g. solver.a1")->required();
    sweep->add_option("-v,--values", values, "comma separated values")->required()->delimiter(',');
    sweep->add_option("-o,--out", out_dir, "output directory (VDS_OUT overrides)");
    sweep->add_option("-j,--jobs", jobs, "worker pool size (default: available cores)");

    std::string csv_path;
    std::string witness_form = "constant";
    double witness_a = 1.0;
    double t0 = 0.0;
    double t_end = std::numeric_limits<double>::infinity();
    auto* fit = app.add_subcommand("fit-decay", "re-fit an energy.csv over a new window");
    fit->add_option("--csv", csv_path, "energy.csv to read")->required();
    fit->add_option("--witness-form", witness_form, "constant or hyperbolic")
        ->check(CLI::IsMember({"constant", "hyperbolic"}));
    fit->add_option("--witness-a", witness_a, "witness scale a");
    fit->add_option("--t0", t0, "window start")->required();
    fit->add_option("--t-end", t_end, "window end (default: open)");

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed())
        return vds::cmd_simulate(config_path, out_dir);
    if (check->parsed())
        return vds::cmd_check_feasibility(config_path);
    if (sweep->parsed())
        return vds::cmd_sweep(config_path, param, values, out_dir, jobs);
    if (fit->parsed())
        return vds::cmd_fit_decay(csv_path, witness_form, witness_a, t0, t_end);
    return vds::exit_config;
}
