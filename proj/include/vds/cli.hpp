#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vds/config.hpp"
#include "vds/io.hpp"
#include "vds/run.hpp"

namespace vds {

// Exit codes shared by the subcommands.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_infeasible = 2;
inline constexpr int exit_divergence = 3;

// VDS_OUT overrides any requested output directory.
inline std::filesystem::path resolve_out_dir(const std::string& requested)
{
    if (const char* env = std::getenv("VDS_OUT"); env && *env)
        return env;
    return requested.empty() ? std::filesystem::path(".") : std::filesystem::path(requested);
}

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

inline std::string certificate_block(const FeasibilityCertificate& c,
                                     const std::optional<WitnessCheck>& wc)
{
    std::ostringstream os;
    os << "verdict=" << (c.feasible ? "feasible" : "infeasible") << '\n'
       << "margin=" << format_double(c.margin) << '\n'
       << "d=" << format_double(c.d) << '\n'
       << "tau_max=" << format_double(c.tau_max) << '\n'
       << "xi_lo=" << format_double(c.xi_lo) << '\n'
       << "xi_hi=" << format_double(c.xi_hi) << '\n'
       << "xi=" << format_double(c.xi) << '\n'
       << "xi_rule=interval_midpoint" << '\n'
       << "lambda_bound=" << format_double(c.lambda_bound) << '\n'
       << "lambda_cap=" << format_double(c.lambda_cap) << '\n'
       << "lambda=" << format_double(c.lambda) << '\n';
    if (wc) {
        os << "witness_check=" << (wc->holds ? "holds" : "violated") << '\n';
        if (!wc->holds)
            os << "witness_violation_t=" << format_double(wc->violation_time) << '\n';
    } else {
        os << "witness_check=skipped" << '\n';
    }
    return os.str();
}

inline std::vector<std::string> fit_lines(const RunOutcome& out)
{
    std::vector<std::string> lines;
    if (out.fit) {
        lines.push_back("fit_status=ok");
        lines.push_back("fit_t0=" + format_double(out.fit->t0));
        lines.push_back("fit_K=" + format_double(out.fit->K_fit));
        lines.push_back("fit_k=" + format_double(out.fit->k_fit));
        lines.push_back("fit_R2=" + format_double(out.fit->r2));
        lines.push_back("fit_points=" + std::to_string(out.fit->n_points));
    } else {
        lines.push_back("fit_status=failed");
        lines.push_back("fit_error=" + out.fit_failure);
    }
    return lines;
}

inline std::string diagnostics_block(const RunOutcome& out, const RunConfig& cfg)
{
    std::ostringstream os;
    os << "dt=" << format_double(out.dt) << '\n' << "steps=" << out.steps << '\n';
    for (const auto& l : fit_lines(out))
        os << l << '\n';
    os << "monotone_max_uptick=" << format_double(out.monotone.max_uptick_rel) << '\n'
       << "monotone_tol=" << format_double(out.monotone.tol) << '\n'
       << "monotone_pass=" << (out.monotone.pass ? "true" : "false") << '\n'
       << "N=" << format_double(cfg.energy.big_n) << '\n'
       << "eps=" << format_double(cfg.energy.eps) << '\n'
       << "c7=" << format_double(cfg.energy.c7) << '\n';
    if (out.sandwich) {
        os << "beta1=" << format_double(out.sandwich->beta1) << '\n'
           << "beta2=" << format_double(out.sandwich->beta2) << '\n'
           << "sandwich_pass=" << (out.sandwich->pass ? "true" : "false") << '\n';
    } else {
        os << "sandwich_error=" << out.sandwich_failure << '\n';
    }
    if (out.transport_checked)
        os << "max_transport_mismatch=" << format_double(out.max_transport_mismatch) << '\n'
           << "settled_transport_mismatch=" << format_double(out.settled_transport_mismatch)
           << '\n';
    if (out.diverged)
        os << "diverged_at=" << format_double(out.divergence_time) << '\n'
           << "divergence_peak=" << format_double(out.divergence_peak) << '\n';
    return os.str();
}

// Run one validated config and write energy.csv, certificate.txt, fit.txt and
// any snapshots into out_dir. Returns the process exit code.
inline int execute_run(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       RunOutcome* result = nullptr, bool quiet = false)
{
    std::filesystem::create_directories(out_dir);
    RunOutcome out = run_simulation(cfg);

    std::vector<std::string> footer = fit_lines(out);
    if (out.diverged) {
        footer.push_back("divergence_t=" + format_double(out.divergence_time));
        footer.push_back("divergence_max=" + format_double(out.divergence_peak));
    }
    write_file_atomic(out_dir / "energy.csv", energy_csv(out.records, footer));
    write_file_atomic(out_dir / "certificate.txt",
                      certificate_block(out.certificate, out.witness_check));
    write_file_atomic(out_dir / "fit.txt", diagnostics_block(out, cfg));
    for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
        const auto& [t, field] = out.snapshots[k];
        std::ostringstream name;
        name << "u_" << k << (cfg.solver.snapshot_format == "binary" ? ".bin" : ".csv");
        write_file_atomic(out_dir / name.str(),
                          cfg.solver.snapshot_format == "binary" ? snapshot_binary(field, t)
                                                                 : snapshot_csv(field, t));
    }

    if (!quiet) {
        std::cout << certificate_block(out.certificate, out.witness_check)
                  << diagnostics_block(out, cfg) << "out_dir=" << out_dir.string() << '\n';
    }
    if (out.diverged) {
        if (!quiet)
            std::cerr << "solution diverged at t = " << format_double(out.divergence_time)
                      << " (max |u| = " << format_double(out.divergence_peak) << ")\n";
        if (result)
            *result = std::move(out);
        return exit_divergence;
    }
    if (result)
        *result = std::move(out);
    return exit_ok;
}

inline int report_config_errors(const std::vector<std::string>& violations)
{
    std::cerr << "configuration errors:\n";
    for (const auto& v : violations)
        std::cerr << "  " << v << '\n';
    return exit_config;
}

inline int cmd_simulate(const std::string& config_path, const std::string& out_dir)
{
    std::string text;
    try {
        text = read_text_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
    ParseResult parsed = parse_config(text);
    if (!parsed.ok())
        return report_config_errors(parsed.violations);
    try {
        return execute_run(*parsed.config, resolve_out_dir(out_dir));
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
}

inline int cmd_check_feasibility(const std::string& config_path)
{
    std::string text;
    try {
        text = read_text_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
    ParseResult parsed = parse_config(text);
    if (!parsed.ok())
        return report_config_errors(parsed.violations);
    const RunConfig& cfg = *parsed.config;
    const RelaxationKernel kernel = build_kernel(cfg.kernel);
    const DelayProfile delay = build_delay(cfg.delay);
    const DampingPair damping(cfg.solver.a0, cfg.solver.a1);
    const FeasibilityCertificate cert = certify(damping, delay);
    std::optional<WitnessCheck> wc;
    if (!kernel.is_zero())
        wc = check_decay_witness(kernel, build_witness(cfg.witness, kernel),
                                 log_spaced_times(10.0 * delay.upper() + 50.0, 512));
    std::cout << certificate_block(cert, wc);
    return cert.feasible ? exit_ok : exit_infeasible;
}

inline int cmd_fit_decay(const std::string& csv_path, const std::string& witness_form,
                         double witness_a, double t0, double t_end)
{
    try {
        const EnergySeries series = read_energy_csv(csv_path);
        const DecayWitness witness = witness_form == "hyperbolic"
                                         ? DecayWitness::hyperbolic(witness_a)
                                         : DecayWitness::constant(witness_a);
        const DecayFit fit = fit_decay_series(series.t, series.E, witness, t0, t_end);
        std::cout << "fit_status=ok\n"
                  << "witness_form=" << witness_form << '\n'
                  << "witness_a=" << format_double(witness_a) << '\n'
                  << "fit_t0=" << format_double(fit.t0) << '\n'
                  << "fit_K=" << format_double(fit.K_fit) << '\n'
                  << "fit_k=" << format_double(fit.k_fit) << '\n'
                  << "fit_R2=" << format_double(fit.r2) << '\n'
                  << "fit_points=" << fit.n_points << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
}

struct SweepRow {
    std::string value;
    std::string verdict = "-";
    std::string margin = "nan";
    std::string k_fit = "nan";
    std::string r2 = "nan";
    std::string final_e = "nan";
    std::string status = "ok";
};

inline std::string sanitize_for_path(const std::string& s)
{
    std::string out;
    for (char ch : s)
        out.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ||
                              ch == '_'
                          ? ch
                          : '_');
    return out;
}

// Run the template once per axis value on a bounded worker pool and write a
// summary.csv plus one output directory per run. Per-run failures land in the
// row; the sweep itself still succeeds.
inline int cmd_sweep(const std::string& config_path, const std::string& param,
                     const std::vector<std::string>& values, const std::string& out_dir_req,
                     unsigned jobs = 0)
{
    if (values.empty()) {
        std::cerr << "sweep: empty value list\n";
        return exit_config;
    }
    std::string text;
    try {
        text = read_text_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return exit_config;
    }
    std::vector<std::string> violations;
    const RawConfig base = parse_raw_config(text, violations);
    if (!violations.empty())
        return report_config_errors(violations);
    {
        // the axis must name a schema entry even before any value is applied
        RawConfig probe = base;
        std::vector<std::string> axis_errors;
        apply_override(probe, param, values.front(), axis_errors);
        if (!axis_errors.empty())
            return report_config_errors(axis_errors);
    }

    const std::filesystem::path out_dir = resolve_out_dir(out_dir_req);
    std::filesystem::create_directories(out_dir);

    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};
    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, values.size());

    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
            SweepRow& row = rows[i];
            row.value = values[i];
            RawConfig raw = base;
            std::vector<std::string> errs;
            apply_override(raw, param, values[i], errs);
            ParseResult parsed = materialize_config(raw, std::move(errs));
            if (!parsed.ok()) {
                row.status = "config_error";
                continue;
            }
            std::ostringstream dir;
            dir << "run_" << i << "_" << sanitize_for_path(values[i]);
            try {
                RunOutcome out;
                const int code = execute_run(*parsed.config, out_dir / dir.str(), &out, true);
                row.verdict = out.certificate.feasible ? "feasible" : "infeasible";
                row.margin = format_double(out.certificate.margin);
                if (out.fit) {
                    row.k_fit = format_double(out.fit->k_fit);
                    row.r2 = format_double(out.fit->r2);
                }
                if (!out.records.empty())
                    row.final_e = format_double(out.records.back().E);
                if (code == exit_divergence)
                    row.status = "divergence_t=" + format_double(out.divergence_time);
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();

    std::ostringstream csv;
    csv << "value,verdict,margin,k_fit,r2,final_E,status\n";
    for (const auto& row : rows)
        csv << row.value << ',' << row.verdict << ',' << row.margin << ',' << row.k_fit << ','
            << row.r2 << ',' << row.final_e << ',' << row.status << '\n';
    write_file_atomic(out_dir / "summary.csv", csv.str());
    std::cout << "sweep: " << values.size() << " runs of " << param << " -> "
              << (out_dir / "summary.csv").string() << '\n';
    return exit_ok;
}

} // namespace vds
