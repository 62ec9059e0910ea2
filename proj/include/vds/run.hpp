#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vds/config.hpp"
#include "vds/energy.hpp"
#include "vds/feasibility.hpp"
#include "vds/solver.hpp"

namespace vds {

struct RunOutcome {
    FeasibilityCertificate certificate;
    std::optional<WitnessCheck> witness_check; // absent for the zero kernel
    std::vector<EnergyRecord> records;
    std::vector<std::pair<double, GridFunction>> snapshots;

    std::optional<DecayFit> fit;
    std::string fit_failure;
    MonotoneReport monotone;
    std::optional<SandwichEstimate> sandwich;
    std::string sandwich_failure;

    bool diverged = false;
    double divergence_time = 0.0;
    double divergence_peak = 0.0;

    bool transport_checked = false;
    double max_transport_mismatch = 0.0;     // over the whole run
    double settled_transport_mismatch = 0.0; // past t = 2 tau_max, after the start-up
                                             // kink has left the rho domain

    double dt = 0.0;
    long steps = 0;
    double fit_t0 = 0.0;
};

// Step size: the CFL bound scaled by dt_safety, capped so the delay spans at
// least 8 steps, then shrunk to land on t_end exactly.
inline std::pair<double, long> choose_time_step(const Grid& grid, const DelayProfile& delay,
                                                double dt_safety, double t_end)
{
    double dt = dt_safety * grid.spacing() / std::sqrt(static_cast<double>(grid.dim()));
    dt = std::min(dt, delay.lower() / 8.0);
    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    return {t_end / static_cast<double>(steps), steps};
}

// Deterministic simulation driver: seed, loop, sample the energy functionals
// every output_every steps (and at the final time), fit the decay law, and
// run the monotonicity and sandwich diagnostics. Divergence ends the loop
// early with the partial series kept.
inline RunOutcome run_simulation(const RunConfig& cfg)
{
    const Grid grid = build_grid(cfg.grid);
    const RelaxationKernel kernel = build_kernel(cfg.kernel);
    const DecayWitness witness = build_witness(cfg.witness, kernel);
    const DelayProfile delay = build_delay(cfg.delay);
    const DampingPair damping(cfg.solver.a0, cfg.solver.a1);

    RunOutcome out;
    out.certificate = certify(damping, delay);
    if (!kernel.is_zero()) {
        const auto times = log_spaced_times(10.0 * delay.upper() + 50.0, 512);
        out.witness_check = check_decay_witness(kernel, witness, times);
    }

    auto [dt, steps] = choose_time_step(grid, delay, cfg.solver.dt_safety, cfg.solver.t_end);
    out.dt = dt;
    out.steps = steps;

    SolverOptions opt;
    opt.dt = dt;
    opt.engine = cfg.solver.engine == "direct" ? ConvolutionEngine::Mode::direct
                                               : ConvolutionEngine::Mode::recursive;
    opt.transport_check = cfg.delay.transport_check;
    opt.n_rho = cfg.delay.n_rho;
    out.transport_checked = opt.transport_check;

    Simulation sim(grid, kernel, delay, damping, build_initial_data(grid, cfg.init), opt);

    EnergyParams ep;
    ep.xi_weight = out.certificate.xi;
    ep.lambda = out.certificate.lambda;
    ep.big_n = cfg.energy.big_n;
    ep.eps = cfg.energy.eps;
    ep.c7 = cfg.energy.c7;
    ep.witness = witness;

    // snapshot step indices: first step time at or past each requested time
    std::vector<long> snap_steps;
    for (double ts : cfg.solver.snapshots)
        snap_steps.push_back(static_cast<long>(std::ceil(ts / dt - 1e-9)));

    try {
        for (long n = 0; n <= steps; ++n) {
            sim.advance();
            if (n % cfg.solver.output_every == 0 || n == steps)
                out.records.push_back(evaluate_energy(sim, ep));
            for (std::size_t k = 0; k < snap_steps.size(); ++k)
                if (snap_steps[k] == n)
                    out.snapshots.emplace_back(sim.time(), sim.displacement());
            if (n < steps) {
                sim.commit();
                if (sim.has_transport()) {
                    const double mm = sim.transport_mismatch_now();
                    out.max_transport_mismatch = std::max(out.max_transport_mismatch, mm);
                    if (sim.time() >= 2.0 * delay.upper())
                        out.settled_transport_mismatch =
                            std::max(out.settled_transport_mismatch, mm);
                }
            }
        }
    } catch (const divergence_error& e) {
        out.diverged = true;
        out.divergence_time = e.time;
        out.divergence_peak = e.peak;
    }

    out.monotone = check_monotone(out.records, cfg.energy.monotone_tol);

    out.fit_t0 = cfg.energy.t0.value_or(2.0 * delay.upper());
    try {
        out.fit = fit_decay(out.records, witness, out.fit_t0);
    } catch (const std::exception& e) {
        out.fit_failure = e.what();
    }
    try {
        out.sandwich = check_sandwich(out.records);
    } catch (const std::exception& e) {
        out.sandwich_failure = e.what();
    }
    return out;
}

} // namespace vds
