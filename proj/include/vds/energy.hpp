#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "vds/delay.hpp"
#include "vds/kernel.hpp"
#include "vds/solver.hpp"

namespace vds {

// Weights of the energy functional and the Lyapunov diagnostics. xi_weight and
// lambda come from a feasibility certificate; big_n and eps only need to be
// "large" and "small" and are reported alongside the estimates they produce.
struct EnergyParams {
    double xi_weight = 1.0;
    double lambda = 0.5;
    double big_n = 10.0;
    double eps = 0.01;
    double c7 = 1.0; // surrogate constant in the composite F
    DecayWitness witness = DecayWitness::constant(1.0);
};

// One output row: the energy, its four constituents, and the Lyapunov values.
struct EnergyRecord {
    double t = 0.0;
    double E = 0.0;
    double kinetic = 0.0;
    double elastic = 0.0;
    double memory = 0.0;
    double delay = 0.0;
    double I = 0.0; // displacement-velocity correlation
    double K = 0.0; // velocity against the weighted displacement history
    double L = 0.0; // big_n * E + eps * I + K
    double F = 0.0; // witness(t) * L + c7 * E
};

// Trapezoid of e^{lambda (s - t)} * |v(s)|^2 over [t - tau, t] on the buffered
// scalars, with a linearly interpolated partial cell at the lower end.
inline double delayed_norm_integral(const HistoryBuffer& buf, double t, double tau, double lambda)
{
    const double dt = buf.dt();
    const double s_lo = t - tau;
    const auto n = static_cast<std::int64_t>(std::llround(t / dt));
    const double r = s_lo / dt;
    auto j0 = static_cast<std::int64_t>(std::ceil(r - 1e-9));
    if (j0 > n)
        j0 = n;

    auto weight = [&](std::int64_t j) { return std::exp(lambda * (j * dt - t)); };
    double sum = 0.0;
    for (std::int64_t j = j0; j < n; ++j)
        sum += 0.5 * dt * (weight(j) * buf.norm_sq_at(j) + weight(j + 1) * buf.norm_sq_at(j + 1));

    const double head = j0 * dt - s_lo;
    if (head > 1e-12 * dt) {
        const double q_lo = buf.sample_norm_sq(s_lo);
        sum += 0.5 * head * (std::exp(lambda * (s_lo - t)) * q_lo + weight(j0) * buf.norm_sq_at(j0));
    }
    return sum;
}

// Evaluate the energy and its constituents on an observable simulation state.
// The memory part expands the weighted history quadratic form through the
// engine's accumulators; all three pieces of the expansion share one
// quadrature, so the part is nonnegative to rounding.
inline EnergyRecord evaluate_energy(const Simulation& sim, const EnergyParams& p)
{
    if (!sim.observable())
        throw std::logic_error("energy: evaluate between advance() and commit()");
    EnergyRecord r;
    r.t = sim.time();

    const GridFunction& u = sim.displacement();
    const GridFunction& v = sim.velocity();
    const RelaxationKernel& kernel = sim.kernel();
    const ConvolutionEngine& conv = sim.memory();
    const double gsq = sim.displacement_grad_sq();

    r.kinetic = 0.5 * norm_sq(v);
    r.elastic = 0.5 * (1.0 - kernel.mass_upto(r.t)) * gsq;

    const double hist_mass = conv.history_mass();
    if (!kernel.is_zero() && sim.step_index() > 0) {
        const double cross = inner(sim.displacement_gradient(), conv.gradient_history(), sim.grid());
        r.memory = 0.5 * (hist_mass * gsq - 2.0 * cross + conv.gradient_norm_history());
        r.K = -(hist_mass * inner(v, u) - inner(v, conv.displacement_history()));
    }

    const double tau_t = sim.delay().value(r.t);
    r.delay = 0.5 * p.xi_weight * delayed_norm_integral(sim.history(), r.t, tau_t, p.lambda);

    r.E = r.kinetic + r.elastic + r.memory + r.delay;
    r.I = inner(u, v);
    r.L = p.big_n * r.E + p.eps * r.I + r.K;
    r.F = p.witness.value(r.t) * r.L + p.c7 * r.E;
    return r;
}

struct MonotoneReport {
    double max_uptick_rel = 0.0; // max of (E_{j+1} - E_j)+ relative to E(0)
    double tol = 1e-8;
    bool pass = true;
};

inline MonotoneReport check_monotone(std::span<const EnergyRecord> series, double tol = 1e-8)
{
    MonotoneReport rep;
    rep.tol = tol;
    if (series.size() < 2)
        return rep;
    const double scale = series.front().E > 0.0 ? series.front().E : 1.0;
    for (std::size_t j = 0; j + 1 < series.size(); ++j) {
        const double up = series[j + 1].E - series[j].E;
        if (up > 0.0)
            rep.max_uptick_rel = std::max(rep.max_uptick_rel, up / scale);
    }
    rep.pass = rep.max_uptick_rel <= tol;
    return rep;
}

struct insufficient_signal_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SandwichEstimate {
    double beta1 = 0.0; // min of L/E over the usable outputs
    double beta2 = 0.0; // max of L/E
    std::size_t n_used = 0;
    bool pass = false; // beta1 > 0
};

// Ratio statistics of the Lyapunov functional against the energy, over the
// outputs where E is above e_floor_rel * E(0).
inline SandwichEstimate check_sandwich(std::span<const EnergyRecord> series,
                                       double e_floor_rel = 1e-12)
{
    if (series.empty())
        throw insufficient_signal_error("sandwich: empty series");
    const double floor = e_floor_rel * series.front().E;
    SandwichEstimate est;
    bool first = true;
    for (const auto& rec : series) {
        if (!(rec.E > floor) || rec.E <= 0.0)
            continue;
        const double ratio = rec.L / rec.E;
        if (first) {
            est.beta1 = est.beta2 = ratio;
            first = false;
        } else {
            est.beta1 = std::min(est.beta1, ratio);
            est.beta2 = std::max(est.beta2, ratio);
        }
        ++est.n_used;
    }
    if (est.n_used == 0)
        throw insufficient_signal_error("sandwich: no outputs with E above the floor");
    est.pass = est.beta1 > 0.0;
    return est;
}

struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Least-squares line through log E against the integrated witness.
struct DecayFit {
    double K_fit = 0.0;
    double k_fit = 0.0;
    double r2 = 0.0;
    double t0 = 0.0;
    std::size_t n_points = 0;
};

// Fit log E(t) = log K - k * X(t) with X(t) the closed-form integral of the
// witness from t0; constant witnesses give an exponential fit in t, hyperbolic
// ones a polynomial fit in 1 + t.
inline DecayFit fit_decay_series(std::span<const double> t, std::span<const double> E,
                                 const DecayWitness& witness, double t0,
                                 double t_end = std::numeric_limits<double>::infinity())
{
    if (t.size() != E.size())
        throw std::invalid_argument("fit: time and energy series differ in length");
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (t[j] < t0 - 1e-12 || t[j] > t_end + 1e-12)
            continue;
        if (!(E[j] > 0.0))
            throw fit_error("fit: nonpositive energy inside the window; start the window "
                            "after the ringdown to the noise floor");
        xs.push_back(witness.integral(t0, std::max(t[j], t0)));
        ys.push_back(std::log(E[j]));
    }
    if (xs.size() < 3)
        throw fit_error("fit: fewer than 3 outputs in the window");

    const auto n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        sx += xs[j];
        sy += ys[j];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double dx = xs[j] - mx, dy = ys[j] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0)
        throw fit_error("fit: degenerate window (witness integral does not vary)");

    const double slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double resid = (ys[j] - my) - slope * (xs[j] - mx);
        ss_res += resid * resid;
    }
    DecayFit fit;
    fit.k_fit = -slope;
    fit.K_fit = std::exp(my - slope * mx);
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.t0 = t0;
    fit.n_points = xs.size();
    return fit;
}

inline DecayFit fit_decay(std::span<const EnergyRecord> series, const DecayWitness& witness,
                          double t0, double t_end = std::numeric_limits<double>::infinity())
{
    std::vector<double> t, E;
    t.reserve(series.size());
    E.reserve(series.size());
    for (const auto& rec : series) {
        t.push_back(rec.t);
        E.push_back(rec.E);
    }
    return fit_decay_series(t, E, witness, t0, t_end);
}

} // namespace vds
