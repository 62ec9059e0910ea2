#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "vds/solver.hpp"

using namespace vds;

namespace {

constexpr double pi = 3.14159265358979323846;

Simulation make_sim(const Grid& g, const RelaxationKernel& kernel, const DelayProfile& delay,
                    const DampingPair& damping, const GridFunction& u0, const GridFunction& u1,
                    double dt, ConvolutionEngine::Mode mode = ConvolutionEngine::Mode::recursive)
{
    SolverOptions opt;
    opt.dt = dt;
    opt.engine = mode;
    return Simulation(g, kernel, delay, damping, InitialData{u0, u1, nullptr}, opt);
}

} // namespace

TEST_CASE("zero initial data stays identically zero")
{
    Grid g = Grid::interval(1.0, 32);
    auto sim = make_sim(g, RelaxationKernel::prony({{0.5, 1.0}}), DelayProfile::constant(1.0),
                        DampingPair(1.0, 0.5), GridFunction(g), GridFunction(g), 0.01);
    for (int n = 0; n < 300; ++n) {
        sim.step();
        CHECK(sim.displacement().max_abs() == 0.0);
        CHECK(sim.velocity().max_abs() == 0.0);
    }
}

TEST_CASE("undamped memoryless eigenmode follows cos(pi t) sin(pi x)")
{
    auto run_error = [&](int nx) {
        Grid g = Grid::interval(1.0, nx);
        GridFunction u0 =
            GridFunction::sample(g, [](double x, double) { return std::sin(pi * x); });
        // a time off the cosine extrema, so the phase error is visible at first order
        const double t_end = 1.25;
        const double dt_raw = 0.5 * g.spacing();
        const long steps = std::lround(std::ceil(t_end / dt_raw));
        const double dt = t_end / static_cast<double>(steps);
        auto sim = make_sim(g, RelaxationKernel::zero(), DelayProfile::constant(1.0),
                            DampingPair(0.0, 0.0), u0, GridFunction(g), dt);
        for (long n = 0; n < steps; ++n)
            sim.step();
        double err = 0.0;
        for (int i = 0; i < g.nx(); ++i)
            err = std::max(err,
                           std::abs(sim.displacement()[i] -
                                    std::cos(pi * t_end) * std::sin(pi * g.x(i))));
        return err;
    };
    const double coarse = run_error(63);
    const double fine = run_error(127);
    CHECK(coarse < 1e-3);
    CHECK(coarse / fine > 3.0); // second order: ~4x per halving
    CHECK(coarse / fine < 5.0);
}

TEST_CASE("undamped memoryless run nearly conserves the discrete energy")
{
    Grid g = Grid::interval(1.0, 128);
    GridFunction u0 = GridFunction::sample(g, [](double x, double) { return std::sin(pi * x); });
    const double dt = 0.5 * g.spacing();
    auto sim = make_sim(g, RelaxationKernel::zero(), DelayProfile::constant(1.0),
                        DampingPair(0.0, 0.0), u0, GridFunction(g), dt);
    auto energy = [&]() { return 0.5 * norm_sq(sim.velocity()) + 0.5 * sim.displacement_grad_sq(); };
    sim.advance();
    const double e0 = energy();
    sim.commit();
    double worst = 0.0;
    const long steps = std::lround(5.0 / dt);
    for (long n = 1; n <= steps; ++n) {
        sim.advance();
        worst = std::max(worst, std::abs(energy() - e0));
        sim.commit();
    }
    CHECK(worst / e0 < 1e-4);
}

TEST_CASE("damped wave matches the dense matrix exponential reference")
{
    // a1 = 0, g = 0: du/dt = v, dv/dt = lap u - a0 v on the interior points
    const int nx = 16;
    const double a0 = 0.8, t_end = 2.0;
    Grid g = Grid::interval(1.0, nx);
    GridFunction u0 = GridFunction::sample(g, [](double x, double) { return std::sin(pi * x); });
    GridFunction u1 =
        GridFunction::sample(g, [](double x, double) { return 0.3 * std::sin(2.0 * pi * x); });

    oracle::Matrix a(2 * nx);
    {
        const double ih2 = 1.0 / (g.spacing() * g.spacing());
        for (int i = 0; i < nx; ++i) {
            a(i, nx + i) = 1.0;
            a(nx + i, nx + i) = -a0;
            a(nx + i, i) = -2.0 * ih2;
            if (i > 0)
                a(nx + i, i - 1) = ih2;
            if (i + 1 < nx)
                a(nx + i, i + 1) = ih2;
        }
        for (auto& x : a.a)
            x *= t_end;
    }
    oracle::Matrix propagator = oracle::expm(a);
    std::vector<double> y0(2 * static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) {
        y0[i] = u0[i];
        y0[nx + i] = u1[i];
    }
    const std::vector<double> y_ref = oracle::apply(propagator, y0);

    const double dt_raw = 0.25 * g.spacing();
    const long steps = std::lround(std::ceil(t_end / dt_raw));
    const double dt = t_end / static_cast<double>(steps);
    auto sim = make_sim(g, RelaxationKernel::zero(), DelayProfile::constant(1.0),
                        DampingPair(a0, 0.0), u0, u1, dt);

    double prev_energy = -1.0;
    for (long n = 0; n < steps; ++n) {
        sim.advance();
        const double e = 0.5 * norm_sq(sim.velocity()) + 0.5 * sim.displacement_grad_sq();
        if (prev_energy >= 0.0)
            CHECK(e < prev_energy); // strictly decreasing with a0 > 0
        prev_energy = e;
        sim.commit();
    }
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < nx; ++i) {
        err = std::max(err, std::abs(sim.displacement()[i] - y_ref[i]));
        scale = std::max(scale, std::abs(y_ref[i]));
    }
    CHECK(scale > 1e-3); // the reference still has signal at t_end
    CHECK(err < 5e-4);   // O(dt^2) against the exact propagator
}

TEST_CASE("recursive and direct engines agree along a full delayed run")
{
    Grid g = Grid::interval(1.0, 48);
    GridFunction u0 = GridFunction::sample(g, [](double x, double) { return std::sin(pi * x); });
    auto kernel = RelaxationKernel::prony({{0.4, 1.5}});
    auto delay = DelayProfile::sinusoidal(0.5, 0.2, 1.0);
    const double dt = 0.02;

    auto rec = make_sim(g, kernel, delay, DampingPair(1.0, 0.4), u0, GridFunction(g), dt,
                        ConvolutionEngine::Mode::recursive);
    auto dir = make_sim(g, kernel, delay, DampingPair(1.0, 0.4), u0, GridFunction(g), dt,
                        ConvolutionEngine::Mode::direct);
    double force_scale = 0.0;
    for (int n = 0; n < 200; ++n) {
        rec.step();
        dir.step();
        GridFunction mr = rec.memory().memory_force();
        GridFunction md = dir.memory().memory_force();
        force_scale = std::max({force_scale, mr.max_abs(), md.max_abs()});
        double diff = 0.0;
        double udiff = 0.0;
        for (std::size_t i = 0; i < mr.size(); ++i) {
            diff = std::max(diff, std::abs(mr[i] - md[i]));
            udiff = std::max(udiff, std::abs(rec.displacement()[i] - dir.displacement()[i]));
        }
        if (force_scale > 0.0)
            CHECK(diff <= 1e-8 * force_scale);
        CHECK(udiff <= 1e-10); // the trajectories stay identical to rounding
    }
}

TEST_CASE("a1 = 0 reduces bitwise to the plain damped wave scheme")
{
    Grid g = Grid::interval(1.0, 32);
    GridFunction u0 = GridFunction::sample(g, [](double x, double) { return std::sin(pi * x); });
    GridFunction u1 = GridFunction::sample(g, [](double x, double) { return std::sin(2 * pi * x); });
    const double a0 = 0.7, dt = 0.01;
    auto sim = make_sim(g, RelaxationKernel::zero(), DelayProfile::constant(0.3),
                        DampingPair(a0, 0.0), u0, u1, dt);

    // reference loop: same scheme with the delay term absent
    GridFunction u = u0, u_prev(g), u_next(g);
    const long steps = 400;
    for (long n = 0; n < steps; ++n) {
        GridFunction lap = laplacian(u);
        if (n == 0) {
            for (std::size_t k = 0; k < u.size(); ++k)
                u_next[k] = u[k] + dt * u1[k] + 0.5 * dt * dt * (lap[k] - a0 * u1[k]);
        } else {
            const double denom = 1.0 + 0.5 * a0 * dt;
            const double wprev = 1.0 - 0.5 * a0 * dt;
            for (std::size_t k = 0; k < u.size(); ++k)
                u_next[k] = (2.0 * u[k] - wprev * u_prev[k] + dt * dt * lap[k]) / denom;
        }
        u_prev = u;
        u = u_next;

        sim.step();
        for (std::size_t k = 0; k < u.size(); ++k)
            CHECK(sim.displacement()[k] == u[k]); // bit identical
    }
}

TEST_CASE("divergence raises with the blowup time and peak")
{
    Grid g = Grid::interval(1.0, 24);
    GridFunction u0 = GridFunction::sample(g, [](double x, double) { return std::sin(pi * x); });
    SolverOptions opt;
    opt.dt = 0.02;
    opt.divergence_threshold = 1e6;
    // delayed anti-damping far beyond the interior damping
    Simulation sim(g, RelaxationKernel::zero(), DelayProfile::constant(0.5), DampingPair(0.05, 40.0),
                   InitialData{u0, GridFunction(g), nullptr}, opt);
    bool blew_up = false;
    try {
        for (int n = 0; n < 20000; ++n)
            sim.step();
    } catch (const divergence_error& e) {
        blew_up = true;
        CHECK(e.time > 0.0);
        CHECK(e.peak > 1e6);
    }
    CHECK(blew_up);
}

TEST_CASE("transport checker tracks the buffer on a smooth delayed run")
{
    Grid g = Grid::interval(1.0, 32);
    GridFunction u0 = GridFunction::sample(g, [](double x, double) { return std::sin(pi * x); });
    SolverOptions opt;
    opt.dt = 0.005;
    opt.transport_check = true;
    opt.n_rho = 32;
    Simulation sim(g, RelaxationKernel::prony({{0.3, 1.0}}), DelayProfile::constant(0.8),
                   DampingPair(1.0, 0.3), InitialData{u0, GridFunction(g), nullptr}, opt);
    // past t = 2 tau the start-up kink has left the rho domain and the
    // first-order checker tracks the sharp buffer closely
    double worst = 0.0;
    const long steps = std::lround(4.0 / opt.dt);
    for (long n = 0; n < steps; ++n) {
        sim.step();
        if (sim.time() >= 1.6)
            worst = std::max(worst, sim.transport_mismatch_now());
    }
    CHECK(worst < 0.2);
    CHECK(worst > 0.0);
}

TEST_CASE("transport checker refuses a resolution the step size cannot serve")
{
    Grid g = Grid::interval(1.0, 16);
    SolverOptions opt;
    opt.dt = 0.1;
    opt.transport_check = true;
    opt.n_rho = 64; // needs dt <= tau/64
    CHECK_THROWS_AS(Simulation(g, RelaxationKernel::zero(), DelayProfile::constant(1.0),
                               DampingPair(1.0, 0.0),
                               InitialData{GridFunction(g), GridFunction(g), nullptr}, opt),
                    cfl_error);
}
