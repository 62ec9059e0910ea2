#include <cmath>
#include <random>

#include <doctest.h>

#include "vds/delay.hpp"

using namespace vds;

namespace {

double scalar_norm(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return s;
}

} // namespace

TEST_CASE("delay profiles: bounds, slopes, and constructor guards")
{
    auto c = DelayProfile::constant(0.8);
    CHECK(c.value(17.0) == 0.8);
    CHECK(c.slope(17.0) == 0.0);
    CHECK(c.lower() == 0.8);
    CHECK(c.upper() == 0.8);
    CHECK(c.slope_bound() == 0.0);

    auto s = DelayProfile::sinusoidal(1.0, 0.3, 1.0);
    CHECK(s.lower() == doctest::Approx(0.7));
    CHECK(s.upper() == doctest::Approx(1.3));
    CHECK(s.slope_bound() == doctest::Approx(0.3));
    for (double t : {0.0, 0.4, 2.9}) {
        CHECK(s.value(t) == doctest::Approx(1.0 + 0.3 * std::sin(t)));
        CHECK(s.value(t) >= s.lower());
        CHECK(s.value(t) <= s.upper());
        CHECK(s.slope(t) <= s.slope_bound() + 1e-15);
    }

    CHECK_THROWS_AS(DelayProfile::constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DelayProfile::sinusoidal(1.0, 1.0, 1.0), std::invalid_argument); // tau hits 0
    CHECK_THROWS_AS(DelayProfile::sinusoidal(2.0, 1.5, 0.8), std::invalid_argument); // d = 1.2
}

TEST_CASE("seeded buffer reproduces the prescribed history")
{
    const double dt = 0.125, tau0 = 1.0;
    SUBCASE("zero history")
    {
        HistoryBuffer buf(4, dt, tau0);
        buf.seed(tau0, [](double, std::vector<double>& v) { v.assign(4, 0.0); },
                 std::vector<double>(4, 0.0), scalar_norm);
        for (double s : {-1.0, -0.5, -0.125, 0.0})
            for (double x : buf.sample(s))
                CHECK(x == 0.0);
    }
    SUBCASE("constant extension of the initial velocity")
    {
        const std::vector<double> u1{1.0, -2.0, 0.5};
        HistoryBuffer buf(3, dt, tau0);
        buf.seed(tau0, [&](double, std::vector<double>& v) { v = u1; }, u1, scalar_norm);
        CHECK(buf.sample(-0.5) == u1);
        CHECK(buf.sample(0.0) == u1);
        CHECK(buf.norm_sq_at(0) == doctest::Approx(scalar_norm(u1)));
    }
    SUBCASE("exponentially scaled history is sampled pointwise")
    {
        const std::vector<double> u1{2.0, 4.0};
        HistoryBuffer buf(2, dt, tau0);
        buf.seed(tau0,
                 [&](double s, std::vector<double>& v) {
                     v.resize(2);
                     for (std::size_t i = 0; i < 2; ++i)
                         v[i] = std::exp(s) * u1[i];
                 },
                 u1, scalar_norm);
        const auto mid = buf.sample(-tau0 / 2.0); // on the grid: 4 steps back
        CHECK(mid[0] == doctest::Approx(std::exp(-0.5) * 2.0).epsilon(1e-15));
        CHECK(mid[1] == doctest::Approx(std::exp(-0.5) * 4.0).epsilon(1e-15));
    }
}

TEST_CASE("buffer lookups: exact on grid times, linear in between")
{
    const double dt = 0.25;
    HistoryBuffer buf(1, dt, 3.0); // room to query the whole pushed window
    // v(s) = s on a single-entry field
    buf.seed(1.0, [](double s, std::vector<double>& v) { v.assign(1, s); },
             std::vector<double>{0.0}, scalar_norm);
    for (int j = 1; j <= 8; ++j)
        buf.push({j * dt}, j * dt * j * dt);

    // exact hit
    CHECK(buf.sample(0.5)[0] == 0.5);
    // midpoint of linear data is reproduced exactly by linear interpolation
    CHECK(buf.sample(0.625)[0] == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(buf.sample(-0.375)[0] == doctest::Approx(-0.375).epsilon(1e-14));
}

TEST_CASE("buffer interpolation error is second order on a smooth history")
{
    const double dt = 1e-3;
    HistoryBuffer buf(1, dt, 0.2);
    buf.seed(0.1, [](double s, std::vector<double>& v) { v.assign(1, std::sin(s)); },
             std::vector<double>{0.0}, scalar_norm);
    for (int j = 1; j <= 150; ++j)
        buf.push({std::sin(j * dt)}, 0.0);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-0.05, 0.14);
    for (int trial = 0; trial < 200; ++trial) {
        const double s = u(rng);
        CHECK(std::abs(buf.sample(s)[0] - std::sin(s)) < 1e-6); // ~dt^2/8 plus slack
    }
}

TEST_CASE("out-of-range lookups raise coverage errors")
{
    HistoryBuffer buf(1, 0.1, 0.5);
    buf.seed(0.5, [](double, std::vector<double>& v) { v.assign(1, 1.0); },
             std::vector<double>{1.0}, scalar_norm);
    CHECK_THROWS_AS(buf.sample(-0.61), coverage_error);
    CHECK_THROWS_AS(buf.sample(0.2), coverage_error); // beyond newest
    CHECK_NOTHROW(buf.sample(-0.5));
    CHECK_NOTHROW(buf.sample(0.0));
}

TEST_CASE("ring eviction keeps exactly the capacity and the newest window")
{
    const double dt = 0.1, tau_max = 0.5;
    HistoryBuffer buf(1, dt, tau_max); // capacity = ceil(5) + 2 = 7
    CHECK(buf.capacity() == 7);
    buf.seed(tau_max, [](double s, std::vector<double>& v) { v.assign(1, s); },
             std::vector<double>{0.0}, scalar_norm);
    for (int j = 1; j <= 50; ++j)
        buf.push({j * dt}, 0.0);
    CHECK(buf.newest_index() == 50);
    CHECK(buf.oldest_index() == 44);
    CHECK(buf.sample(4.4)[0] == doctest::Approx(4.4));
    CHECK_THROWS_AS(buf.sample(4.29), coverage_error);
}

TEST_CASE("norm scalars stored with each snapshot stay consistent")
{
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    HistoryBuffer buf(8, 0.05, 0.3);
    buf.seed(0.3, [&](double, std::vector<double>& v) { v.assign(8, 0.25); },
             std::vector<double>(8, 0.5), scalar_norm);
    for (int j = 1; j <= 20; ++j) {
        std::vector<double> v(8);
        for (auto& x : v)
            x = u(rng);
        buf.push(v, scalar_norm(v));
    }
    for (auto idx = buf.oldest_index(); idx <= buf.newest_index(); ++idx)
        CHECK(buf.norm_sq_at(idx) == doctest::Approx(scalar_norm(buf.field_at(idx))).epsilon(1e-14));
}

TEST_CASE("transport: constant state is an exact fixed point")
{
    TransportField z(3, 16);
    z.seed(1.0, [](double, std::vector<double>& v) { v.assign(3, 2.5); });
    const std::vector<double> inflow(3, 2.5);
    for (int n = 0; n < 40; ++n)
        z.advance(1.0, 0.0, inflow, 0.05);
    for (int m = 0; m <= 16; ++m)
        for (double x : z.layer(m))
            CHECK(x == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("transport outlet converges to the lagged inflow for constant delay")
{
    // inflow v(t) = sin(t); after the fill-in, z(., 1, t) ~ v(t - tau)
    const double tau = 1.0;
    auto run = [&](int n_rho, double dt) {
        TransportField z(1, n_rho);
        z.seed(tau, [](double s, std::vector<double>& v) { v.assign(1, std::sin(s)); });
        double worst = 0.0;
        const int steps = static_cast<int>(std::round(6.0 / dt));
        for (int n = 1; n <= steps; ++n) {
            const double t = n * dt;
            z.advance(tau, 0.0, {std::sin(t)}, dt);
            if (t > 2.0 * tau)
                worst = std::max(worst, std::abs(z.outlet()[0] - std::sin(t - tau)));
        }
        return worst;
    };
    const double coarse = run(32, 1.0 / 64.0);
    const double fine = run(64, 1.0 / 128.0);
    CHECK(coarse < 0.05);
    const double ratio = coarse / fine;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.5);
}

TEST_CASE("transport clears injected content within the characteristic exit time")
{
    // zero inflow, theta = 0.9: essentially everything is flushed by t = 2 tau
    const double tau = 1.0;
    const int n_rho = 64;
    const double dt = 0.9 / n_rho * tau;
    TransportField z(1, n_rho);
    z.seed(tau, [](double, std::vector<double>& v) { v.assign(1, 1.0); });
    const std::vector<double> inflow{0.0};
    const int steps = static_cast<int>(std::ceil(2.0 * tau / dt));
    for (int n = 0; n < steps; ++n)
        z.advance(tau, 0.0, inflow, dt);
    double peak = 0.0;
    for (int m = 0; m <= n_rho; ++m)
        peak = std::max(peak, std::abs(z.layer(m)[0]));
    CHECK(peak < 1e-10);
}

TEST_CASE("transport updates are monotone: no new extrema")
{
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto profile = DelayProfile::sinusoidal(1.0, 0.3, 1.0);
    TransportField z(4, 24);
    z.seed(profile.value(0.0),
           [&](double, std::vector<double>& v) { for (auto& x : v) x = u(rng); });
    const double dt = 0.01;
    for (int n = 0; n < 300; ++n) {
        double lo = 1e300, hi = -1e300;
        for (int m = 0; m <= 24; ++m)
            for (double x : z.layer(m)) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        std::vector<double> inflow(4);
        for (auto& x : inflow)
            x = u(rng);
        for (double x : inflow) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        const double t = n * dt;
        z.advance(profile.value(t), profile.slope(t), inflow, dt);
        for (int m = 0; m <= 24; ++m)
            for (double x : z.layer(m)) {
                CHECK(x >= lo - 1e-14);
                CHECK(x <= hi + 1e-14);
            }
    }
}

TEST_CASE("transport and buffer agree after consistent seeding and on constants")
{
    const double tau = 0.5, dt = 0.02;
    auto f0 = [](double s, std::vector<double>& v) { v.assign(2, 1.0 + 0.5 * s); };
    HistoryBuffer buf(2, dt, tau);
    buf.seed(tau, f0, std::vector<double>{1.0, 1.0},
             [](const std::vector<double>& w) { return w[0] * w[0] + w[1] * w[1]; });
    TransportField z(2, 20);
    z.seed(tau, f0);
    // identical seeding: zero mismatch at t = 0
    CHECK(transport_mismatch(z, buf, 0.0, tau) < 1e-14);

    // constant-in-time solution stays at zero mismatch
    auto cf = [](double, std::vector<double>& v) { v.assign(2, 0.75); };
    HistoryBuffer cbuf(2, dt, tau);
    cbuf.seed(tau, cf, std::vector<double>{0.75, 0.75},
              [](const std::vector<double>& w) { return w[0] * w[0] + w[1] * w[1]; });
    TransportField cz(2, 20);
    cz.seed(tau, cf);
    const std::vector<double> inflow(2, 0.75);
    for (int n = 1; n <= 30; ++n) {
        cz.advance(tau, 0.0, inflow, dt);
        cbuf.push(inflow, 2.0 * 0.75 * 0.75);
        CHECK(transport_mismatch(cz, cbuf, n * dt, tau) < 1e-14);
    }
}

TEST_CASE("transport rejects steps that violate the cfl bound")
{
    TransportField z(1, 64);
    z.seed(0.5, [](double, std::vector<double>& v) { v.assign(1, 0.0); });
    // speed 2, drho = 1/64: dt must stay below 1/128
    CHECK_THROWS_AS(z.advance(0.5, 0.0, {0.0}, 0.01), cfl_error);
    CHECK_NOTHROW(z.advance(0.5, 0.0, {0.0}, 0.007));
}
