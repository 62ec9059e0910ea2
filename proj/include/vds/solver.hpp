#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "vds/convolution.hpp"
#include "vds/delay.hpp"
#include "vds/feasibility.hpp"
#include "vds/grid.hpp"
#include "vds/kernel.hpp"

namespace vds {

// The field blew past the divergence threshold (or stopped being finite).
struct divergence_error : std::runtime_error {
    double time;
    double peak;
    divergence_error(double t, double p)
        : std::runtime_error(make_message(t, p)), time(t), peak(p) {}

    static std::string make_message(double t, double p)
    {
        std::ostringstream os;
        os << "solution diverged at t = " << t << " (max |u| = " << p << ")";
        return os.str();
    }
};

struct InitialData {
    GridFunction u0;
    GridFunction u1;
    // prescribed velocity history on s in [-tau(0), 0); receives s, fills the field
    std::function<void(double, std::vector<double>&)> history;
};

struct SolverOptions {
    double dt = 0.0;
    ConvolutionEngine::Mode engine = ConvolutionEngine::Mode::recursive;
    bool transport_check = false;
    int n_rho = 64;
    double divergence_threshold = 1e12;
};

// Leapfrog time stepping of the delayed viscoelastic wave equation
//
//   u_tt = lap u - integral g(t-s) lap u(s) ds - a0 u_t(t) - a1 u_t(t - tau(t))
//
// with the a0 term folded in semi-implicitly (centered difference solved for
// u^{n+1}) and the memory and delay terms explicit. One step is advance()
// followed by commit(); the energy functionals read the state in between,
// when u, the centered velocity v, the accumulators, and the history buffer
// are all coherent at time().
class Simulation {
public:
    Simulation(const Grid& grid, const RelaxationKernel& kernel, const DelayProfile& delay,
               const DampingPair& damping, InitialData init, const SolverOptions& opt)
        : grid_(grid), kernel_(kernel), delay_(delay), damping_(damping), dt_(opt.dt),
          divergence_threshold_(opt.divergence_threshold),
          conv_(opt.engine, kernel, grid),
          buf_(grid.size(), opt.dt, delay.upper()),
          u_(std::move(init.u0)), v_(std::move(init.u1)), u_prev_(grid), u_next_(grid)
    {
        if (!(dt_ > 0.0))
            throw std::invalid_argument("solver: dt must be positive");
        if (dt_ > 0.5 * delay_.lower())
            throw std::invalid_argument("solver: dt must not exceed half the minimum delay");
        if (!(u_.grid() == grid_) || !(v_.grid() == grid_))
            throw std::invalid_argument("solver: initial data on the wrong grid");

        auto history = init.history;
        if (!history) {
            // default prescribed history: constant extension of the initial velocity
            history = [this](double, std::vector<double>& out) { out = v_.values(); };
        }
        const double measure = grid_.cell_measure();
        auto nrm = [measure](const std::vector<double>& w) {
            double s = 0.0;
            for (double x : w)
                s += x * x;
            return s * measure;
        };
        buf_.seed(delay_.value(0.0), history, v_.values(), nrm);

        lap_ = laplacian(u_);
        grad_ = gradient(u_);
        gradsq_ = grad_sq(grad_, grid_);
        conv_.initialize(u_, lap_, grad_, gradsq_, dt_);

        if (opt.transport_check) {
            transport_.emplace(grid_.size(), opt.n_rho);
            transport_->seed(delay_.value(0.0), history);
            const double worst_speed = (1.0 + delay_.slope_bound()) / delay_.lower();
            if (dt_ * worst_speed > transport_->drho() * (1.0 + 1e-12)) {
                std::ostringstream os;
                os << "solver: transport check CFL cannot hold over the run, dt*max_speed = "
                   << dt_ * worst_speed << " > drho = " << transport_->drho() << "; use n_rho <= "
                   << static_cast<int>(std::floor(1.0 / (dt_ * worst_speed)));
                throw cfl_error(os.str(), dt_ * worst_speed);
            }
        }
    }

    double dt() const { return dt_; }
    long step_index() const { return n_; }
    double time() const { return n_ * dt_; }

    const Grid& grid() const { return grid_; }
    const RelaxationKernel& kernel() const { return kernel_; }
    const DelayProfile& delay() const { return delay_; }
    const DampingPair& damping() const { return damping_; }

    // state at time(); velocity is the centered difference once advance() ran
    const GridFunction& displacement() const { return u_; }
    const GridFunction& velocity() const { return v_; }
    const GridFunction& displacement_laplacian() const { return lap_; }
    const GradientField& displacement_gradient() const { return grad_; }
    double displacement_grad_sq() const { return gradsq_; }

    const ConvolutionEngine& memory() const { return conv_; }
    const HistoryBuffer& history() const { return buf_; }

    bool has_transport() const { return transport_.has_value(); }
    const TransportField& transport() const { return *transport_; }
    // discrepancy between the two delay representations at the last committed step
    double transport_mismatch_now() const { return last_mismatch_; }

    // Energy functionals may be evaluated right after advance(), or before the
    // first step (where the centered velocity equals the initial velocity).
    bool observable() const { return advanced_ || n_ == 0; }

    // Compute u at the next step, the centered velocity at time(), and push the
    // velocity snapshot. Throws divergence_error past the threshold.
    void advance()
    {
        if (advanced_)
            throw std::logic_error("solver: advance() called twice without commit()");
        const double t = time();
        const double tau_t = delay_.value(t);
        const std::vector<double> v_delay = buf_.sample(t - tau_t);

        const double a0 = damping_.a0;
        const double a1 = damping_.a1;
        const double dt2 = dt_ * dt_;

        if (n_ == 0) {
            // second-order Taylor start; the centered velocity at t = 0 is u1
            GridFunction mem = kernel_.is_zero() ? GridFunction(grid_) : conv_.memory_force();
            for (std::size_t k = 0; k < u_.size(); ++k) {
                const double acc = lap_[k] - mem[k] - a0 * v_[k] - a1 * v_delay[k];
                u_next_[k] = u_[k] + dt_ * v_[k] + 0.5 * dt2 * acc;
            }
        } else {
            GridFunction mem = kernel_.is_zero() ? GridFunction(grid_) : conv_.memory_force();
            const double denom = 1.0 + 0.5 * a0 * dt_;
            const double wprev = 1.0 - 0.5 * a0 * dt_;
            for (std::size_t k = 0; k < u_.size(); ++k) {
                const double force = lap_[k] - mem[k] - a1 * v_delay[k];
                u_next_[k] = (2.0 * u_[k] - wprev * u_prev_[k] + dt2 * force) / denom;
            }
            const double inv2dt = 1.0 / (2.0 * dt_);
            for (std::size_t k = 0; k < u_.size(); ++k)
                v_[k] = (u_next_[k] - u_prev_[k]) * inv2dt;
            buf_.push(v_.values(), norm_sq(v_));
        }

        const double peak = u_next_.max_abs();
        if (!(peak <= divergence_threshold_))
            throw divergence_error(t + dt_, peak);
        advanced_ = true;
    }

    // Advance the accumulators, the transport checker, and the step counter.
    void commit()
    {
        if (!advanced_)
            throw std::logic_error("solver: commit() without advance()");
        GridFunction lap_next = laplacian(u_next_);
        GradientField grad_next = gradient(u_next_);
        const double gradsq_next = grad_sq(grad_next, grid_);
        conv_.advance(u_next_, lap_next, grad_next, gradsq_next);

        if (transport_ && n_ >= 1) {
            // bring z to the velocity frontier time() using the inflow v at time()
            const double t_prev = (n_ - 1) * dt_;
            transport_->advance(delay_.value(t_prev), delay_.slope(t_prev), v_.values(), dt_);
            last_mismatch_ = transport_mismatch(*transport_, buf_, time(), delay_.value(time()));
        }

        std::swap(u_prev_, u_);
        std::swap(u_, u_next_);
        lap_ = std::move(lap_next);
        grad_ = std::move(grad_next);
        gradsq_ = gradsq_next;
        ++n_;
        advanced_ = false;
    }

    void step()
    {
        advance();
        commit();
    }

private:
    Grid grid_;
    RelaxationKernel kernel_;
    DelayProfile delay_;
    DampingPair damping_;
    double dt_;
    double divergence_threshold_;

    ConvolutionEngine conv_;
    HistoryBuffer buf_;
    std::optional<TransportField> transport_;
    double last_mismatch_ = 0.0;

    GridFunction u_, v_, u_prev_, u_next_;
    GridFunction lap_;
    GradientField grad_;
    double gradsq_ = 0.0;

    long n_ = 0;
    bool advanced_ = false;
};

} // namespace vds
