#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vds/grid.hpp"
#include "vds/kernel.hpp"

namespace vds {

// Running convolutions of the memory kernel against the trajectory. Tracks,
// at the current step time t_n, the weighted histories
//
//   integral over [0, t_n] of g(t_n - s) * {lap u(s), u(s), grad u(s), |grad u(s)|^2, 1} ds
//
// under a common quadrature: composite trapezoid on the step grid applied to
// the full product. The recursive mode (Prony kernels only) propagates each
// exponential mode exactly between steps and is O(1) per step; the direct mode
// keeps the whole history and re-sums on demand, which works for any kernel.
// Both modes carry identical quadrature weights, so they agree to rounding.
class ConvolutionEngine {
public:
    enum class Mode { recursive, direct };

    ConvolutionEngine(Mode mode, const RelaxationKernel& kernel, const Grid& grid)
        : mode_(mode), kernel_(kernel), grid_(grid)
    {
        if (mode == Mode::recursive && kernel.form() == RelaxationKernel::Form::power_law)
            throw std::invalid_argument("convolution: recursive mode requires a Prony kernel");
        if (mode_ == Mode::recursive && !kernel_.is_zero()) {
            modes_.resize(kernel_.modes().size());
            for (auto& m : modes_) {
                m.lap_acc = GridFunction(grid_);
                m.u_acc = GridFunction(grid_);
                m.grad_acc = GradientField(grid_);
            }
        }
    }

    Mode mode() const { return mode_; }
    double dt() const { return dt_; }
    double time() const { return steps_ * dt_; }

    // Cache the integrand at t = 0; no history has accumulated yet.
    void initialize(const GridFunction& u, const GridFunction& lap_u, const GradientField& grad_u,
                    double grad_sq_u, double dt)
    {
        if (!(dt > 0.0))
            throw std::invalid_argument("convolution: dt must be positive");
        dt_ = dt;
        steps_ = 0;
        if (kernel_.is_zero())
            return;
        if (mode_ == Mode::recursive) {
            prev_u_ = u;
            prev_lap_ = lap_u;
            prev_grad_ = grad_u;
            prev_gradsq_ = grad_sq_u;
        } else {
            hist_u_.assign(1, u);
            hist_lap_.assign(1, lap_u);
            hist_grad_.assign(1, grad_u);
            hist_gradsq_.assign(1, grad_sq_u);
        }
    }

    // Append the integrand at the next step time.
    void advance(const GridFunction& u, const GridFunction& lap_u, const GradientField& grad_u,
                 double grad_sq_u)
    {
        ++steps_;
        if (kernel_.is_zero())
            return;
        if (mode_ == Mode::direct) {
            hist_u_.push_back(u);
            hist_lap_.push_back(lap_u);
            hist_grad_.push_back(grad_u);
            hist_gradsq_.push_back(grad_sq_u);
            return;
        }
        const auto& km = kernel_.modes();
        for (std::size_t i = 0; i < km.size(); ++i) {
            ModeState& m = modes_[i];
            const double decay = std::exp(-km[i].rate * dt_);
            const double wa = 0.5 * dt_ * km[i].amplitude * decay; // weight of the old endpoint
            const double wb = 0.5 * dt_ * km[i].amplitude;         // weight of the new endpoint
            for (std::size_t k = 0; k < m.lap_acc.size(); ++k) {
                m.lap_acc[k] = decay * m.lap_acc[k] + wa * prev_lap_[k] + wb * lap_u[k];
                m.u_acc[k] = decay * m.u_acc[k] + wa * prev_u_[k] + wb * u[k];
            }
            for (std::size_t k = 0; k < m.grad_acc.gx.size(); ++k)
                m.grad_acc.gx[k] = decay * m.grad_acc.gx[k] + wa * prev_grad_.gx[k] + wb * grad_u.gx[k];
            for (std::size_t k = 0; k < m.grad_acc.gy.size(); ++k)
                m.grad_acc.gy[k] = decay * m.grad_acc.gy[k] + wa * prev_grad_.gy[k] + wb * grad_u.gy[k];
            m.gradsq_acc = decay * m.gradsq_acc + wa * prev_gradsq_ + wb * grad_sq_u;
            m.mass_acc = decay * m.mass_acc + wa + wb;
        }
        prev_u_ = u;
        prev_lap_ = lap_u;
        prev_grad_ = grad_u;
        prev_gradsq_ = grad_sq_u;
    }

    // History of the Laplacian: the memory force entering the momentum balance.
    GridFunction memory_force() const
    {
        GridFunction out(grid_);
        if (kernel_.is_zero() || steps_ == 0)
            return out;
        if (mode_ == Mode::recursive) {
            for (const auto& m : modes_)
                for (std::size_t k = 0; k < out.size(); ++k)
                    out[k] += m.lap_acc[k];
            return out;
        }
        for_each_weight([&](std::size_t j, double w) {
            const GridFunction& lj = hist_lap_[j];
            for (std::size_t k = 0; k < out.size(); ++k)
                out[k] += w * lj[k];
        });
        return out;
    }

    // Quadrature mass: the same weighted sum applied to the constant 1.
    double history_mass() const
    {
        if (kernel_.is_zero() || steps_ == 0)
            return 0.0;
        double s = 0.0;
        if (mode_ == Mode::recursive) {
            for (const auto& m : modes_)
                s += m.mass_acc;
            return s;
        }
        for_each_weight([&](std::size_t, double w) { s += w; });
        return s;
    }

    GridFunction displacement_history() const
    {
        GridFunction out(grid_);
        if (kernel_.is_zero() || steps_ == 0)
            return out;
        if (mode_ == Mode::recursive) {
            for (const auto& m : modes_)
                for (std::size_t k = 0; k < out.size(); ++k)
                    out[k] += m.u_acc[k];
            return out;
        }
        for_each_weight([&](std::size_t j, double w) {
            const GridFunction& uj = hist_u_[j];
            for (std::size_t k = 0; k < out.size(); ++k)
                out[k] += w * uj[k];
        });
        return out;
    }

    GradientField gradient_history() const
    {
        GradientField out(grid_);
        if (kernel_.is_zero() || steps_ == 0)
            return out;
        if (mode_ == Mode::recursive) {
            for (const auto& m : modes_) {
                for (std::size_t k = 0; k < out.gx.size(); ++k)
                    out.gx[k] += m.grad_acc.gx[k];
                for (std::size_t k = 0; k < out.gy.size(); ++k)
                    out.gy[k] += m.grad_acc.gy[k];
            }
            return out;
        }
        for_each_weight([&](std::size_t j, double w) {
            const GradientField& gj = hist_grad_[j];
            for (std::size_t k = 0; k < out.gx.size(); ++k)
                out.gx[k] += w * gj.gx[k];
            for (std::size_t k = 0; k < out.gy.size(); ++k)
                out.gy[k] += w * gj.gy[k];
        });
        return out;
    }

    double gradient_norm_history() const
    {
        if (kernel_.is_zero() || steps_ == 0)
            return 0.0;
        double s = 0.0;
        if (mode_ == Mode::recursive) {
            for (const auto& m : modes_)
                s += m.gradsq_acc;
            return s;
        }
        for_each_weight([&](std::size_t j, double w) { s += w * hist_gradsq_[j]; });
        return s;
    }

private:
    struct ModeState {
        GridFunction lap_acc;
        GridFunction u_acc;
        GradientField grad_acc;
        double gradsq_acc = 0.0;
        double mass_acc = 0.0;
    };

    // Trapezoid weights on the step grid times the kernel at the lag.
    template <class F> void for_each_weight(F&& f) const
    {
        const double t_now = time();
        for (std::size_t j = 0; j <= static_cast<std::size_t>(steps_); ++j) {
            const double base = (j == 0 || j == static_cast<std::size_t>(steps_)) ? 0.5 * dt_ : dt_;
            f(j, base * kernel_.value(t_now - j * dt_));
        }
    }

    Mode mode_;
    RelaxationKernel kernel_;
    Grid grid_;
    double dt_ = 0.0;
    long steps_ = 0;

    // recursive state
    std::vector<ModeState> modes_;
    GridFunction prev_u_, prev_lap_;
    GradientField prev_grad_;
    double prev_gradsq_ = 0.0;

    // direct state
    std::vector<GridFunction> hist_u_, hist_lap_;
    std::vector<GradientField> hist_grad_;
    std::vector<double> hist_gradsq_;
};

} // namespace vds
