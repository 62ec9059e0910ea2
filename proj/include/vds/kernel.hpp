#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace vds {

// One decaying-exponential mode of a Prony series: amplitude * exp(-rate * t).
struct PronyMode {
    double amplitude; // >= 0
    double rate;      // > 0
};

// Decay witness xi(t) paired with a relaxation kernel: positive, non-increasing,
// differentiable, with divergent integral. Constant form gives exponential
// energy decay, hyperbolic a/(1+t) gives polynomial decay.
class DecayWitness {
public:
    enum class Form { constant, hyperbolic };

    static DecayWitness constant(double a)
    {
        if (a <= 0.0)
            throw std::invalid_argument("witness: scale must be positive");
        return DecayWitness(Form::constant, a);
    }

    static DecayWitness hyperbolic(double a)
    {
        if (a <= 0.0)
            throw std::invalid_argument("witness: scale must be positive");
        return DecayWitness(Form::hyperbolic, a);
    }

    Form form() const { return form_; }
    double scale() const { return a_; }

    double value(double t) const
    {
        if (t < 0.0)
            throw std::domain_error("witness: negative time");
        return form_ == Form::constant ? a_ : a_ / (1.0 + t);
    }

    // closed-form integral of xi over [t0, t]
    double integral(double t0, double t) const
    {
        if (t0 < 0.0 || t < t0)
            throw std::domain_error("witness: bad integration window");
        if (form_ == Form::constant)
            return a_ * (t - t0);
        return a_ * std::log((1.0 + t) / (1.0 + t0));
    }

    bool operator==(const DecayWitness&) const = default;

private:
    DecayWitness(Form f, double a) : form_(f), a_(a) {}
    Form form_;
    double a_;
};

// Memory kernel g(t) of the viscoelastic convolution term. The catalog is
// restricted to forms with closed-form value, derivative, and tail mass:
// Prony sums, a power law g0*(1+t)^-p with p > 1, and the zero kernel
// (no memory at all). Constructors reject kernels whose total mass reaches 1,
// so the remaining elastic stiffness 1 - integral(g) stays positive.
class RelaxationKernel {
public:
    enum class Form { prony, power_law, zero };

    static RelaxationKernel prony(std::vector<PronyMode> modes)
    {
        if (modes.empty())
            throw std::invalid_argument("kernel: prony series needs at least one mode");
        double positive = 0.0;
        for (const auto& m : modes) {
            if (m.amplitude < 0.0)
                throw std::invalid_argument("kernel: prony amplitudes must be >= 0");
            if (m.rate <= 0.0)
                throw std::invalid_argument("kernel: prony rates must be > 0");
            positive += m.amplitude;
        }
        if (positive <= 0.0)
            throw std::invalid_argument("kernel: prony series is identically zero; use the zero form");
        RelaxationKernel k;
        k.form_ = Form::prony;
        k.modes_ = std::move(modes);
        k.require_positive_stiffness();
        return k;
    }

    static RelaxationKernel power_law(double g0, double p)
    {
        if (g0 <= 0.0)
            throw std::invalid_argument("kernel: power-law amplitude must be > 0");
        if (p <= 1.0)
            throw std::invalid_argument("kernel: power-law exponent must be > 1");
        RelaxationKernel k;
        k.form_ = Form::power_law;
        k.g0_ = g0;
        k.p_ = p;
        k.require_positive_stiffness();
        return k;
    }

    static RelaxationKernel zero()
    {
        RelaxationKernel k;
        k.form_ = Form::zero;
        return k;
    }

    Form form() const { return form_; }
    bool is_zero() const { return form_ == Form::zero; }
    const std::vector<PronyMode>& modes() const { return modes_; }
    double power_amplitude() const { return g0_; }
    double power_exponent() const { return p_; }

    // g(t)
    double value(double t) const
    {
        check_time(t);
        switch (form_) {
        case Form::zero:
            return 0.0;
        case Form::prony: {
            double s = 0.0;
            for (const auto& m : modes_)
                s += m.amplitude * std::exp(-m.rate * t);
            return s;
        }
        case Form::power_law:
        default:
            return g0_ * std::pow(1.0 + t, -p_);
        }
    }

    // g'(t)
    double derivative(double t) const
    {
        check_time(t);
        switch (form_) {
        case Form::zero:
            return 0.0;
        case Form::prony: {
            double s = 0.0;
            for (const auto& m : modes_)
                s -= m.amplitude * m.rate * std::exp(-m.rate * t);
            return s;
        }
        case Form::power_law:
        default:
            return -p_ * g0_ * std::pow(1.0 + t, -p_ - 1.0);
        }
    }

    // integral of g over [t, infinity), closed form
    double mass_tail(double t) const
    {
        check_time(t);
        switch (form_) {
        case Form::zero:
            return 0.0;
        case Form::prony: {
            double s = 0.0;
            for (const auto& m : modes_)
                s += m.amplitude / m.rate * std::exp(-m.rate * t);
            return s;
        }
        case Form::power_law:
        default:
            return g0_ / (p_ - 1.0) * std::pow(1.0 + t, 1.0 - p_);
        }
    }

    double total_mass() const { return form_ == Form::zero ? 0.0 : mass_tail(0.0); }

    // integral of g over [0, t]
    double mass_upto(double t) const { return total_mass() - mass_tail(t); }

    // remaining elastic stiffness l = 1 - integral(g) > 0
    double stiffness_floor() const { return 1.0 - total_mass(); }

    // The sharpest cataloged witness: constant at the slowest Prony rate,
    // hyperbolic at the power-law exponent. The zero kernel has no memory to
    // witness; a unit constant is returned for decay fitting of such runs.
    DecayWitness canonical_witness() const
    {
        switch (form_) {
        case Form::prony: {
            double a = modes_.front().rate;
            for (const auto& m : modes_)
                a = std::min(a, m.rate);
            return DecayWitness::constant(a);
        }
        case Form::power_law:
            return DecayWitness::hyperbolic(p_);
        case Form::zero:
        default:
            return DecayWitness::constant(1.0);
        }
    }

    bool operator==(const RelaxationKernel&) const = default;

private:
    RelaxationKernel() = default;

    static void check_time(double t)
    {
        if (t < 0.0)
            throw std::domain_error("kernel: negative time");
    }

    void require_positive_stiffness() const
    {
        if (stiffness_floor() <= 0.0)
            throw std::invalid_argument("kernel: total mass must stay below 1 "
                                        "(remaining stiffness would not be positive)");
    }

    Form form_ = Form::zero;
    std::vector<PronyMode> modes_;
    double g0_ = 0.0;
    double p_ = 2.0;
};

struct WitnessCheck {
    bool holds = true;
    double violation_time = 0.0; // first sampled time where g' > -xi*g
    double worst_excess = 0.0;   // max of g' + xi*g over the samples (<= 0 when holds)
};

// Verify g'(t) <= -xi(t) g(t) on a sample grid using the closed forms.
// Equality cases are admitted up to a rounding slack; the absolute floor keeps
// subnormal kernel values from tripping the comparison.
inline WitnessCheck check_decay_witness(const RelaxationKernel& k, const DecayWitness& w,
                                        std::span<const double> times)
{
    if (k.is_zero())
        throw std::invalid_argument("witness check: not applicable to the zero kernel");
    WitnessCheck r;
    bool first = true;
    for (double t : times) {
        const double gp = k.derivative(t);
        const double xg = w.value(t) * k.value(t);
        const double excess = gp + xg;
        r.worst_excess = std::max(r.worst_excess, excess);
        const double slack = 1e-12 * (std::abs(gp) + xg) + 1e-300;
        if (excess > slack && first) {
            r.holds = false;
            r.violation_time = t;
            first = false;
        }
    }
    return r;
}

// Log-spaced sample times on [0, t_max]: uniform in log(1+t), starting at 0.
inline std::vector<double> log_spaced_times(double t_max, int n)
{
    if (t_max <= 0.0 || n < 2)
        throw std::invalid_argument("log_spaced_times: need t_max > 0 and n >= 2");
    std::vector<double> t(n);
    const double l = std::log1p(t_max);
    for (int i = 0; i < n; ++i)
        t[i] = std::expm1(l * i / (n - 1));
    t.back() = t_max;
    return t;
}

} // namespace vds
