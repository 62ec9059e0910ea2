#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vds {

// Time-varying delay tau(t), either constant or center + amp*sin(omega*t).
// Bounds tau_lo, tau_hi and the slope bound d = amp*omega are closed form;
// construction rejects profiles that can stall (d >= 1) or vanish.
class DelayProfile {
public:
    enum class Form { constant, sinusoidal };

    static DelayProfile constant(double tau)
    {
        if (!(tau > 0.0))
            throw std::invalid_argument("delay: tau must be positive");
        DelayProfile p;
        p.form_ = Form::constant;
        p.center_ = tau;
        return p;
    }

    static DelayProfile sinusoidal(double center, double amplitude, double omega)
    {
        if (amplitude < 0.0)
            throw std::invalid_argument("delay: amplitude must be >= 0");
        if (omega < 0.0)
            throw std::invalid_argument("delay: omega must be >= 0");
        if (!(center - amplitude > 0.0))
            throw std::invalid_argument("delay: tau must stay positive (center - amp <= 0)");
        if (amplitude * omega >= 1.0)
            throw std::invalid_argument("delay: slope bound amp*omega must be < 1");
        DelayProfile p;
        p.form_ = Form::sinusoidal;
        p.center_ = center;
        p.amp_ = amplitude;
        p.omega_ = omega;
        return p;
    }

    Form form() const { return form_; }
    double center() const { return center_; }
    double amplitude() const { return amp_; }
    double omega() const { return omega_; }

    double value(double t) const
    {
        return form_ == Form::constant ? center_ : center_ + amp_ * std::sin(omega_ * t);
    }

    double slope(double t) const
    {
        return form_ == Form::constant ? 0.0 : amp_ * omega_ * std::cos(omega_ * t);
    }

    double lower() const { return form_ == Form::constant ? center_ : center_ - amp_; }
    double upper() const { return form_ == Form::constant ? center_ : center_ + amp_; }
    double slope_bound() const { return form_ == Form::constant ? 0.0 : amp_ * omega_; }

    bool operator==(const DelayProfile&) const = default;

private:
    DelayProfile() = default;
    Form form_ = Form::constant;
    double center_ = 1.0;
    double amp_ = 0.0;
    double omega_ = 0.0;
};

// A delayed-velocity lookup fell outside the buffered range: the step size,
// capacity, and delay profile are inconsistent.
struct coverage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ring of velocity snapshots at consecutive step times idx*dt, each with the
// discrete L2 norm squared of the snapshot. Holds ceil(tau_max/dt) + 2 slots,
// enough to serve every lookup t - tau(t) with one interpolation bracket to
// spare. Snapshots at negative indices hold the prescribed history.
class HistoryBuffer {
public:
    HistoryBuffer(std::size_t field_size, double dt, double tau_max)
        : field_size_(field_size), dt_(dt)
    {
        if (!(dt > 0.0) || !(tau_max > 0.0))
            throw std::invalid_argument("history: dt and tau_max must be positive");
        capacity_ = static_cast<std::size_t>(std::ceil(tau_max / dt)) + 2;
        slots_.resize(capacity_);
        for (auto& s : slots_)
            s.v.assign(field_size_, 0.0);
    }

    double dt() const { return dt_; }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return count_ == 0; }
    std::int64_t newest_index() const { return newest_; }
    std::int64_t oldest_index() const { return newest_ - static_cast<std::int64_t>(count_) + 1; }

    // Fill indices -n_hist .. -1 by sampling the prescribed history at s = idx*dt
    // and index 0 with the initial velocity. n_hist = ceil(tau0/dt), so the
    // oldest snapshot is at or before -tau0.
    void seed(double tau0,
              const std::function<void(double, std::vector<double>&)>& history,
              const std::vector<double>& v0,
              const std::function<double(const std::vector<double>&)>& norm_sq)
    {
        if (count_ != 0)
            throw std::logic_error("history: seed on a non-empty buffer");
        if (!(tau0 > 0.0))
            throw std::invalid_argument("history: tau0 must be positive");
        const auto n_hist = static_cast<std::int64_t>(std::ceil(tau0 / dt_ - 1e-12));
        start_index_ = -n_hist;
        std::vector<double> tmp(field_size_, 0.0);
        for (std::int64_t j = -n_hist; j < 0; ++j) {
            history(j * dt_, tmp);
            push(tmp, norm_sq(tmp));
        }
        push(v0, norm_sq(v0));
    }

    // Append the snapshot for the next consecutive index, evicting the oldest
    // slot once the ring is full.
    void push(const std::vector<double>& v, double q)
    {
        if (v.size() != field_size_)
            throw std::invalid_argument("history: snapshot size mismatch");
        newest_ = empty() ? start_index_ : newest_ + 1;
        Slot& s = slots_[ring_pos(newest_)];
        s.v = v;
        s.q = q;
        if (count_ < capacity_)
            ++count_;
    }

    const std::vector<double>& field_at(std::int64_t idx) const
    {
        check_range(idx, "snapshot");
        return slots_[ring_pos(idx)].v;
    }

    double norm_sq_at(std::int64_t idx) const
    {
        check_range(idx, "norm");
        return slots_[ring_pos(idx)].q;
    }

    // Velocity at time s by linear interpolation between the bracketing
    // snapshots; exact (no interpolation) when s hits a snapshot time.
    std::vector<double> sample(double s) const
    {
        auto [j, w] = locate(s);
        if (w == 0.0)
            return slots_[ring_pos(j)].v;
        const auto& a = field_at(j);
        const auto& b = field_at(j + 1);
        std::vector<double> out(field_size_);
        for (std::size_t i = 0; i < field_size_; ++i)
            out[i] = (1.0 - w) * a[i] + w * b[i];
        return out;
    }

    // Stored norm-squared scalar at time s, same interpolation rule.
    double sample_norm_sq(double s) const
    {
        auto [j, w] = locate(s);
        if (w == 0.0)
            return norm_sq_at(j);
        return (1.0 - w) * norm_sq_at(j) + w * norm_sq_at(j + 1);
    }

private:
    struct Slot {
        std::vector<double> v;
        double q = 0.0;
    };

    std::size_t ring_pos(std::int64_t idx) const
    {
        std::int64_t m = idx % static_cast<std::int64_t>(capacity_);
        if (m < 0)
            m += static_cast<std::int64_t>(capacity_);
        return static_cast<std::size_t>(m);
    }

    void check_range(std::int64_t idx, const char* what) const
    {
        if (empty() || idx < oldest_index() || idx > newest_index()) {
            std::ostringstream os;
            os << "history: " << what << " lookup at index " << idx << " outside buffered range ["
               << oldest_index() << ", " << newest_index()
               << "]; dt or capacity is inconsistent with the delay profile";
            throw coverage_error(os.str());
        }
    }

    // Snap near-integer query times to the grid so exact hits stay exact.
    std::pair<std::int64_t, double> locate(double s) const
    {
        const double r = s / dt_;
        const auto near = static_cast<std::int64_t>(std::llround(r));
        if (std::abs(r - static_cast<double>(near)) < 1e-9) {
            check_range(near, "interpolation");
            return {near, 0.0};
        }
        const auto j = static_cast<std::int64_t>(std::floor(r));
        check_range(j, "interpolation");
        check_range(j + 1, "interpolation");
        return {j, r - static_cast<double>(j)};
    }

    std::size_t field_size_;
    double dt_;
    std::size_t capacity_ = 0;
    std::vector<Slot> slots_;
    std::size_t count_ = 0;
    std::int64_t newest_ = 0;
    std::int64_t start_index_ = 0;
};

struct cfl_error : std::runtime_error {
    double suggested_drho;
    cfl_error(const std::string& msg, double drho)
        : std::runtime_error(msg), suggested_drho(drho) {}
};

// Auxiliary transport form of the delay: z(x, rho, t) advected in rho from the
// inflow z(., 0) = u_t with speed (1 - tau'(t) rho) / tau(t) > 0. First-order
// upwind; used as a cross-check of the history buffer, not the production path.
class TransportField {
public:
    TransportField(std::size_t field_size, int n_rho) : field_size_(field_size), n_rho_(n_rho)
    {
        if (n_rho < 2)
            throw std::invalid_argument("transport: need at least 2 cells in rho");
        layers_.assign(n_rho_ + 1, std::vector<double>(field_size_, 0.0));
    }

    int n_rho() const { return n_rho_; }
    double drho() const { return 1.0 / n_rho_; }
    const std::vector<double>& layer(int m) const { return layers_.at(m); }
    const std::vector<double>& outlet() const { return layers_.back(); }

    // z(x, rho, 0) = f0(x, -rho * tau0)
    void seed(double tau0, const std::function<void(double, std::vector<double>&)>& f0)
    {
        for (int m = 0; m <= n_rho_; ++m)
            f0(-tau0 * (static_cast<double>(m) / n_rho_), layers_[m]);
    }

    // One upwind step of size dt with delay state (tau, tau') taken at the step
    // start; the inflow layer is then pinned to the velocity at the new time.
    void advance(double tau, double tau_slope, const std::vector<double>& inflow, double dt)
    {
        if (inflow.size() != field_size_)
            throw std::invalid_argument("transport: inflow size mismatch");
        const double dr = drho();
        const double c_max = std::max(1.0, 1.0 - tau_slope) / tau;
        if (dt * c_max > dr * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "transport: CFL violated, dt*max_speed = " << dt * c_max << " > drho = " << dr
               << "; use n_rho <= " << static_cast<int>(std::floor(1.0 / (dt * c_max)))
               << " or a smaller dt";
            throw cfl_error(os.str(), dt * c_max);
        }
        for (int m = n_rho_; m >= 1; --m) {
            const double rho = static_cast<double>(m) / n_rho_;
            const double theta = dt * (1.0 - tau_slope * rho) / (tau * dr);
            auto& zm = layers_[m];
            const auto& zl = layers_[m - 1];
            for (std::size_t i = 0; i < field_size_; ++i)
                zm[i] = (1.0 - theta) * zm[i] + theta * zl[i];
        }
        layers_[0] = inflow;
    }

private:
    std::size_t field_size_;
    int n_rho_;
    std::vector<std::vector<double>> layers_;
};

// Sup-norm discrepancy between the two delay representations at time t:
// the transport outlet z(., 1, t) against the interpolated buffer lookup.
inline double transport_mismatch(const TransportField& z, const HistoryBuffer& buf, double t,
                                 double tau)
{
    const std::vector<double> ref = buf.sample(t - tau);
    const std::vector<double>& out = z.outlet();
    double m = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
        m = std::max(m, std::abs(out[i] - ref[i]));
    return m;
}

} // namespace vds
