#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace vds {

// Uniform grid on an interval or a rectangle with homogeneous Dirichlet
// boundary. Only interior values are stored; boundary values are identically
// zero and enter the stencils as ghost zeros. 2D grids require square cells.
class Grid {
public:
    static Grid interval(double length, int n_interior)
    {
        if (length <= 0.0)
            throw std::invalid_argument("grid: length must be positive");
        if (n_interior < 1)
            throw std::invalid_argument("grid: need at least one interior point");
        Grid g;
        g.dim_ = 1;
        g.lx_ = length;
        g.ly_ = 0.0;
        g.nx_ = n_interior;
        g.ny_ = 1;
        g.h_ = length / (n_interior + 1);
        return g;
    }

    static Grid rectangle(double lx, double ly, int nx, int ny)
    {
        if (lx <= 0.0 || ly <= 0.0)
            throw std::invalid_argument("grid: extents must be positive");
        if (nx < 1 || ny < 1)
            throw std::invalid_argument("grid: need at least one interior point per direction");
        const double hx = lx / (nx + 1);
        const double hy = ly / (ny + 1);
        if (std::abs(hx - hy) > 1e-12 * hx)
            throw std::invalid_argument("grid: cells must be square (Lx/(nx+1) == Ly/(ny+1))");
        Grid g;
        g.dim_ = 2;
        g.lx_ = lx;
        g.ly_ = ly;
        g.nx_ = nx;
        g.ny_ = ny;
        g.h_ = hx;
        return g;
    }

    int dim() const { return dim_; }
    double spacing() const { return h_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

    // measure of one interior cell, h^dim
    double cell_measure() const { return dim_ == 1 ? h_ : h_ * h_; }

    // coordinates of interior point (ix[, iy]); boundary sits at index -1 and n
    double x(int ix) const { return (ix + 1) * h_; }
    double y(int iy) const { return (iy + 1) * h_; }

    bool operator==(const Grid&) const = default;

private:
    Grid() = default;
    int dim_ = 1;
    double lx_ = 1.0, ly_ = 0.0;
    int nx_ = 1, ny_ = 1;
    double h_ = 0.5;
};

// Values at the interior points of a Grid, row-major in 2D (y outer, x inner).
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const Grid& g) : grid_(g), v_(g.size(), 0.0) {}

    static GridFunction sample(const Grid& g, const std::function<double(double, double)>& f)
    {
        GridFunction out(g);
        if (g.dim() == 1) {
            for (int i = 0; i < g.nx(); ++i)
                out.v_[i] = f(g.x(i), 0.0);
        } else {
            std::size_t k = 0;
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i, ++k)
                    out.v_[k] = f(g.x(i), g.y(j));
        }
        return out;
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }
    double at(int ix, int iy) const { return v_[static_cast<std::size_t>(iy) * grid_.nx() + ix]; }
    double& at(int ix, int iy) { return v_[static_cast<std::size_t>(iy) * grid_.nx() + ix]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double max_abs() const
    {
        double m = 0.0;
        for (double x : v_)
            m = std::max(m, std::abs(x));
        return m;
    }

    bool operator==(const GridFunction&) const = default;

private:
    Grid grid_ = Grid::interval(1.0, 1);
    std::vector<double> v_;
};

// Forward differences of a GridFunction on the cell edges, including the
// two boundary cells of each grid line (ghost zeros). In 1D only x-edges
// exist; in 2D x-edges are (nx+1) per row and y-edges (ny+1) per column.
struct GradientField {
    std::vector<double> gx; // 1D: nx+1 entries; 2D: (nx+1)*ny, row-major
    std::vector<double> gy; // 1D: empty;       2D: nx*(ny+1), row-major

    GradientField() = default;
    explicit GradientField(const Grid& g)
    {
        if (g.dim() == 1) {
            gx.assign(g.nx() + 1, 0.0);
        } else {
            gx.assign(static_cast<std::size_t>(g.nx() + 1) * g.ny(), 0.0);
            gy.assign(static_cast<std::size_t>(g.nx()) * (g.ny() + 1), 0.0);
        }
    }
};

inline void check_same_grid(const GridFunction& a, const GridFunction& b)
{
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument("grid functions live on different grids");
}

// Five/three-point Laplacian with zero ghost values on the boundary.
inline GridFunction laplacian(const GridFunction& f)
{
    const Grid& g = f.grid();
    GridFunction out(g);
    const double ih2 = 1.0 / (g.spacing() * g.spacing());
    const int nx = g.nx();
    if (g.dim() == 1) {
        for (int i = 0; i < nx; ++i) {
            const double left = i > 0 ? f[i - 1] : 0.0;
            const double right = i + 1 < nx ? f[i + 1] : 0.0;
            out[i] = ih2 * (left - 2.0 * f[i] + right);
        }
        return out;
    }
    const int ny = g.ny();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double left = i > 0 ? f.at(i - 1, j) : 0.0;
            const double right = i + 1 < nx ? f.at(i + 1, j) : 0.0;
            const double down = j > 0 ? f.at(i, j - 1) : 0.0;
            const double up = j + 1 < ny ? f.at(i, j + 1) : 0.0;
            out.at(i, j) = ih2 * (left + right + down + up - 4.0 * f.at(i, j));
        }
    }
    return out;
}

// Discrete L2 pairing h^dim * sum f_i g_i (trapezoid on the Dirichlet interior).
inline double inner(const GridFunction& f, const GridFunction& g)
{
    check_same_grid(f, g);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += f[i] * g[i];
    return s * f.grid().cell_measure();
}

inline double norm_sq(const GridFunction& f) { return inner(f, f); }

inline GradientField gradient(const GridFunction& f)
{
    const Grid& g = f.grid();
    GradientField out(g);
    const double ih = 1.0 / g.spacing();
    const int nx = g.nx();
    if (g.dim() == 1) {
        for (int e = 0; e <= nx; ++e) {
            const double a = e > 0 ? f[e - 1] : 0.0;
            const double b = e < nx ? f[e] : 0.0;
            out.gx[e] = ih * (b - a);
        }
        return out;
    }
    const int ny = g.ny();
    for (int j = 0; j < ny; ++j) {
        for (int e = 0; e <= nx; ++e) {
            const double a = e > 0 ? f.at(e - 1, j) : 0.0;
            const double b = e < nx ? f.at(e, j) : 0.0;
            out.gx[static_cast<std::size_t>(j) * (nx + 1) + e] = ih * (b - a);
        }
    }
    for (int e = 0; e <= ny; ++e) {
        for (int i = 0; i < nx; ++i) {
            const double a = e > 0 ? f.at(i, e - 1) : 0.0;
            const double b = e < ny ? f.at(i, e) : 0.0;
            out.gy[static_cast<std::size_t>(e) * nx + i] = ih * (b - a);
        }
    }
    return out;
}

// Pairing of two gradient fields with the cell measure of their grid.
inline double inner(const GradientField& a, const GradientField& b, const Grid& g)
{
    if (a.gx.size() != b.gx.size() || a.gy.size() != b.gy.size())
        throw std::invalid_argument("gradient fields have different shapes");
    double s = 0.0;
    for (std::size_t i = 0; i < a.gx.size(); ++i)
        s += a.gx[i] * b.gx[i];
    for (std::size_t i = 0; i < a.gy.size(); ++i)
        s += a.gy[i] * b.gy[i];
    return s * g.cell_measure();
}

inline double grad_sq(const GradientField& gr, const Grid& g)
{
    return inner(gr, gr, g);
}

// Discrete integral of |grad f|^2 over the domain, forward differences
// including the boundary cells. Equals -inner(laplacian(f), f) up to rounding.
inline double grad_sq(const GridFunction& f)
{
    return grad_sq(gradient(f), f.grid());
}

// Smallest eigenvalue of the discrete Dirichlet Laplacian (closed form),
// the constant of the discrete Poincare inequality.
inline double poincare_constant(const Grid& g)
{
    const double h = g.spacing();
    const double pi = 3.14159265358979323846;
    auto lam1 = [&](double extent) {
        const double s = std::sin(pi * h / (2.0 * extent));
        return 4.0 / (h * h) * s * s;
    };
    if (g.dim() == 1)
        return lam1(g.lx());
    return lam1(g.lx()) + lam1(g.ly());
}

} // namespace vds
