#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetsym/flows.hpp"

namespace jetsym {

class NumericError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class DerivativeMode { Analytic, FiniteDifference };

/// Uniform (t, x) grid with N_t, N_x points on closed intervals.
struct Grid1D {
    double t_min = 0, t_max = 1;
    double x_min = -5, x_max = 5;
    int nt = 201, nx = 201;
    DerivativeMode mode = DerivativeMode::Analytic;

    double ht() const { return (t_max - t_min) / (nt - 1); }
    double hx() const { return (x_max - x_min) / (nx - 1); }
    double t(int i) const { return t_min + i * ht(); }
    double x(int j) const { return x_min + j * hx(); }
    /// Halves both spacings.
    Grid1D refined() const;
    void validate() const;
};

/// Parses "NTxNX".
Grid1D parse_grid(const std::string &text);

/// A (psi, W) pair in closed form together with the equations it should
/// solve and numeric values for every constant it mentions.
struct NumericProblem {
    std::string flow;
    std::string solution;
    std::vector<Expr> residuals;
    Solution fields;
    std::map<std::string, double> params;
    /// Must stay away from zero on the grid.
    std::vector<Expr> domain;
};

/// identity, qb, qa, galilei, dilation, projective
const std::vector<std::string> &numeric_flows();
/// planewave, zero, constant
const std::vector<std::string> &numeric_solutions();

/// Seed solution of the n = 1 Schrodinger equation pushed forward by the
/// flow. Defaults: k = 2, mu = 0.3, beta1 = 0.7, lambda = 0.2, alpha = 0.5,
/// nu = 1.5, with B(t) = sin t for qb and U(t) = sin(nu t) for qa.
NumericProblem make_problem(const std::string &flow, const std::string &solution,
                            const std::map<std::string, double> &overrides = {});

/// Throws NumericError when a domain expression vanishes or changes sign on
/// the grid.
void check_domain(const NumericProblem &p, const Grid1D &grid);

struct PointResidual {
    double t, x, value;
};

/// max over grid points and residuals of |residual|. Finite-difference mode
/// uses centered stencils and skips points whose stencil leaves the grid.
double residual_max(const NumericProblem &p, const Grid1D &grid, int jobs = 1);
std::vector<PointResidual> residual_points(const NumericProblem &p, const Grid1D &grid, int jobs = 1);

struct ConvergenceStep {
    double h; // spatial spacing
    double residual;
};
/// residual_max on `refinements` successively halved grids (FD mode).
std::vector<ConvergenceStep> convergence_order(const NumericProblem &p, const Grid1D &grid, int refinements,
                                               int jobs = 1);
/// residual[i] / residual[i+1]
std::vector<double> convergence_ratios(const std::vector<ConvergenceStep> &steps);

void write_csv(const std::string &path, const std::vector<PointResidual> &points);

} // namespace jetsym
