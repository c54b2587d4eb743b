#include "jetsym/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <thread>

#include "catalog_internal.hpp"
#include "jetsym/catalog.hpp"

namespace jetsym {

using cd = std::complex<double>;

namespace {

// Runs body(i) for i in [lo, hi) over `jobs` threads, rows split in blocks.
template <class F> void parallel_rows(int lo, int hi, int jobs, F body)
{
    jobs = std::clamp(jobs, 1, std::max(1, hi - lo));
    if (jobs == 1) {
        for (int i = lo; i < hi; ++i)
            body(i);
        return;
    }
    std::vector<std::thread> pool;
    int block = (hi - lo + jobs - 1) / jobs;
    for (int k = 0; k < jobs; ++k) {
        int a = lo + k * block, b = std::min(hi, a + block);
        if (a >= b)
            break;
        pool.emplace_back([=] {
            for (int i = a; i < b; ++i)
                body(i);
        });
    }
    for (auto &th : pool)
        th.join();
}

Bindings bindings_of(const std::map<std::string, double> &params)
{
    Bindings b;
    for (const auto &[k, v] : params)
        b.values[k] = v;
    return b;
}

// centered stencil weights for the given order, times h^order
std::vector<double> stencil(int order)
{
    switch (order) {
    case 0:
        return {1};
    case 1:
        return {-0.5, 0, 0.5};
    case 2:
        return {1, -2, 1};
    case 3:
        return {-0.5, 1, 0, -1, 0.5};
    case 4:
        return {1, -4, 6, -4, 1};
    default:
        throw NumericError("finite differences support derivatives up to order 4");
    }
}

struct FieldGrid {
    std::vector<cd> v;
    int nx;
    cd at(int i, int j) const { return v[static_cast<std::size_t>(i) * nx + j]; }
};

// Residual magnitudes at grid points, analytic or by stencils.
class RowEvaluator
{
  public:
    RowEvaluator(const NumericProblem &p, const Grid1D &g, int jobs) : grid_(g)
    {
        Bindings fixed = bindings_of(p.params);
        const Expr t = t_var(), x = x_var(1);
        if (g.mode == DerivativeMode::Analytic) {
            for (const auto &r : p.residuals)
                analytic_.emplace_back(evaluate_on(r, p.fields), std::vector<Expr>{t, x}, fixed);
            return;
        }
        // sample every dependent once, then differentiate by stencils
        std::map<std::string, Expr> closed{{"psi", p.fields.psi}, {"cpsi", conj(p.fields.psi)}, {"W", p.fields.W}};
        for (const auto &r : p.residuals) {
            Fd fd;
            fd.atoms = {t, x};
            for (const auto &j : jets_of(r)) {
                const auto &idx = j.node().index;
                if (idx.size() > 2)
                    throw NumericError("finite differences need n = 1");
                int ct = idx.size() > 0 ? idx[0] : 0, cx = idx.size() > 1 ? idx[1] : 0;
                if (!closed.count(j.name()))
                    throw NumericError("no closed form bound for " + j.name());
                fd.atoms.push_back(j);
                fd.jets.push_back({j.name(), ct, cx, stencil(ct), stencil(cx)});
                margin_t_ = std::max(margin_t_, (ct + 1) / 2);
                margin_x_ = std::max(margin_x_, (cx + 1) / 2);
                if (!fields_.count(j.name()))
                    fields_[j.name()] = sample(closed[j.name()], fixed, jobs);
            }
            fd.expr = std::make_unique<CompiledExpr>(r, fd.atoms, fixed);
            fd_.push_back(std::move(fd));
        }
    }

    int margin_t() const { return margin_t_; }
    int margin_x() const { return margin_x_; }

    // max |r| over residuals at (i, j)
    double at(int i, int j) const
    {
        double best = 0;
        std::vector<cd> slots;
        if (grid_.mode == DerivativeMode::Analytic) {
            cd pt[2] = {grid_.t(i), grid_.x(j)};
            for (const auto &c : analytic_)
                best = std::max(best, std::abs(c(pt)));
            return best;
        }
        for (const auto &fd : fd_) {
            slots.assign({grid_.t(i), grid_.x(j)});
            for (const auto &jt : fd.jets)
                slots.push_back(derivative(fields_.at(jt.dep), i, j, jt));
            best = std::max(best, std::abs((*fd.expr)(slots)));
        }
        return best;
    }

  private:
    struct JetRef {
        std::string dep;
        int ct, cx;
        std::vector<double> st, sx;
    };
    struct Fd {
        std::vector<Expr> atoms;
        std::vector<JetRef> jets;
        std::unique_ptr<CompiledExpr> expr;
    };

    FieldGrid sample(const Expr &e, const Bindings &fixed, int jobs) const
    {
        if (depends_on_jets(e))
            throw NumericError("closed form depends on jet coordinates");
        CompiledExpr c(e, {t_var(), x_var(1)}, fixed);
        FieldGrid f{std::vector<cd>(static_cast<std::size_t>(grid_.nt) * grid_.nx), grid_.nx};
        parallel_rows(0, grid_.nt, jobs, [&](int i) {
            for (int j = 0; j < grid_.nx; ++j) {
                cd pt[2] = {grid_.t(i), grid_.x(j)};
                f.v[static_cast<std::size_t>(i) * grid_.nx + j] = c(pt);
            }
        });
        return f;
    }

    cd derivative(const FieldGrid &f, int i, int j, const JetRef &jt) const
    {
        const auto &st = jt.st, &sx = jt.sx;
        int ot = static_cast<int>(st.size()) / 2, ox = static_cast<int>(sx.size()) / 2;
        cd sum = 0;
        for (int a = 0; a < static_cast<int>(st.size()); ++a) {
            if (st[a] == 0)
                continue;
            for (int b = 0; b < static_cast<int>(sx.size()); ++b)
                if (sx[b] != 0)
                    sum += st[a] * sx[b] * f.at(i + a - ot, j + b - ox);
        }
        return sum / (std::pow(grid_.ht(), jt.ct) * std::pow(grid_.hx(), jt.cx));
    }

    const Grid1D &grid_;
    std::vector<CompiledExpr> analytic_;
    std::vector<Fd> fd_;
    std::map<std::string, FieldGrid> fields_;
    int margin_t_ = 0, margin_x_ = 0;
};

Solution seed_solution(const std::string &name)
{
    using namespace cat;
    const Expr t = t_var(), x = x_var(1), k = constant("k");
    if (name == "planewave")
        return {exp(I() * (k * x - k * k * t)), Expr(0)};
    if (name == "zero")
        return {Expr(0), Expr(1)};
    if (name == "constant")
        return {Expr(1), Expr(1)};
    throw NumericError("unknown solution '" + name + "'");
}

} // namespace

Grid1D Grid1D::refined() const
{
    Grid1D g = *this;
    g.nt = 2 * (nt - 1) + 1;
    g.nx = 2 * (nx - 1) + 1;
    return g;
}

void Grid1D::validate() const
{
    if (nt < 3 || nx < 3)
        throw NumericError("grid needs at least 3 points per axis");
    if (!(t_max > t_min) || !(x_max > x_min))
        throw NumericError("grid ranges must be nonempty intervals");
}

Grid1D parse_grid(const std::string &text)
{
    Grid1D g;
    auto pos = text.find('x');
    try {
        if (pos == std::string::npos)
            throw NumericError("");
        std::size_t used = 0;
        g.nt = std::stoi(text.substr(0, pos), &used);
        if (used != pos)
            throw NumericError("");
        std::string rest = text.substr(pos + 1);
        g.nx = std::stoi(rest, &used);
        if (used != rest.size())
            throw NumericError("");
    } catch (const std::exception &) {
        throw NumericError("grid must look like NTxNX, got '" + text + "'");
    }
    g.validate();
    return g;
}

const std::vector<std::string> &numeric_flows()
{
    static const std::vector<std::string> names{"identity", "qb", "qa", "galilei", "dilation", "projective"};
    return names;
}

const std::vector<std::string> &numeric_solutions()
{
    static const std::vector<std::string> names{"planewave", "zero", "constant"};
    return names;
}

NumericProblem make_problem(const std::string &flow, const std::string &solution,
                            const std::map<std::string, double> &overrides)
{
    if (std::find(numeric_flows().begin(), numeric_flows().end(), flow) == numeric_flows().end())
        throw NumericError("unknown numeric flow '" + flow + "'");
    NumericProblem p;
    p.flow = flow;
    p.solution = solution;
    p.params = {{"k", 2}, {"mu", 0.3}, {"beta1", 0.7}, {"lambda", 0.2}, {"alpha", 0.5}, {"nu", 1.5}, {"eps", 0.1}};
    for (const auto &[k, v] : overrides) {
        if (!p.params.count(k))
            throw NumericError("unknown numeric parameter '" + k + "'");
        if (!std::isfinite(v))
            throw NumericError("parameter " + k + " must be finite");
        p.params[k] = v;
    }
    FlowKey key{flow, 1, {}};
    if (flow == "qb")
        key.params["B"] = "sin(t)";
    if (flow == "qa")
        key.params["U"] = "sin(nu*t)";
    FlowMap fl = build_flow(key);
    p.fields = pushforward_solution(fl, seed_solution(solution));
    p.residuals = build_equation({"theorem1", 1, {}}).residuals;
    p.domain = fl.domain;
    return p;
}

void check_domain(const NumericProblem &p, const Grid1D &grid)
{
    Bindings fixed = bindings_of(p.params);
    for (const auto &d : p.domain) {
        CompiledExpr c(d, {t_var(), x_var(1)}, fixed);
        double prev_sign = 0;
        for (int i = 0; i < grid.nt; ++i)
            for (int j = 0; j < grid.nx; ++j) {
                cd pt[2] = {grid.t(i), grid.x(j)};
                cd v = c(pt);
                if (std::abs(v) < 1e-9)
                    throw NumericError("grid meets the singular set " + print(d) + " = 0");
                if (std::abs(v.imag()) < 1e-12) {
                    double s = v.real() > 0 ? 1 : -1;
                    if (prev_sign != 0 && s != prev_sign)
                        throw NumericError("grid crosses the singular set " + print(d) + " = 0");
                    prev_sign = s;
                }
            }
    }
}

std::vector<PointResidual> residual_points(const NumericProblem &p, const Grid1D &grid, int jobs)
{
    grid.validate();
    check_domain(p, grid);
    RowEvaluator ev(p, grid, jobs);
    int mt = ev.margin_t(), mx = ev.margin_x();
    if (grid.nt <= 2 * mt || grid.nx <= 2 * mx)
        throw NumericError("grid too small for the finite-difference stencils");
    int rows = grid.nt - 2 * mt, cols = grid.nx - 2 * mx;
    std::vector<PointResidual> out(static_cast<std::size_t>(rows) * cols);
    parallel_rows(mt, grid.nt - mt, jobs, [&](int i) {
        for (int j = mx; j < grid.nx - mx; ++j)
            out[static_cast<std::size_t>(i - mt) * cols + (j - mx)] = {grid.t(i), grid.x(j), ev.at(i, j)};
    });
    return out;
}

double residual_max(const NumericProblem &p, const Grid1D &grid, int jobs)
{
    double best = 0;
    for (const auto &pt : residual_points(p, grid, jobs)) {
        if (std::isnan(pt.value))
            throw NumericError("residual is not finite on the grid");
        best = std::max(best, pt.value);
    }
    return best;
}

std::vector<ConvergenceStep> convergence_order(const NumericProblem &p, const Grid1D &grid, int refinements, int jobs)
{
    if (refinements < 2)
        throw NumericError("convergence needs at least 2 refinements");
    Grid1D g = grid;
    g.mode = DerivativeMode::FiniteDifference;
    std::vector<ConvergenceStep> out;
    for (int r = 0; r < refinements; ++r) {
        out.push_back({g.hx(), residual_max(p, g, jobs)});
        g = g.refined();
    }
    return out;
}

std::vector<double> convergence_ratios(const std::vector<ConvergenceStep> &steps)
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < steps.size(); ++i)
        out.push_back(steps[i].residual / steps[i + 1].residual);
    return out;
}

void write_csv(const std::string &path, const std::vector<PointResidual> &points)
{
    std::ofstream out(path);
    if (!out)
        throw NumericError("cannot open " + path);
    out << "t,x,residual\n";
    out.precision(17);
    for (const auto &p : points)
        out << p.t << ',' << p.x << ',' << p.value << '\n';
}

} // namespace jetsym
