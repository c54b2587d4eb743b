#include "jetsym/jetfield.hpp"

#include <map>
#include <regex>
#include <set>

namespace jetsym {

Expr VectorField::coefficient(const Expr &direction) const
{
    if (auto it = coeffs.find(direction); it != coeffs.end())
        return it->second;
    if (auto it = prolonged.find(direction); it != prolonged.end())
        return it->second;
    return Expr();
}

bool VectorField::has_coefficient(const Expr &direction) const
{
    return coeffs.count(direction) || prolonged.count(direction);
}

VectorField make_field(std::string name, const std::vector<std::pair<Expr, Expr>> &terms, FieldClass cls)
{
    VectorField X;
    X.name = std::move(name);
    X.cls = cls;
    for (const auto &[dir, c] : terms) {
        if (dir.kind() == Kind::Jet && jet_order(dir) > 0 && cls == FieldClass::Point)
            throw FieldError("point field cannot act on derivative coordinate " + print(dir));
        if (dir.kind() != Kind::Indep && dir.kind() != Kind::Jet)
            throw FieldError("direction must be an independent variable or jet coordinate, got " + print(dir));
        Expr &slot = X.coeffs[dir];
        slot = slot + c;
    }
    for (auto it = X.coeffs.begin(); it != X.coeffs.end();)
        it = it->second.is_zero() ? X.coeffs.erase(it) : std::next(it);
    return X;
}

namespace {

class Prolonger
{
  public:
    explicit Prolonger(VectorField &X) : X_(X)
    {
        for (const auto &[dir, c] : X.coeffs)
            if (dir.kind() == Kind::Indep)
                xi_.emplace_back(dir.node().index[0], c);
    }

    Expr coefficient(const Expr &K)
    {
        if (jet_order(K) == 0 || X_.coeffs.count(K))
            return X_.coefficient(K);
        if (auto it = X_.prolonged.find(K); it != X_.prolonged.end())
            return it->second;
        std::vector<int> J = K.node().index;
        int i = static_cast<int>(J.size()) - 1;
        while (J[i] == 0)
            --i;
        J[i] -= 1;
        Expr lower = coefficient(jet(K.name(), J));
        std::vector<Expr> terms{total_derivative(lower, i)};
        for (const auto &[mu, xi] : xi_) {
            Expr dxi = d_xi(mu, xi, i);
            if (dxi.is_zero())
                continue;
            std::vector<int> Jmu = J;
            if (static_cast<int>(Jmu.size()) <= mu)
                Jmu.resize(mu + 1, 0);
            Jmu[mu] += 1;
            terms.push_back(-(jet(K.name(), Jmu) * dxi));
        }
        Expr out = add(std::move(terms));
        X_.prolonged[K] = out;
        return out;
    }

  private:
    Expr d_xi(int mu, const Expr &xi, int i)
    {
        auto key = std::make_pair(mu, i);
        if (auto it = dxi_.find(key); it != dxi_.end())
            return it->second;
        Expr d = total_derivative(xi, i);
        dxi_.emplace(key, d);
        return d;
    }

    VectorField &X_;
    std::vector<std::pair<int, Expr>> xi_;
    std::map<std::pair<int, int>, Expr> dxi_;
};

void multi_indices(int vars, int order, std::vector<int> &cur, std::vector<std::vector<int>> &out)
{
    if (static_cast<int>(cur.size()) == vars) {
        int s = 0;
        for (int v : cur)
            s += v;
        if (s == order)
            out.push_back(cur);
        return;
    }
    int used = 0;
    for (int v : cur)
        used += v;
    for (int k = 0; k <= order - used; ++k) {
        cur.push_back(k);
        multi_indices(vars, order, cur, out);
        cur.pop_back();
    }
}

} // namespace

VectorField prolong(const VectorField &X, const JetSpace &space, int order)
{
    if (order < 1)
        throw FieldError("prolongation order must be at least 1");
    if (order > space.max_order)
        throw FieldError("prolongation order " + std::to_string(order) + " exceeds the jet space capacity " +
                         std::to_string(space.max_order));
    VectorField out = X;
    Prolonger p(out);
    for (const auto &dep : space.dependents)
        for (int k = 1; k <= order; ++k) {
            std::vector<std::vector<int>> idx;
            std::vector<int> cur;
            multi_indices(space.n + 1, k, cur, idx);
            for (const auto &m : idx)
                p.coefficient(jet(dep, m));
        }
    return out;
}

VectorField prolong_for(const VectorField &X, const std::vector<Expr> &jets)
{
    VectorField out = X;
    Prolonger p(out);
    for (const auto &j : jets) {
        if (j.kind() != Kind::Jet)
            throw FieldError("prolong_for expects jet coordinates, got " + print(j));
        p.coefficient(j);
    }
    return out;
}

Expr act(const VectorField &X, const Expr &e)
{
    std::vector<Expr> terms;
    for (const auto &a : free_atoms(e)) {
        if (a.kind() == Kind::Constant)
            continue;
        if (a.kind() == Kind::Jet && jet_order(a) > 0 && !X.has_coefficient(a))
            throw FieldError("field " + X.name + " is not prolonged to " + print(a));
        Expr c = X.coefficient(a);
        if (c.is_zero())
            continue;
        terms.push_back(c * diff(e, a));
    }
    return add(std::move(terms));
}

VectorField lie_bracket(const VectorField &X, const VectorField &Y)
{
    if (X.cls != Y.cls)
        throw FieldError("bracket of point and contact fields");
    std::set<Expr, ExprLess> dirs;
    for (const auto &[d, c] : X.coeffs)
        dirs.insert(d);
    for (const auto &[d, c] : Y.coeffs)
        dirs.insert(d);
    VectorField Xb = X, Yb = Y;
    Xb.prolonged.clear();
    Yb.prolonged.clear();
    std::vector<std::pair<Expr, Expr>> terms;
    for (const auto &d : dirs) {
        Expr c = act(Xb, Y.coefficient(d)) - act(Yb, X.coefficient(d));
        terms.emplace_back(d, c);
    }
    return make_field("[" + X.name + "," + Y.name + "]", terms, X.cls);
}

VectorField combine(const std::vector<std::pair<Expr, VectorField>> &terms, std::string name)
{
    std::vector<std::pair<Expr, Expr>> out;
    FieldClass cls = terms.empty() ? FieldClass::Point : terms.front().second.cls;
    for (const auto &[c, X] : terms) {
        if (X.cls != cls)
            throw FieldError("linear combination of point and contact fields");
        for (const auto &[d, k] : X.coeffs)
            out.emplace_back(d, c * k);
    }
    return make_field(std::move(name), out, cls);
}

bool is_zero_field(const VectorField &X)
{
    for (const auto &[d, c] : X.coeffs)
        if (!is_zero(c))
            return false;
    return true;
}

namespace {

Expr psi_t() { return jet("psi", {1}); }
Expr psi_x() { return jet("psi", {0, 1}); }

} // namespace

VectorField contact_field(std::string name, const Expr &W, const Expr &v_coefficient)
{
    Expr psi = jet("psi");
    Expr Wt = diff(W, psi_t());
    Expr Wx = diff(W, psi_x());
    Expr Wpsi = diff(W, psi);
    return make_field(std::move(name),
                      {{t_var(), -Wt},
                       {x_var(1), -Wx},
                       {psi, W - psi_t() * Wt - psi_x() * Wx},
                       {psi_t(), diff(W, t_var()) + psi_t() * Wpsi},
                       {psi_x(), diff(W, x_var(1)) + psi_x() * Wpsi},
                       {jet("V"), v_coefficient}},
                      FieldClass::Contact);
}

Expr generating_function(const VectorField &X)
{
    return X.coefficient(jet("psi")) - psi_t() * X.coefficient(t_var()) - psi_x() * X.coefficient(x_var(1));
}

std::string direction_name(const Expr &d)
{
    if (d.kind() == Kind::Indep)
        return d.name();
    if (d.kind() == Kind::Jet && jet_order(d) == 0)
        return d.name();
    if (d.kind() == Kind::Jet && jet_order(d) == 1) {
        const auto &idx = d.node().index;
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (idx[i] == 1)
                return d.name() + (i == 0 ? "_t" : "_x" + std::to_string(i));
    }
    return print(d);
}

namespace {

Expr direction_atom(const std::string &name, const SymbolTable &symbols)
{
    if (name == "t")
        return t_var();
    static const std::regex xa("x([0-9]+)");
    static const std::regex first("([A-Za-z][A-Za-z0-9]*)_(t|x|x[0-9]+)");
    std::smatch m;
    if (std::regex_match(name, m, xa)) {
        int a = m[1].length() > 6 ? 0 : std::stoi(m[1]);
        if (a < 1 || a > symbols.space.n)
            throw FieldError("unknown direction @" + name);
        return x_var(a);
    }
    if (std::regex_match(name, m, first)) {
        if (!symbols.space.declares(m[1]))
            throw FieldError("unknown direction @" + name);
        std::string v = m[2];
        std::vector<int> idx(symbols.space.n + 1, 0);
        if (v == "t") {
            idx[0] = 1;
        } else {
            int a = v == "x" ? 1 : (v.size() > 7 ? 0 : std::stoi(v.substr(1)));
            if (a < 1 || a > symbols.space.n)
                throw FieldError("unknown direction @" + name);
            idx[a] = 1;
        }
        return jet(m[1], idx);
    }
    if (symbols.space.declares(name))
        return jet(name);
    throw FieldError("unknown direction @" + name);
}

} // namespace

VectorField parse_field(const std::string &text, const SymbolTable &symbols, std::string name)
{
    static const std::regex dir_re("@([A-Za-z_][A-Za-z0-9_]*)");
    std::map<std::string, std::pair<std::string, Expr>> placeholders; // dir name -> (placeholder, atom)
    std::string rewritten;
    auto begin = std::sregex_iterator(text.begin(), text.end(), dir_re);
    std::size_t last = 0;
    SymbolTable local = symbols;
    bool contact = false;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const std::smatch &m = *it;
        std::string dname = m[1];
        auto found = placeholders.find(dname);
        if (found == placeholders.end()) {
            if (placeholders.size() >= 26)
                throw FieldError("too many directions");
            Expr atom = direction_atom(dname, symbols);
            if (atom.kind() == Kind::Jet && jet_order(atom) > 0)
                contact = true;
            std::string ph = "_";
            ph += static_cast<char>('a' + placeholders.size());
            ph.resize(m.length(), '_'); // same width keeps error columns aligned
            local.constants[ph] = false;
            found = placeholders.emplace(dname, std::make_pair(ph, atom)).first;
        }
        rewritten += text.substr(last, m.position() - last);
        rewritten += found->second.first;
        last = m.position() + m.length();
    }
    rewritten += text.substr(last);
    if (placeholders.empty())
        throw FieldError("vector field has no @direction terms");

    Expr e = parse(rewritten, local);
    std::vector<std::pair<Expr, Expr>> terms;
    Expr rest = e;
    std::vector<Expr> marks;
    for (const auto &[dname, pa] : placeholders)
        marks.push_back(constant(pa.first));
    for (const auto &[dname, pa] : placeholders) {
        Expr mark = constant(pa.first);
        Expr c = diff(e, mark);
        for (const auto &other : marks)
            if (!diff(c, other).is_zero())
                throw FieldError("vector field is not linear in the directions");
        terms.emplace_back(pa.second, c);
        rest = rest - c * mark;
    }
    if (!is_zero(rest))
        throw FieldError("vector field has a term without a direction: " + print(rest));
    return make_field(std::move(name), terms, contact ? FieldClass::Contact : FieldClass::Point);
}

std::string print_field(const VectorField &X)
{
    std::string out;
    for (const auto &[d, c] : X.coeffs) {
        std::string coef = print(c);
        std::string term;
        if (c.is_one())
            term = "@" + direction_name(d);
        else if (c.kind() == Kind::Add)
            term = "(" + coef + ")*@" + direction_name(d);
        else
            term = coef + "*@" + direction_name(d);
        if (!out.empty())
            out += term[0] == '-' ? " - " + term.substr(1) : " + " + term;
        else
            out = term;
    }
    return out.empty() ? "0" : out;
}

} // namespace jetsym
