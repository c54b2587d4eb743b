#include "jetsym/jet_space.hpp"

#include <algorithm>
#include <stdexcept>

namespace jetsym {

JetSpace JetSpace::schrodinger(int n, bool with_potential, bool with_velocity, int max_order)
{
    if (n < 1)
        throw std::invalid_argument("spatial dimension must be positive");
    JetSpace s;
    s.n = n;
    s.max_order = max_order;
    s.dependents = {"psi", "cpsi"};
    if (with_potential)
        s.dependents.push_back("W");
    if (with_velocity)
        for (int a = 1; a <= n; ++a) {
            s.dependents.push_back("V" + std::to_string(a));
            s.dependents.push_back("cV" + std::to_string(a));
        }
    return s;
}

bool JetSpace::declares(const std::string &dependent) const
{
    return std::find(dependents.begin(), dependents.end(), dependent) != dependents.end();
}

void JetSpace::validate(const Expr &e, int extra_order) const
{
    for (const auto &a : free_atoms(e)) {
        if (a.kind() == Kind::Indep && a.node().index[0] > n)
            throw std::invalid_argument("independent variable " + a.name() + " outside dimension " +
                                        std::to_string(n));
        if (a.kind() != Kind::Jet)
            continue;
        if (!declares(a.name()))
            throw std::invalid_argument("undeclared dependent variable " + a.name());
        if (static_cast<int>(a.node().index.size()) > n + 1)
            throw std::invalid_argument("jet coordinate " + print(a) + " uses a missing direction");
        if (jet_order(a) > max_order + extra_order)
            throw std::invalid_argument("jet coordinate " + print(a) + " exceeds max order");
    }
}

SymbolTable SymbolTable::standard(const JetSpace &space)
{
    SymbolTable s;
    s.space = space;
    for (int a = 1; a <= space.n; ++a) {
        s.functions["U" + std::to_string(a)] = false;
        s.constants["beta" + std::to_string(a)] = false;
        for (int b = 1; b <= space.n; ++b)
            if (a != b)
                s.functions["E" + std::to_string(a) + std::to_string(b)] = false;
    }
    for (const char *f : {"A", "B", "F", "F1", "F2", "G"})
        s.functions[f] = false;
    for (const char *c : {"lambda", "lambda1", "lambda2", "gamma", "nu", "k", "mu", "theta", "alpha", "eps"})
        s.constants[c] = false;
    s.constants["C"] = true;
    s.constants["C1"] = false;
    return s;
}

} // namespace jetsym
