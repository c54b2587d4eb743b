#pragma once

#include <string>
#include <utility>
#include <vector>

#include "jetsym/jetfield.hpp"

namespace jetsym::cat {

Expr psi();
Expr cpsi();
Expr W();
Expr V(int a);
Expr cV(int a);
Expr I();
Expr djet(const std::string &dep, std::vector<int> counts);
/// First derivative of dep along variable i (0 = t).
Expr d1(const std::string &dep, int i);
Expr d2(const std::string &dep, int i, int j);
Expr laplacian(const std::string &dep, int n);
/// x_c x_c
Expr xsq(int n);
/// name(t)
Expr tfunc(const std::string &name);
/// k-th partial t-derivative.
Expr dt(const Expr &e, int k = 1);

class FieldBuilder
{
  public:
    FieldBuilder &on(const Expr &dir, const Expr &c);
    /// c (psi d/dpsi - cpsi d/dcpsi)
    FieldBuilder &phase(const Expr &c);
    /// c (psi d/dpsi + cpsi d/dcpsi)
    FieldBuilder &scale(const Expr &c);
    VectorField build(std::string name, FieldClass cls = FieldClass::Point) const;

  private:
    std::vector<std::pair<Expr, Expr>> terms_;
};

VectorField P0();
VectorField Pa(int a);
VectorField Z1();
VectorField Z2();
VectorField J(int a, int b);
/// x_a-translation by U(t) with its phase and potential terms.
VectorField Qa(int a, const Expr &U, std::string name);
VectorField QA(int n, const Expr &A, std::string name);
VectorField QB(const Expr &B, std::string name);
void add_euclid(std::vector<VectorField> &out, int n);
VectorField J_conv(int a, int b, const Expr &E, std::string name);
/// literal: the x-part acts on every x_c, not only x_a.
VectorField Q_conv(int n, int a, const Expr &U, bool literal, std::string name);
VectorField QA_conv(int n, const Expr &A, std::string name);
VectorField Z3_conv();
VectorField Z4_conv();
/// k == nullptr drops the psi scaling.
VectorField euler_dilation(int n, const Expr *k, std::string name);
VectorField euler_projective(int n);

} // namespace jetsym::cat
