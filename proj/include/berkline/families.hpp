#pragma once

#include "berkline/dynamics.hpp"

namespace berkline {

// Normal form for bicritical maps with critical points 0, infinity and a
// fixed point at 1, parameterized by two complex coordinates:
//   f_{u,v}(z) = (A z^d + B)/(C z^d + D),
//   A = (u+2)v + u^2 + 2u + 2,  B = uv + v^2 - 1,
//   C = -v^2 + uv + (u+1)^2,    D = (u + 2v + 2)v,
// with AD - BC = (v+1)^2 (u+v+1)^2. Throws Degenerate when that determinant
// vanishes.
ComplexRatMap milnorMap(const Scalar& u, const Scalar& v, int d, const ToleranceConfig& tol);
RationalMapL milnorMap(const CSeries& u, const CSeries& v, int d, const ToleranceConfig& tol);

enum class DegeneracyClass { none, lineAtInfinity, vLine, uvLine };
const char* degeneracyName(DegeneracyClass c);

// Classifies the t -> 0 limit of a parameter curve (u(t), v(t)) against the
// degeneracy locus: negative valuation means the line at infinity; v+1 -> 0
// and u+v+1 -> 0 are the two resultant lines.
DegeneracyClass degeneracyCheck(const CSeries& u, const CSeries& v, const ToleranceConfig& tol);

struct ExampleParams {
  int d = 2;
  std::vector<Scalar> gCoeffs;  // a_1, a_2, ...
};

// The worked family phi(z) = 1 + t/(1 - z^d + g(t)) with g = sum a_n t^n,
// built at the given working precision. Bicritical with critical points
// 0 and infinity; the Gauss point and xi(1; 1) always form a 2-cycle.
RationalMapL exampleMap(const ExampleParams& p, ExpQ workPrec, const ToleranceConfig& tol);

// Solves for coefficients (a1, a2, ...) that create a repelling 3-cycle
// through xi(0; 1/(d-1)) whose first-return map is conjugate to z^d:
//  - a1 makes the Gauss-residue orbit of 0 land on a hole after two steps of
//    the first-return reduction G (G(G(0)) = 1 with G(0) != 1 and
//    G'(G(0)) != 0); the map a1 -> G(0) is recovered from composed tangent
//    maps by a three-point Moebius fit, one candidate per hole branch.
//  - a2 then makes the next step land on the origin's direction: the leading
//    t-coefficient c of 1 - x2(t)^d + g(t) is affine in a2 and must equal -1.
//  - for d = 2 the cycle radius 1/(d-1) = 1 puts the third orbit point on the
//    boundary of the origin direction rather than inside it, so one further
//    coefficient a3 is solved (affine again) to fix that direction; for
//    d >= 3 it is automatic.
// Every returned parameter set passed the verification. Throws NoSolution
// when no branch verifies.
std::vector<ExampleParams> solveExampleCoefficients(int d, ExpQ workPrec,
                                                    const ToleranceConfig& tol);

// Verification used by the solver, exposed for reports: builds the map and
// checks the period-3 cycle at xi(0; 1/(d-1)) and the power-map conjugacy.
bool verifyExamplePair(const ExampleParams& p, ExpQ workPrec, const ToleranceConfig& tol);

}  // namespace berkline
