#pragma once
// Reference flow maps: closed-form for the free particle and harmonic
// oscillator, quadrature-based for bump Hamiltonians in the monotone
// (no-turning-point) regime. These are the ground truth the diagnostics and
// adversary modules measure integrators against, so they deliberately avoid
// black-box ODE solving.

#include "hamadv/bump.hpp"
#include "hamadv/hamiltonian.hpp"
#include "hamadv/phase.hpp"

namespace hamadv {

/// Relative margin by which the energy must clear the potential's sup bound
/// before a bump flow is considered free of turning points.
inline constexpr double kTurningPointMargin = 1e-3;

/// (q + p t, p). Planar.
PhasePoint free_flow(const PhasePoint& x, double t);

/// Rotation (q cos wt + (p/w) sin wt, p cos wt - w q sin wt). Planar.
PhasePoint harmonic_flow(const PhasePoint& x, double t, double omega);

/// Travel time from q0 to q1 >= q0 at energy E:
///     integral of dx / sqrt(2 (E - V(x))).
/// Intervals where V vanishes identically contribute their exact closed-form
/// value; bump supports are integrated by adaptive Gauss-Kronrod bisection to
/// absolute tolerance quad_tol. Strictly increasing in q1. Throws
/// turning_point if E does not clear the potential bound.
double time_of_flight(const BumpPotential& potential, double q0, double q1, double energy,
                      double quad_tol = 1e-12);

/// Exact time-t flow of H = p^2/2 + V(q) from x0, for monotone motion
/// (p0 != 0, energy above the turning-point margin). Rightward motion inverts
/// time_of_flight by bracketed root-finding with time residual
/// <= 10 quad_tol; leftward motion is handled by reflection symmetry.
PhasePoint bump_flow(const BumpPotential& potential, const PhasePoint& x0, double t,
                     double quad_tol = 1e-12);

/// Dispatch to the exact flow of a planar spec (free particle, harmonic,
/// separable bump).
PhasePoint exact_flow(const HamiltonianSpec& spec, const PhasePoint& x, double t,
                      double quad_tol = 1e-12);

} // namespace hamadv
