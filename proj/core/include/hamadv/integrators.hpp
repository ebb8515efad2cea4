#pragma once
// One-step integrators that see the Hamiltonian only through taped
// eval_derivative queries. Solver failures are in-band: a step either returns
// a Defined point or an Undefined outcome with a machine-readable reason.

#include <optional>
#include <string>
#include <vector>

#include "hamadv/hamiltonian.hpp"
#include "hamadv/phase.hpp"

namespace hamadv {

enum class Method {
    explicit_euler,
    symplectic_euler,
    leapfrog,
    rk4,
    implicit_midpoint,
    step_and_project,
};

const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);
bool method_is_explicit(Method m);

/// Nominal one-step convergence order (step_and_project inherits its base's).
int nominal_order(Method m, std::optional<Method> base = std::nullopt);

enum class ImplicitSolver { fixed_point, newton };

struct IntegratorConfig {
    Method method = Method::leapfrog;
    std::optional<Method> base;  // required iff method == step_and_project
    double solver_tol = 1e-12;
    int max_iters = 100;
    ImplicitSolver solver = ImplicitSolver::fixed_point;
    double damping = 1.0; // fixed-point relaxation factor in (0, 1]
};

void validate(const IntegratorConfig& config);
std::string describe(const IntegratorConfig& config);

enum class UndefinedReason { solver_diverged, max_iterations, projection_failed, gradient_vanishes };
const char* reason_name(UndefinedReason r);

class StepResult {
public:
    static StepResult defined(PhasePoint x) { return StepResult(std::move(x)); }
    static StepResult undefined(UndefinedReason r) { return StepResult(r); }

    bool is_defined() const { return point_.has_value(); }
    const PhasePoint& point() const;
    UndefinedReason reason() const;

private:
    explicit StepResult(PhasePoint x) : point_(std::move(x)) {}
    explicit StepResult(UndefinedReason r) : reason_(r) {}

    std::optional<PhasePoint> point_;
    UndefinedReason reason_ = UndefinedReason::solver_diverged;
};

bool bits_equal(const StepResult& a, const StepResult& b);

/// One step of an explicit method (explicit_euler, symplectic_euler,
/// leapfrog, rk4). Always Defined; every gradient query is taped.
StepResult explicit_step(const IntegratorConfig& config, const HamiltonianSpec& spec,
                         const PhasePoint& x, double dt, QueryTape& tape);

/// Solves y = x + dt J grad H((x+y)/2) to residual <= solver_tol in max-norm.
/// The residual check's own gradient queries land on the tape, so a replay
/// against any tape-agreeing Hamiltonian reproduces the step bit-identically.
StepResult implicit_midpoint_step(const IntegratorConfig& config, const HamiltonianSpec& spec,
                                  const PhasePoint& x, double dt, QueryTape& tape);

/// Moves y along grad H(y) until |H(z) - target_energy| <= solver_tol.
StepResult project_to_energy(const HamiltonianSpec& spec, const PhasePoint& y, double target_energy,
                             const IntegratorConfig& config, QueryTape& tape);

/// Explicit base step followed by projection back onto the energy level set
/// of the input point.
StepResult step_and_project(const IntegratorConfig& config, const HamiltonianSpec& spec,
                            const PhasePoint& x, double dt, QueryTape& tape);

/// Dispatch on config.method.
StepResult step(const IntegratorConfig& config, const HamiltonianSpec& spec, const PhasePoint& x,
                double dt, QueryTape& tape);

/// Repeated steps with a fresh tape per step; stops at the first Undefined,
/// which is included as the last element.
std::vector<StepResult> iterate(const IntegratorConfig& config, const HamiltonianSpec& spec,
                                const PhasePoint& x0, double dt, int n_steps);

/// Upper bound on the number of tape records a single step may write.
std::size_t tape_record_bound(const IntegratorConfig& config, int dim);

} // namespace hamadv
