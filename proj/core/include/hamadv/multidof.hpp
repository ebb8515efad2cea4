#pragma once
// Lifting machinery for many degrees of freedom: embed planar problems into
// 2n dimensions, test the untouched-variables and product-structure
// conditions, reduce a 2n-dimensional integrator back to a planar one, and
// inspect the block structure of its Jacobian.

#include <span>
#include <string>
#include <vector>

#include "hamadv/adversary.hpp"
#include "hamadv/diagnostics.hpp"

namespace hamadv {

enum class LiftKind { single, product };

const char* lift_kind_name(LiftKind k);

/// Single: H*(q,p) = H(q1,p1). Product: H*(q,p) = sum_i H(q_i,p_i).
HamiltonianSpec lift(const HamiltonianSpec& planar, LiftKind kind, int n);

/// Embed a planar point the way the reduction does: zeros in the untouched
/// pairs for Single, the diagonal for Product.
PhasePoint embed(const PhasePoint& planar, LiftKind kind, int n);

struct UntouchedReport {
    double max_deviation = 0.0;
    int samples = 0;
};

/// Condition "untouched variables": on a Single lift, pairs (q_i,p_i) with
/// i >= 2 must come back unchanged. Reports the max deviation over samples.
UntouchedReport check_condition_untouched(const IntegratorConfig& config,
                                          const HamiltonianSpec& lifted,
                                          std::span<const PhasePoint> samples, double dt);

/// Same measurement against an arbitrary 2n-dimensional map.
UntouchedReport check_condition_untouched(const PhaseMap& map,
                                          std::span<const PhasePoint> samples);

struct ProductReport {
    double max_cross_deviation = 0.0;
    int samples = 0;
};

/// Condition "product structure": on a Product lift, each projected pair of
/// the lifted step must equal the same method run as a planar integrator on
/// the inner spec at that pair.
ProductReport check_condition_product(const IntegratorConfig& config,
                                      const HamiltonianSpec& lifted,
                                      std::span<const PhasePoint> samples, double dt);

/// Planar integrator that lifts its input, runs the 2n-dimensional step, and
/// projects the first pair back out. The tape keeps the full lifted query
/// points so agreement checks see everything the step looked at.
PlanarIntegrator reduce_to_planar(const IntegratorConfig& config, LiftKind kind, int n);

enum class BlockPattern { single, product };

/// Finite-difference Jacobian reorganized into 2x2 blocks in variable order
/// (q1,p1,...,qn,pn). For the product pattern the off-block norm is the
/// largest entry outside the block diagonal; for single it is the largest
/// deviation of the untouched rows from [0 | I].
struct BlockJacobianReport {
    std::vector<double> block_dets;
    double off_block_norm = 0.0;
    BlockPattern pattern = BlockPattern::single;
    Matrix jacobian; // interleaved variable order
    double fd_step = 0.0;
};

BlockJacobianReport jacobian_block_report(const PhaseMap& map, const PhasePoint& x, double h,
                                          BlockPattern pattern);

} // namespace hamadv
