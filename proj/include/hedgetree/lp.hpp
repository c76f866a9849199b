#pragma once

#include "hedgetree/rational.hpp"

#include <optional>
#include <vector>

namespace hedgetree {

// All linear programs in the engine are solved exactly. The solver runs a
// dense two-phase primal simplex over rationals with Bland's rule, so it
// terminates on every input without any notion of tolerance.

enum class LpSense { Minimize, Maximize };

enum class LpStatus { Optimal, Infeasible, Unbounded };

// min/max objective . x
//   subject to  eq_lhs x = eq_rhs
//               ineq_lhs x >= ineq_rhs
//               lower[j] <= x_j <= upper[j]   (either bound may be absent)
// Variables are free by default; bounds vectors may be empty or full-length.
struct LinearProgram {
    LpSense sense = LpSense::Minimize;
    std::vector<Rational> objective;
    std::vector<std::vector<Rational>> eq_lhs;
    std::vector<Rational> eq_rhs;
    std::vector<std::vector<Rational>> ineq_lhs;
    std::vector<Rational> ineq_rhs;
    std::vector<std::optional<Rational>> lower;
    std::vector<std::optional<Rational>> upper;

    std::size_t num_vars() const { return objective.size(); }
};

// Certificates are stated for the equivalent minimization form (a maximization
// is solved as min of the negated objective; `optimum` and `ray` are always in
// terms of the caller's objective). Dual entries for bound constraints are
// folded in after the caller's inequality rows, in the order
// [ineq rows..., lower bounds..., upper bounds...], visible in dual_ineq.
//
//   Optimal:    primal feasible; dual_eq (free) and dual_ineq (>= 0) satisfy
//               eq_lhs^T dual_eq + rows^T dual_ineq = min-form objective and
//               complementary slackness; dual objective equals the optimum.
//   Infeasible: (dual_eq, dual_ineq) is a Farkas certificate:
//               eq_lhs^T dual_eq + rows^T dual_ineq = 0, dual_ineq >= 0,
//               dual_eq . eq_rhs + dual_ineq . rhs > 0.
//   Unbounded:  primal is a feasible point and ray an improving direction:
//               eq_lhs ray = 0, rows ray >= 0, objective strictly improving.
// Every certificate is re-substituted and verified inside solve(); a failure
// throws InternalError rather than returning a wrong answer.
struct LpOutcome {
    LpStatus status = LpStatus::Optimal;
    Rational optimum;
    std::vector<Rational> primal;
    std::vector<Rational> dual_eq;
    std::vector<Rational> dual_ineq;
    std::vector<Rational> ray;
};

LpOutcome solve(const LinearProgram& lp);

// A polytope {x : eq_lhs x = eq_rhs, ineq_lhs x >= ineq_rhs} in R^dim.
struct Polytope {
    int dim = 0;
    std::vector<std::vector<Rational>> eq_lhs;
    std::vector<Rational> eq_rhs;
    std::vector<std::vector<Rational>> ineq_lhs;
    std::vector<Rational> ineq_rhs;
};

inline constexpr int kDefaultVertexCap = 12;

// Exact vertex enumeration by inspecting every maximal-rank active set
// (n-subsets of the stacked constraint rows). Returns the vertex list sorted
// lexicographically, duplicates removed. Requires the polytope to be bounded
// (throws Error(Unbounded) otherwise, detected by per-coordinate LPs) and
// dim <= cap (throws Error(DimensionTooLarge) otherwise). An empty polytope
// yields an empty list.
std::vector<std::vector<Rational>> vertices(const Polytope& polytope,
                                            int cap = kDefaultVertexCap);

}  // namespace hedgetree
