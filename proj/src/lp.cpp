#include "hedgetree/lp.hpp"

#include "hedgetree/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace hedgetree {

namespace {

using Row = std::vector<Rational>;

// Dense simplex tableau over exact rationals.
//
// The caller-facing program (free variables, equality and >= rows, optional
// bounds) is rewritten in standard form: every variable is split x = x+ - x-,
// bounds become extra >= rows, and each >= row gets a surplus column. Rows are
// sign-normalized to nonnegative right-hand sides, phase I introduces one
// artificial column per row, and both phases pivot under Bland's rule (lowest
// eligible column index enters, ties on the ratio test broken by lowest basic
// variable index), which rules out cycling without any perturbation.
struct Tableau {
    std::size_t n_struct = 0;  // split variables + surplus columns
    std::size_t n_total = 0;   // + one artificial per row
    std::vector<Row> rows;     // each row: n_total coefficients + rhs
    std::vector<std::size_t> basis;        // basic column per row
    Row cost;                              // reduced costs + (-objective value)

    Rational& rhs(std::size_t r) { return rows[r][n_total]; }

    void pivot(std::size_t r, std::size_t col) {
        Row& prow = rows[r];
        Rational inv = Rational(1) / prow[col];
        for (auto& v : prow) v *= inv;
        for (std::size_t s = 0; s < rows.size(); ++s) {
            if (s == r) continue;
            Rational factor = rows[s][col];
            if (factor == 0) continue;
            for (std::size_t j = 0; j <= n_total; ++j) rows[s][j] -= factor * prow[j];
        }
        Rational factor = cost[col];
        if (factor != 0) {
            for (std::size_t j = 0; j <= n_total; ++j) cost[j] -= factor * prow[j];
        }
        basis[r] = col;
    }

    // Recomputes the reduced-cost row for the given column costs (artificial
    // columns priced by `artificial_cost`).
    void load_costs(const Row& struct_cost, const Rational& artificial_cost) {
        cost.assign(n_total + 1, Rational(0));
        for (std::size_t j = 0; j < n_struct; ++j) cost[j] = struct_cost[j];
        for (std::size_t j = n_struct; j < n_total; ++j) cost[j] = artificial_cost;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            Rational cb = cost[basis[r]];
            if (cb == 0) continue;
            for (std::size_t j = 0; j <= n_total; ++j) cost[j] -= cb * rows[r][j];
        }
    }

    // Runs Bland-rule pivoting until optimal or unbounded. Columns with index
    // >= col_limit may not enter. Returns the entering column on unboundedness.
    std::optional<std::size_t> run(std::size_t col_limit) {
        for (;;) {
            std::size_t enter = n_total;
            for (std::size_t j = 0; j < col_limit; ++j) {
                if (cost[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == n_total) return std::nullopt;

            std::size_t leave = rows.size();
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r][enter] <= 0) continue;
                if (leave == rows.size()) {
                    leave = r;
                    continue;
                }
                Rational lhs = rhs(r) * rows[leave][enter];
                Rational rhs_ = rhs(leave) * rows[r][enter];
                if (lhs < rhs_ || (lhs == rhs_ && basis[r] < basis[leave])) leave = r;
            }
            if (leave == rows.size()) return enter;
            pivot(leave, enter);
        }
    }
};

struct NormalizedRow {
    Row coeffs;     // over the original (unsplit) variables
    Rational rhs;
    bool is_eq = false;
    int sigma = 1;  // +1 if kept, -1 if the row was negated during normalization
};

void require(bool condition, const char* what) {
    if (!condition) throw std::invalid_argument(what);
}

}  // namespace

LpOutcome solve(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars();
    require(lp.eq_lhs.size() == lp.eq_rhs.size(), "eq_lhs/eq_rhs size mismatch");
    require(lp.ineq_lhs.size() == lp.ineq_rhs.size(), "ineq_lhs/ineq_rhs size mismatch");
    require(lp.lower.empty() || lp.lower.size() == n, "lower bound vector size mismatch");
    require(lp.upper.empty() || lp.upper.size() == n, "upper bound vector size mismatch");
    for (const auto& row : lp.eq_lhs) require(row.size() == n, "eq row width mismatch");
    for (const auto& row : lp.ineq_lhs) require(row.size() == n, "ineq row width mismatch");

    // Assemble normalized rows: equalities first, then the caller's >= rows,
    // then lower-bound rows x_j >= l, then upper-bound rows -x_j >= -u.
    std::vector<NormalizedRow> norm;
    const std::size_t me = lp.eq_lhs.size();
    for (std::size_t r = 0; r < me; ++r) {
        norm.push_back({lp.eq_lhs[r], lp.eq_rhs[r], true, 1});
    }
    for (std::size_t k = 0; k < lp.ineq_lhs.size(); ++k) {
        norm.push_back({lp.ineq_lhs[k], lp.ineq_rhs[k], false, 1});
    }
    for (std::size_t j = 0; j < lp.lower.size(); ++j) {
        if (!lp.lower[j]) continue;
        Row row(n, Rational(0));
        row[j] = 1;
        norm.push_back({std::move(row), *lp.lower[j], false, 1});
    }
    for (std::size_t j = 0; j < lp.upper.size(); ++j) {
        if (!lp.upper[j]) continue;
        Row row(n, Rational(0));
        row[j] = -1;
        norm.push_back({std::move(row), -*lp.upper[j], false, 1});
    }
    const std::size_t m = norm.size();
    const std::size_t mi = m - me;

    Row cmin(n);
    for (std::size_t j = 0; j < n; ++j) {
        cmin[j] = lp.sense == LpSense::Minimize ? lp.objective[j] : -lp.objective[j];
    }

    // Standard-form columns: [x+ (n) | x- (n) | surplus (mi)].
    const std::size_t n_struct = 2 * n + mi;
    Tableau tab;
    tab.n_struct = n_struct;
    tab.n_total = n_struct + m;
    tab.rows.assign(m, Row(tab.n_total + 1, Rational(0)));
    tab.basis.resize(m);

    std::size_t surplus_index = 0;
    for (std::size_t r = 0; r < m; ++r) {
        NormalizedRow& src = norm[r];
        if (src.rhs < 0) {
            src.sigma = -1;
            for (auto& v : src.coeffs) v = -v;
            src.rhs = -src.rhs;
        }
        Row& row = tab.rows[r];
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = src.coeffs[j];
            row[n + j] = -src.coeffs[j];
        }
        if (!src.is_eq) {
            row[2 * n + surplus_index] = src.sigma == 1 ? Rational(-1) : Rational(1);
            ++surplus_index;
        }
        row[tab.n_total] = src.rhs;
        tab.basis[r] = n_struct + r;
        tab.rows[r][n_struct + r] = 1;
    }

    // Phase I: minimize the sum of artificials.
    tab.load_costs(Row(n_struct, Rational(0)), Rational(1));
    if (tab.run(tab.n_total)) {
        throw InternalError("phase I reported unbounded");
    }
    Rational phase1_value = -tab.cost[tab.n_total];

    LpOutcome out;
    if (phase1_value > 0) {
        // Farkas certificate from the phase-I duals: the reduced cost of
        // artificial column r is 1 - y_r.
        std::vector<Rational> y(m, Rational(0));
        for (std::size_t r = 0; r < m; ++r) {
            y[r] = norm[r].sigma * (Rational(1) - tab.cost[n_struct + r]);
        }
        out.status = LpStatus::Infeasible;
        out.dual_eq.assign(y.begin(), y.begin() + me);
        out.dual_ineq.assign(y.begin() + me, y.end());

        Row combo(n, Rational(0));
        Rational rhs_combo = 0;
        for (std::size_t r = 0; r < m; ++r) {
            Rational yr = y[r];
            if (r >= me && yr < 0) throw InternalError("Farkas multiplier sign");
            if (yr == 0) continue;
            const Rational sgn(norm[r].sigma);
            for (std::size_t j = 0; j < n; ++j) combo[j] += yr * sgn * norm[r].coeffs[j];
            rhs_combo += yr * sgn * norm[r].rhs;
        }
        for (const auto& v : combo) {
            if (v != 0) throw InternalError("Farkas combination not null");
        }
        if (rhs_combo <= 0) throw InternalError("Farkas certificate not separating");
        return out;
    }

    // Drive leftover artificials out of the basis; rows that cannot pivot are
    // redundant and get dropped. Their artificial columns remain so the dual
    // extraction can price them later.
    for (std::size_t r = tab.rows.size(); r-- > 0;) {
        if (tab.basis[r] < n_struct) continue;
        std::size_t enter = n_struct;
        for (std::size_t j = 0; j < n_struct; ++j) {
            if (tab.rows[r][j] != 0) {
                enter = j;
                break;
            }
        }
        if (enter < n_struct) {
            tab.pivot(r, enter);
        } else {
            if (tab.rhs(r) != 0) throw InternalError("redundant row with nonzero rhs");
            tab.rows.erase(tab.rows.begin() + static_cast<std::ptrdiff_t>(r));
            tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(r));
        }
    }

    // Phase II over the structural columns only.
    Row struct_cost(n_struct, Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
        struct_cost[j] = cmin[j];
        struct_cost[n + j] = -cmin[j];
    }
    tab.load_costs(struct_cost, Rational(0));
    std::optional<std::size_t> unbounded_col = tab.run(n_struct);

    auto extract_point = [&]() {
        std::vector<Rational> std_x(n_struct, Rational(0));
        for (std::size_t r = 0; r < tab.rows.size(); ++r) {
            if (tab.basis[r] < n_struct) std_x[tab.basis[r]] = tab.rhs(r);
        }
        std::vector<Rational> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = std_x[j] - std_x[n + j];
        return x;
    };

    auto check_feasible = [&](const std::vector<Rational>& x) {
        for (std::size_t r = 0; r < me; ++r) {
            Rational acc = 0;
            const Rational sgn(norm[r].sigma);
            for (std::size_t j = 0; j < n; ++j) acc += sgn * norm[r].coeffs[j] * x[j];
            if (acc != sgn * norm[r].rhs) throw InternalError("primal violates equality");
        }
        for (std::size_t r = me; r < m; ++r) {
            Rational acc = 0;
            const Rational sgn(norm[r].sigma);
            for (std::size_t j = 0; j < n; ++j) acc += sgn * norm[r].coeffs[j] * x[j];
            if (acc < sgn * norm[r].rhs) throw InternalError("primal violates inequality");
        }
    };

    if (unbounded_col) {
        out.status = LpStatus::Unbounded;
        out.primal = extract_point();
        check_feasible(out.primal);

        std::vector<Rational> std_d(n_struct, Rational(0));
        std_d[*unbounded_col] = 1;
        for (std::size_t r = 0; r < tab.rows.size(); ++r) {
            if (tab.basis[r] < n_struct) std_d[tab.basis[r]] = -tab.rows[r][*unbounded_col];
        }
        out.ray.resize(n);
        for (std::size_t j = 0; j < n; ++j) out.ray[j] = std_d[j] - std_d[n + j];

        Rational drop = 0;
        for (std::size_t j = 0; j < n; ++j) drop += cmin[j] * out.ray[j];
        if (drop >= 0) throw InternalError("unbounded ray does not improve objective");
        for (std::size_t r = 0; r < m; ++r) {
            Rational acc = 0;
            const Rational sgn(norm[r].sigma);
            for (std::size_t j = 0; j < n; ++j) acc += sgn * norm[r].coeffs[j] * out.ray[j];
            if (norm[r].is_eq ? acc != 0 : acc < 0) throw InternalError("unbounded ray leaves feasible cone");
        }
        return out;
    }

    out.status = LpStatus::Optimal;
    out.primal = extract_point();
    check_feasible(out.primal);
    Rational value = -tab.cost[tab.n_total];
    out.optimum = lp.sense == LpSense::Minimize ? value : -value;

    // Duals from the artificial columns. Artificial column q records how the
    // current rows combine original row q, so c_B against it prices row q.
    // Dropped redundant rows keep their column and are priced like any other;
    // zeroing them instead would lose the dual mass their dependents carry.
    std::vector<Rational> y(m, Rational(0));
    for (std::size_t r = 0; r < tab.rows.size(); ++r) {
        if (tab.basis[r] >= n_struct) throw InternalError("artificial variable still basic");
    }
    for (std::size_t q = 0; q < m; ++q) {
        const std::size_t col = n_struct + q;
        Rational acc = 0;
        for (std::size_t r = 0; r < tab.rows.size(); ++r) {
            const std::size_t b = tab.basis[r];
            if (b < n_struct && struct_cost[b] != 0) acc += struct_cost[b] * tab.rows[r][col];
        }
        y[q] = norm[q].sigma * acc;
    }
    out.dual_eq.assign(y.begin(), y.begin() + me);
    out.dual_ineq.assign(y.begin() + me, y.end());

    // Exact certificate verification: dual feasibility, strong duality, and
    // complementary slackness in the minimization form.
    Row combo(n, Rational(0));
    Rational dual_value = 0;
    for (std::size_t r = 0; r < m; ++r) {
        const Rational yr = y[r];
        if (r >= me && yr < 0) throw InternalError("negative inequality dual");
        if (yr == 0) continue;
        const Rational sgn(norm[r].sigma);
        for (std::size_t j = 0; j < n; ++j) combo[j] += yr * sgn * norm[r].coeffs[j];
        dual_value += yr * sgn * norm[r].rhs;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (combo[j] != cmin[j]) throw InternalError("duals do not reproduce objective");
    }
    if (dual_value != value) throw InternalError("strong duality gap");
    for (std::size_t r = me; r < m; ++r) {
        if (y[r] == 0) continue;
        Rational acc = 0;
        const Rational sgn(norm[r].sigma);
        for (std::size_t j = 0; j < n; ++j) acc += sgn * norm[r].coeffs[j] * out.primal[j];
        if (acc != sgn * norm[r].rhs) throw InternalError("complementary slackness violated");
    }
    return out;
}

namespace {

// Solves rows_S x = rhs_S for a square subsystem; returns nullopt if singular.
std::optional<std::vector<Rational>> solve_square(std::vector<Row> a, std::vector<Rational> b) {
    const std::size_t k = a.size();
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        while (piv < k && a[piv][col] == 0) ++piv;
        if (piv == k) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        Rational inv = Rational(1) / a[col][col];
        for (auto& v : a[col]) v *= inv;
        b[col] *= inv;
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            Rational factor = a[r][col];
            if (factor == 0) continue;
            for (std::size_t j = 0; j < k; ++j) a[r][j] -= factor * a[col][j];
            b[r] -= factor * b[col];
        }
    }
    return b;
}

}  // namespace

std::vector<std::vector<Rational>> vertices(const Polytope& polytope, int cap) {
    const std::size_t dim = static_cast<std::size_t>(polytope.dim);
    if (polytope.dim < 0) throw std::invalid_argument("negative polytope dimension");
    if (polytope.dim > cap) {
        throw Error(ErrorCode::DimensionTooLarge,
                    "vertex enumeration over " + std::to_string(polytope.dim) +
                        " variables exceeds cap " + std::to_string(cap));
    }

    LinearProgram probe;
    probe.objective.assign(dim, Rational(0));
    probe.eq_lhs = polytope.eq_lhs;
    probe.eq_rhs = polytope.eq_rhs;
    probe.ineq_lhs = polytope.ineq_lhs;
    probe.ineq_rhs = polytope.ineq_rhs;
    if (solve(probe).status == LpStatus::Infeasible) return {};

    for (std::size_t j = 0; j < dim; ++j) {
        for (LpSense sense : {LpSense::Minimize, LpSense::Maximize}) {
            LinearProgram dir = probe;
            dir.sense = sense;
            dir.objective[j] = 1;
            if (solve(dir).status == LpStatus::Unbounded) {
                throw Error(ErrorCode::Unbounded,
                            "polytope is unbounded in coordinate " + std::to_string(j));
            }
        }
    }

    std::vector<Row> rows = polytope.eq_lhs;
    std::vector<Rational> rhs = polytope.eq_rhs;
    rows.insert(rows.end(), polytope.ineq_lhs.begin(), polytope.ineq_lhs.end());
    rhs.insert(rhs.end(), polytope.ineq_rhs.begin(), polytope.ineq_rhs.end());
    const std::size_t m = rows.size();

    std::vector<std::vector<Rational>> found;
    if (dim == 0) {
        found.push_back({});
        return found;
    }
    if (m < dim) throw InternalError("bounded polytope with too few constraints");

    std::vector<std::size_t> pick(dim);
    for (std::size_t i = 0; i < dim; ++i) pick[i] = i;
    auto satisfies_all = [&](const std::vector<Rational>& x) {
        for (std::size_t r = 0; r < polytope.eq_lhs.size(); ++r) {
            Rational acc = 0;
            for (std::size_t j = 0; j < dim; ++j) acc += polytope.eq_lhs[r][j] * x[j];
            if (acc != polytope.eq_rhs[r]) return false;
        }
        for (std::size_t r = 0; r < polytope.ineq_lhs.size(); ++r) {
            Rational acc = 0;
            for (std::size_t j = 0; j < dim; ++j) acc += polytope.ineq_lhs[r][j] * x[j];
            if (acc < polytope.ineq_rhs[r]) return false;
        }
        return true;
    };

    for (;;) {
        std::vector<Row> sub;
        std::vector<Rational> sub_rhs;
        sub.reserve(dim);
        for (std::size_t idx : pick) {
            sub.push_back(rows[idx]);
            sub_rhs.push_back(rhs[idx]);
        }
        if (auto x = solve_square(std::move(sub), std::move(sub_rhs))) {
            if (satisfies_all(*x)) found.push_back(std::move(*x));
        }

        // Next dim-subset in lexicographic order.
        std::size_t i = dim;
        while (i > 0) {
            --i;
            if (pick[i] != i + m - dim) break;
            if (i == 0) {
                std::sort(found.begin(), found.end());
                found.erase(std::unique(found.begin(), found.end()), found.end());
                if (found.empty()) throw InternalError("feasible bounded polytope without vertices");
                return found;
            }
        }
        ++pick[i];
        for (std::size_t j = i + 1; j < dim; ++j) pick[j] = pick[j - 1] + 1;
    }
}

}  // namespace hedgetree
