#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ssdopt/lp/problem.hpp"

namespace ssdopt::lp {

/// Dense two-phase simplex on a condensed (nonbasic-columns-only) tableau.
///
/// Pricing is Dantzig's largest reduced cost; after `bland_after` consecutive degenerate
/// pivots it switches to Bland's smallest-index rule until the objective moves again,
/// which rules out cycling. Rows may be appended after an optimal solve; the next
/// solve() then restarts from the previous basis with the dual simplex.
///
/// Internally every original variable is mapped to y >= 0 (or a free y) by shifting and
/// reflecting its bounds; a finite upper bound on a lower-bounded variable becomes an
/// extra row. Every internal row reads g·y + s = h with its own slack s, which is fixed
/// at zero for equality rows.
class Simplex {
public:
    explicit Simplex(LpProblem problem, SolverOptions options = {})
        : problem_(std::move(problem)), opt_(options) {
        problem_.validate();
    }

    const LpProblem& problem() const noexcept { return problem_; }
    std::size_t iterations() const noexcept { return iterations_; }
    std::size_t num_internal_rows() const noexcept { return h_.size(); }

    /// Appends a constraint. After an optimal solve the existing basis is kept.
    void add_constraint(Constraint c) {
        if (c.coeffs.size() != problem_.num_vars()) {
            throw std::invalid_argument("constraint has " + std::to_string(c.coeffs.size()) +
                                        " coefficients, expected " + std::to_string(problem_.num_vars()));
        }
        LpProblem probe;  // reuse validation of a single row
        probe.objective.assign(problem_.num_vars(), 0.0);
        probe.lower.assign(problem_.num_vars(), 0.0);
        probe.upper.assign(problem_.num_vars(), kInf);
        probe.constraints.push_back(c);
        probe.validate();

        problem_.constraints.push_back(std::move(c));
        if (!warm_) return;
        for (auto& row : internal_rows(problem_.constraints.back())) append_row_warm(row);
    }

    LpSolution solve() {
        LpSolution sol;
        const std::size_t start_iters = iterations_;
        Status st;
        if (warm_) {
            st = run_dual();
            if (st == Status::optimal) st = run_primal(false);
        } else {
            build();
            st = run_phase1();
            if (st == Status::optimal) st = run_primal(false);
        }
        if (st == Status::optimal) st = verify_or_repair(sol.message);
        sol.status = st;
        sol.iterations = iterations_ - start_iters;
        warm_ = st == Status::optimal;
        if (st == Status::optimal) {
            sol.values = extract();
            sol.objective_value = 0.0;
            for (std::size_t j = 0; j < sol.values.size(); ++j) {
                sol.objective_value += problem_.objective[j] * sol.values[j];
            }
        } else if (sol.message.empty()) {
            sol.message = std::string(to_string(st));
        }
        return sol;
    }

private:
    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vector = Eigen::VectorXd;

    enum class Kind : std::uint8_t { structural, slack, artificial };
    enum class Bound : std::uint8_t { nonneg, free, fixed };

    struct Var {
        Kind kind;
        Bound bound;
        std::size_t ref;  // structural: internal column; slack: internal row
        bool flipped = false;
        bool basic = false;
        std::size_t pos = 0;  // tableau row if basic, tableau column otherwise
    };

    struct Row {
        Vector g;
        double h;
        Bound slack;
    };

    struct VarMap {
        double offset;
        double sign;
        bool free;
    };

    // ---- problem transformation ------------------------------------------------

    void build_maps() {
        const auto n = problem_.num_vars();
        maps_.resize(n);
        bound_rows_.clear();
        for (std::size_t j = 0; j < n; ++j) {
            const double lo = problem_.lower[j];
            const double hi = problem_.upper[j];
            if (std::isfinite(lo)) {
                maps_[j] = {lo, 1.0, false};
                if (std::isfinite(hi)) bound_rows_.push_back(j);
            } else if (std::isfinite(hi)) {
                maps_[j] = {hi, -1.0, false};
            } else {
                maps_[j] = {0.0, 1.0, true};
            }
        }
    }

    std::vector<Row> internal_rows(const Constraint& c) const {
        const auto n = problem_.num_vars();
        Vector g(n);
        double shift = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            g[j] = c.coeffs[j] * maps_[j].sign;
            shift += c.coeffs[j] * maps_[j].offset;
        }
        std::vector<Row> out;
        switch (c.relation()) {
            case Relation::le: out.push_back({g, c.upper - shift, Bound::nonneg}); break;
            case Relation::ge: out.push_back({-g, shift - c.lower, Bound::nonneg}); break;
            case Relation::eq: out.push_back({g, c.upper - shift, Bound::fixed}); break;
            case Relation::range:
                out.push_back({g, c.upper - shift, Bound::nonneg});
                out.push_back({-g, shift - c.lower, Bound::nonneg});
                break;
        }
        return out;
    }

    std::size_t new_var(Kind k, Bound b, std::size_t ref) {
        vars_.push_back({k, b, ref});
        return vars_.size() - 1;
    }

    /// Cold start from the slack basis. Rows with a negative right-hand side share one
    /// artificial column (-1 in each such row), pivoted in at the most negative row.
    void build() {
        build_maps();
        const auto n = problem_.num_vars();
        std::vector<Row> rows;
        for (const std::size_t j : bound_rows_) {
            Vector g = Vector::Zero(n);
            g[j] = 1.0;
            rows.push_back({g, problem_.upper[j] - problem_.lower[j], Bound::nonneg});
        }
        for (const auto& c : problem_.constraints) {
            for (auto& r : internal_rows(c)) rows.push_back(std::move(r));
        }
        const auto m = rows.size();

        vars_.clear();
        G_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
        h_.assign(m, 0.0);
        slack_of_row_.assign(m, 0);
        art_col_ = Vector::Zero(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < n; ++j) {
            new_var(Kind::structural, maps_[j].free ? Bound::free : Bound::nonneg, j);
        }
        std::size_t worst = npos;
        for (std::size_t i = 0; i < m; ++i) {
            // a pinned slack makes the sign of an equality row irrelevant
            if (rows[i].slack == Bound::fixed && rows[i].h < 0.0) {
                rows[i].g = -rows[i].g;
                rows[i].h = -rows[i].h;
            }
            G_.row(static_cast<Eigen::Index>(i)) = rows[i].g.transpose();
            h_[i] = rows[i].h;
            slack_of_row_[i] = new_var(Kind::slack, rows[i].slack, i);
            if (rows[i].h < 0.0) {
                art_col_[static_cast<Eigen::Index>(i)] = -1.0;
                if (worst == npos || rows[i].h < rows[worst].h) worst = i;
            }
        }

        const auto cols = n + (worst != npos ? 1 : 0);
        T_ = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(cols));
        if (m > 0) T_.leftCols(static_cast<Eigen::Index>(n)) = G_;
        beta_ = h_;
        basis_.assign(m, 0);
        nonbasic_.assign(cols, 0);
        for (std::size_t j = 0; j < n; ++j) set_nonbasic(j, j);
        for (std::size_t i = 0; i < m; ++i) set_basic(slack_of_row_[i], i);
        d_ = Vector::Zero(static_cast<Eigen::Index>(cols));
        z_ = 0.0;
        if (worst != npos) {
            artificial_ = new_var(Kind::artificial, Bound::fixed, 0);
            set_nonbasic(artificial_, n);
            T_.col(static_cast<Eigen::Index>(n)) = art_col_;
            pivot(worst, n);
        } else {
            artificial_ = npos;
        }
        since_refactor_ = 0;
        warm_ = false;
    }

    void set_basic(std::size_t v, std::size_t row) {
        vars_[v].basic = true;
        vars_[v].pos = row;
        basis_[row] = v;
    }

    void set_nonbasic(std::size_t v, std::size_t col) {
        vars_[v].basic = false;
        vars_[v].pos = col;
        nonbasic_[col] = v;
    }

    /// Appends a row to an optimal tableau, expressed in the current nonbasic variables.
    void append_row_warm(const Row& row) {
        const auto m = h_.size();
        const auto n = problem_.num_vars();
        G_.conservativeResize(static_cast<Eigen::Index>(m + 1), Eigen::NoChange);
        G_.row(static_cast<Eigen::Index>(m)) = row.g.transpose();
        h_.push_back(row.h);
        art_col_.conservativeResize(static_cast<Eigen::Index>(m + 1));
        art_col_[static_cast<Eigen::Index>(m)] = 0.0;

        // weight of each tableau row's basic variable in g·y
        Vector w = Vector::Zero(static_cast<Eigen::Index>(m));
        Eigen::RowVectorXd new_row = Eigen::RowVectorXd::Zero(T_.cols());
        double b = row.h;
        for (std::size_t j = 0; j < n; ++j) {
            const double gj = row.g[static_cast<Eigen::Index>(j)];
            if (gj == 0.0) continue;
            const auto& v = vars_[j];
            const double coef = v.flipped ? -gj : gj;
            if (v.basic) {
                w[static_cast<Eigen::Index>(v.pos)] = coef;
                b -= coef * beta_[v.pos];
            } else {
                new_row[static_cast<Eigen::Index>(v.pos)] += coef;
            }
        }
        new_row.noalias() -= w.transpose() * T_;

        T_.conservativeResize(static_cast<Eigen::Index>(m + 1), Eigen::NoChange);
        T_.row(static_cast<Eigen::Index>(m)) = new_row;
        beta_.push_back(b);
        basis_.push_back(0);
        const auto s = new_var(Kind::slack, row.slack, m);
        slack_of_row_.push_back(s);
        set_basic(s, m);
    }

    // ---- pivoting ------------------------------------------------------------------

    void pivot(std::size_t r, std::size_t q) {
        const auto ri = static_cast<Eigen::Index>(r);
        const auto qi = static_cast<Eigen::Index>(q);
        const double piv = T_(ri, qi);

        Eigen::RowVectorXd prow = T_.row(ri) / piv;
        prow[qi] = 1.0 / piv;
        Vector col = T_.col(qi);
        col[ri] = 0.0;
        T_.col(qi).setZero();
        T_.noalias() -= col * prow;
        T_.row(ri) = prow;

        const double br = beta_[r] / piv;
        for (std::size_t i = 0; i < beta_.size(); ++i) beta_[i] -= col[static_cast<Eigen::Index>(i)] * br;
        beta_[r] = br;

        const double dq = d_[qi];
        d_[qi] = 0.0;
        d_.noalias() -= dq * prow.transpose();
        z_ += dq * br;

        const auto leaving = basis_[r];
        const auto entering = nonbasic_[q];
        set_basic(entering, r);
        set_nonbasic(leaving, q);
        ++iterations_;
        ++since_refactor_;
    }

    void flip_column(std::size_t q) {
        const auto qi = static_cast<Eigen::Index>(q);
        T_.col(qi) *= -1.0;
        d_[qi] = -d_[qi];
        vars_[nonbasic_[q]].flipped = !vars_[nonbasic_[q]].flipped;
    }

    double cost(std::size_t v, bool phase1) const {
        const auto& var = vars_[v];
        if (phase1) return (var.bound == Bound::fixed) ? -1.0 : 0.0;
        if (var.kind != Kind::structural) return 0.0;
        const double c = problem_.objective[var.ref] * maps_[var.ref].sign;
        return var.flipped ? -c : c;
    }

    void reset_objective(bool phase1) {
        const auto m = beta_.size();
        Vector cb(static_cast<Eigen::Index>(m));
        z_ = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            cb[static_cast<Eigen::Index>(i)] = cost(basis_[i], phase1);
            z_ += cb[static_cast<Eigen::Index>(i)] * beta_[i];
        }
        d_.resize(T_.cols());
        for (std::size_t j = 0; j < nonbasic_.size(); ++j) d_[static_cast<Eigen::Index>(j)] = cost(nonbasic_[j], phase1);
        if (m > 0) d_.noalias() -= T_.transpose() * cb;
        phase1_ = phase1;
    }

    std::size_t iteration_cap() const {
        if (opt_.max_iterations) return opt_.max_iterations;
        return 50 * (beta_.size() + nonbasic_.size()) + 10000;
    }

    /// A nonbasic variable that may enter: not pinned at zero.
    bool can_enter(std::size_t v) const {
        const auto& var = vars_[v];
        if (var.bound == Bound::fixed) return false;
        return true;
    }

    Status run_phase1() {
        bool needed = false;
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            if (vars_[basis_[i]].bound == Bound::fixed) needed = true;
        }
        if (!needed) return Status::optimal;
        reset_objective(true);
        const Status st = run_primal_loop(true);
        if (st != Status::optimal) return st;
        if (z_ < -opt_.feasibility_tol * std::max(1.0, h_norm())) return Status::infeasible;

        // Drive remaining zero-level pinned variables out of the basis where possible.
        for (std::size_t r = 0; r < basis_.size(); ++r) {
            if (vars_[basis_[r]].bound != Bound::fixed) continue;
            std::size_t best = npos;
            double best_abs = 1e-7;
            for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
                if (!can_enter(nonbasic_[j])) continue;
                const double a = std::abs(T_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
                if (a > best_abs) {
                    best_abs = a;
                    best = j;
                }
            }
            if (best != npos) {
                beta_[r] = 0.0;
                pivot(r, best);
            }
        }
        return Status::optimal;
    }

    double h_norm() const {
        double s = 0.0;
        for (double v : h_) s = std::max(s, std::abs(v));
        return s;
    }

    Status run_primal(bool phase1) {
        reset_objective(phase1);
        return run_primal_loop(phase1);
    }

    Status run_primal_loop(bool phase1) {
        const std::size_t cap = iterations_ + iteration_cap();
        std::size_t degenerate = 0;
        while (true) {
            if (iterations_ >= cap) return Status::iteration_limit;
            if (since_refactor_ >= opt_.refactor_every && !refactor()) return Status::numerical_failure;
            const bool bland = degenerate >= opt_.bland_after;

            std::size_t q = npos;
            double best = 0.0;
            for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
                const auto v = nonbasic_[j];
                if (!can_enter(v)) continue;
                const double dj = d_[static_cast<Eigen::Index>(j)];
                const double score = vars_[v].bound == Bound::free ? std::abs(dj) : dj;
                if (score <= opt_.optimality_tol) continue;
                if (bland) {
                    if (q == npos || v < nonbasic_[q]) q = j;
                } else if (score > best) {
                    best = score;
                    q = j;
                }
            }
            if (q == npos) return Status::optimal;
            if (d_[static_cast<Eigen::Index>(q)] < 0.0) flip_column(q);

            const auto qi = static_cast<Eigen::Index>(q);
            double min_ratio = kInf;
            for (std::size_t i = 0; i < basis_.size(); ++i) {
                const double a = T_(static_cast<Eigen::Index>(i), qi);
                const double ratio = row_ratio(i, a, phase1);
                if (ratio < min_ratio) min_ratio = ratio;
            }
            if (min_ratio == kInf) return Status::unbounded;
            const double slack = 1e-12 * (1.0 + min_ratio);
            std::size_t r = npos;
            double best_piv = 0.0;
            for (std::size_t i = 0; i < basis_.size(); ++i) {
                const double a = T_(static_cast<Eigen::Index>(i), qi);
                const double ratio = row_ratio(i, a, phase1);
                if (ratio > min_ratio + slack) continue;
                if (bland) {
                    if (r == npos || basis_[i] < basis_[r]) r = i;
                } else if (std::abs(a) > best_piv) {
                    best_piv = std::abs(a);
                    r = i;
                }
            }
            degenerate = min_ratio <= 1e-12 ? degenerate + 1 : 0;
            pivot(r, q);
        }
    }

    /// Step length allowed by tableau row i when the entering column entry is a.
    double row_ratio(std::size_t i, double a, bool phase1) const {
        const auto& var = vars_[basis_[i]];
        if (var.bound == Bound::free) return kInf;
        if (var.bound == Bound::fixed && !phase1) {
            return std::abs(a) > opt_.pivot_tol ? 0.0 : kInf;
        }
        if (a > opt_.pivot_tol) return std::max(beta_[i], 0.0) / a;
        return kInf;
    }

    /// Restores primal feasibility from a dual-feasible basis.
    Status run_dual() {
        reset_objective(false);
        const std::size_t cap = iterations_ + iteration_cap();
        std::size_t degenerate = 0;
        while (true) {
            if (iterations_ >= cap) return Status::iteration_limit;
            if (since_refactor_ >= opt_.refactor_every && !refactor()) return Status::numerical_failure;
            const bool bland = degenerate >= opt_.bland_after;

            std::size_t r = npos;
            double worst = -opt_.feasibility_tol;
            for (std::size_t i = 0; i < basis_.size(); ++i) {
                if (vars_[basis_[i]].bound != Bound::nonneg) continue;
                if (beta_[i] >= -opt_.feasibility_tol) continue;
                if (bland) {
                    if (r == npos || basis_[i] < basis_[r]) r = i;
                } else if (beta_[i] < worst) {
                    worst = beta_[i];
                    r = i;
                }
            }
            if (r == npos) return Status::optimal;

            const auto ri = static_cast<Eigen::Index>(r);
            auto ratio_of = [&](std::size_t j) {
                const auto v = nonbasic_[j];
                if (!can_enter(v)) return kInf;
                const double a = T_(ri, static_cast<Eigen::Index>(j));
                const double dj = d_[static_cast<Eigen::Index>(j)];
                if (vars_[v].bound == Bound::free) {
                    return std::abs(a) > opt_.pivot_tol ? std::abs(dj) / std::abs(a) : kInf;
                }
                if (a < -opt_.pivot_tol) return std::max(dj / a, 0.0);
                return kInf;
            };
            double min_ratio = kInf;
            for (std::size_t j = 0; j < nonbasic_.size(); ++j) min_ratio = std::min(min_ratio, ratio_of(j));
            if (min_ratio == kInf) return Status::infeasible;
            const double slack = 1e-12 * (1.0 + min_ratio);
            std::size_t q = npos;
            double best_piv = 0.0;
            for (std::size_t j = 0; j < nonbasic_.size(); ++j) {
                const double ratio = ratio_of(j);
                if (ratio > min_ratio + slack) continue;
                const double a = std::abs(T_(ri, static_cast<Eigen::Index>(j)));
                if (bland) {
                    if (q == npos || nonbasic_[j] < nonbasic_[q]) q = j;
                } else if (a > best_piv) {
                    best_piv = a;
                    q = j;
                }
            }
            if (T_(ri, static_cast<Eigen::Index>(q)) > 0.0) flip_column(q);
            degenerate = min_ratio <= 1e-12 ? degenerate + 1 : 0;
            pivot(r, q);
        }
    }

    // ---- refactorisation -------------------------------------------------------------

    /// Recomputes the tableau, basic values and reduced costs from the original rows for
    /// the current basis. Basic structural columns form a small square block; every other
    /// basic variable is a unit column, so only that block needs an LU factorisation.
    bool refactor() {
        since_refactor_ = 0;
        const auto m = basis_.size();
        const auto mi = static_cast<Eigen::Index>(m);

        std::vector<std::size_t> kpos;  // tableau rows holding a non-slack basic
        std::vector<char> row_has_slack(m, 0);
        for (std::size_t p = 0; p < m; ++p) {
            const auto& v = vars_[basis_[p]];
            if (v.kind == Kind::slack) {
                row_has_slack[v.ref] = 1;
            } else {
                kpos.push_back(p);
            }
        }
        std::vector<std::size_t> R2;
        for (std::size_t i = 0; i < m; ++i) {
            if (!row_has_slack[i]) R2.push_back(i);
        }
        const auto k = kpos.size();
        if (R2.size() != k) return false;
        const auto ki = static_cast<Eigen::Index>(k);

        Matrix GK(mi, ki);
        for (std::size_t c = 0; c < k; ++c) GK.col(static_cast<Eigen::Index>(c)) = column_of(basis_[kpos[c]]);

        // Right-hand sides: every nonbasic column followed by h.
        const auto ncols = nonbasic_.size();
        const auto nci = static_cast<Eigen::Index>(ncols);
        Matrix rhs(mi, nci + 1);
        for (std::size_t j = 0; j < ncols; ++j) rhs.col(static_cast<Eigen::Index>(j)) = column_of(nonbasic_[j]);
        for (std::size_t i = 0; i < m; ++i) rhs(static_cast<Eigen::Index>(i), nci) = h_[i];

        Matrix ZK(ki, rhs.cols());
        if (k > 0) {
            Matrix M(ki, ki);
            Matrix rhsK(ki, rhs.cols());
            for (std::size_t a = 0; a < k; ++a) {
                M.row(static_cast<Eigen::Index>(a)) = GK.row(static_cast<Eigen::Index>(R2[a]));
                rhsK.row(static_cast<Eigen::Index>(a)) = rhs.row(static_cast<Eigen::Index>(R2[a]));
            }
            Eigen::PartialPivLU<Matrix> lu(M);
            if (!(lu.rcond() > 1e-14)) return false;
            ZK = lu.solve(rhsK);
            rhs.noalias() -= GK * ZK;
        }

        Matrix Tn(mi, nci);
        std::vector<double> beta(m);
        for (std::size_t c = 0; c < k; ++c) {
            const auto p = static_cast<Eigen::Index>(kpos[c]);
            Tn.row(p) = ZK.row(static_cast<Eigen::Index>(c)).head(nci);
            beta[kpos[c]] = ZK(static_cast<Eigen::Index>(c), nci);
        }
        for (std::size_t p = 0; p < m; ++p) {
            const auto& v = vars_[basis_[p]];
            if (v.kind != Kind::slack) continue;
            const auto i = static_cast<Eigen::Index>(v.ref);
            Tn.row(static_cast<Eigen::Index>(p)) = rhs.row(i).head(nci);
            beta[p] = rhs(i, nci);
        }
        if (!Tn.allFinite()) return false;
        T_ = std::move(Tn);
        beta_ = std::move(beta);
        reset_objective(phase1_);
        return true;
    }

    /// Column of a variable in the internal row system.
    Vector column_of(std::size_t id) const {
        const auto& v = vars_[id];
        switch (v.kind) {
            case Kind::structural:
                return G_.col(static_cast<Eigen::Index>(v.ref)) * (v.flipped ? -1.0 : 1.0);
            case Kind::slack: {
                Vector e = Vector::Zero(static_cast<Eigen::Index>(h_.size()));
                e[static_cast<Eigen::Index>(v.ref)] = 1.0;
                return e;
            }
            case Kind::artificial: return art_col_;
        }
        return {};
    }

    // ---- results ---------------------------------------------------------------------

    std::vector<double> extract() const {
        const auto n = problem_.num_vars();
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& v = vars_[j];
            double y = v.basic ? beta_[v.pos] : 0.0;
            if (v.flipped) y = -y;
            if (v.bound == Bound::nonneg && y < 0.0) y = 0.0;
            x[j] = maps_[j].offset + maps_[j].sign * y;
        }
        return x;
    }

    Status verify_or_repair(std::string& message) {
        for (int attempt = 0; attempt < 2; ++attempt) {
            const double viol = max_violation(problem_, extract());
            if (viol <= opt_.feasibility_tol) return Status::optimal;
            message = "primal violation " + std::to_string(viol) + " after solve";
            if (!refactor()) return Status::numerical_failure;
            Status st = run_dual();
            if (st == Status::optimal) st = run_primal(false);
            if (st != Status::optimal) return st;
        }
        const double viol = max_violation(problem_, extract());
        if (viol <= opt_.feasibility_tol) return Status::optimal;
        message = "primal violation " + std::to_string(viol) + " persists after refactorisation";
        return Status::numerical_failure;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    LpProblem problem_;
    SolverOptions opt_;
    std::vector<VarMap> maps_;
    std::vector<std::size_t> bound_rows_;

    Matrix G_;
    std::vector<double> h_;
    std::vector<std::size_t> slack_of_row_;
    Vector art_col_;
    std::size_t artificial_ = npos;

    std::vector<Var> vars_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> nonbasic_;
    Matrix T_;
    std::vector<double> beta_;
    Vector d_;
    double z_ = 0.0;
    bool phase1_ = false;
    bool warm_ = false;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
};

/// Solves one LP from scratch.
inline LpSolution solve(const LpProblem& problem, const SolverOptions& options = {}) {
    return Simplex(problem, options).solve();
}

}  // namespace ssdopt::lp
