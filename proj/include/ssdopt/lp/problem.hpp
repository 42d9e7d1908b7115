#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssdopt::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { le, eq, ge, range };

/// lower <= coeffs·x <= upper. One-sided rows use an infinite bound on the other side.
struct Constraint {
    std::vector<double> coeffs;
    double lower = -kInf;
    double upper = kInf;
    std::string name;

    static Constraint le(std::vector<double> a, double rhs, std::string name = {}) {
        return {std::move(a), -kInf, rhs, std::move(name)};
    }
    static Constraint ge(std::vector<double> a, double rhs, std::string name = {}) {
        return {std::move(a), rhs, kInf, std::move(name)};
    }
    static Constraint eq(std::vector<double> a, double rhs, std::string name = {}) {
        return {std::move(a), rhs, rhs, std::move(name)};
    }
    static Constraint between(std::vector<double> a, double lo, double hi, std::string name = {}) {
        return {std::move(a), lo, hi, std::move(name)};
    }

    Relation relation() const {
        if (lower == upper) return Relation::eq;
        if (std::isinf(lower)) return Relation::le;
        if (std::isinf(upper)) return Relation::ge;
        return Relation::range;
    }

    double activity(const std::vector<double>& x) const {
        double s = 0.0;
        for (std::size_t j = 0; j < coeffs.size(); ++j) s += coeffs[j] * x[j];
        return s;
    }
};

/// Maximise objective·x subject to the constraints and per-variable bounds.
struct LpProblem {
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> lower;  // default 0
    std::vector<double> upper;  // default +inf
    std::vector<std::string> names;

    std::size_t num_vars() const noexcept { return objective.size(); }
    std::size_t num_constraints() const noexcept { return constraints.size(); }

    std::size_t add_variable(std::string name, double cost = 0.0, double lo = 0.0, double hi = kInf) {
        objective.push_back(cost);
        lower.push_back(lo);
        upper.push_back(hi);
        names.push_back(std::move(name));
        for (auto& c : constraints) c.coeffs.push_back(0.0);
        return objective.size() - 1;
    }

    std::size_t add_constraint(Constraint c) {
        c.coeffs.resize(num_vars(), 0.0);
        constraints.push_back(std::move(c));
        return constraints.size() - 1;
    }

    std::string var_name(std::size_t j) const {
        return j < names.size() && !names[j].empty() ? names[j] : "x" + std::to_string(j);
    }

    void validate() const {
        const auto n = num_vars();
        if (lower.size() != n || upper.size() != n) {
            throw std::invalid_argument("bound vectors do not match the number of variables");
        }
        if (!names.empty() && names.size() != n) {
            throw std::invalid_argument("name vector does not match the number of variables");
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(objective[j])) throw std::invalid_argument("non-finite objective coefficient");
            if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] ||
                lower[j] == kInf || upper[j] == -kInf) {
                throw std::invalid_argument("invalid bounds on variable " + var_name(j));
            }
        }
        for (std::size_t i = 0; i < constraints.size(); ++i) {
            const auto& c = constraints[i];
            if (c.coeffs.size() != n) {
                throw std::invalid_argument("constraint " + std::to_string(i) + " has " +
                                            std::to_string(c.coeffs.size()) + " coefficients, expected " +
                                            std::to_string(n));
            }
            for (double a : c.coeffs) {
                if (!std::isfinite(a)) throw std::invalid_argument("non-finite constraint coefficient");
            }
            if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper ||
                c.lower == kInf || c.upper == -kInf) {
                throw std::invalid_argument("invalid bounds on constraint " + std::to_string(i));
            }
        }
    }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

inline std::string_view to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::iteration_limit: return "iteration_limit";
        case Status::numerical_failure: return "numerical_failure";
    }
    return "?";
}

struct LpSolution {
    Status status = Status::numerical_failure;
    std::vector<double> values;
    double objective_value = 0.0;
    std::size_t iterations = 0;
    std::string message;

    bool optimal() const noexcept { return status == Status::optimal; }
};

struct SolverOptions {
    double feasibility_tol = 1e-8;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-11;
    /// 0 picks a limit from the problem size.
    std::size_t max_iterations = 0;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t bland_after = 50;
    /// Pivots between refactorisations of the tableau from the original data.
    std::size_t refactor_every = 1000;
};

/// Largest violation of constraints and bounds by x (0 when feasible).
inline double max_violation(const LpProblem& p, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t j = 0; j < p.num_vars(); ++j) {
        worst = std::max({worst, p.lower[j] - x[j], x[j] - p.upper[j]});
    }
    for (const auto& c : p.constraints) {
        const double a = c.activity(x);
        worst = std::max({worst, c.lower - a, a - c.upper});
    }
    return worst;
}

}  // namespace ssdopt::lp
