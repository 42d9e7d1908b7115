#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ssdopt/lp/simplex.hpp"

namespace ssdopt {

enum class AssetClass { equity, risk_free, call_strategy, put_strategy, mixed_strategy };

inline std::string_view to_string(AssetClass c) {
    switch (c) {
        case AssetClass::equity: return "E";
        case AssetClass::risk_free: return "F";
        case AssetClass::call_strategy: return "Sc";
        case AssetClass::put_strategy: return "Sp";
        case AssetClass::mixed_strategy: return "Scp";
    }
    return "?";
}

inline AssetClass parse_asset_class(std::string_view s) {
    if (s == "E") return AssetClass::equity;
    if (s == "F") return AssetClass::risk_free;
    if (s == "Sc") return AssetClass::call_strategy;
    if (s == "Sp") return AssetClass::put_strategy;
    if (s == "Scp") return AssetClass::mixed_strategy;
    throw std::invalid_argument("unknown asset class '" + std::string(s) + "' (expected E, F, Sc, Sp or Scp)");
}

inline bool is_strategy(AssetClass c) {
    return c == AssetClass::call_strategy || c == AssetClass::put_strategy || c == AssetClass::mixed_strategy;
}

/// Per-period returns of every candidate asset plus the index being dominated.
struct ScenarioMatrix {
    std::vector<std::string> assets;
    std::vector<AssetClass> classes;
    Eigen::MatrixXd returns;  // periods x assets
    std::vector<double> index_returns;

    std::size_t periods() const noexcept { return index_returns.size(); }
    std::size_t num_assets() const noexcept { return assets.size(); }

    void validate() const {
        if (index_returns.empty()) throw std::invalid_argument("scenario matrix has no periods");
        if (assets.empty()) throw std::invalid_argument("scenario matrix has no assets");
        if (classes.size() != assets.size()) throw std::invalid_argument("asset classes do not match assets");
        if (static_cast<std::size_t>(returns.rows()) != periods() ||
            static_cast<std::size_t>(returns.cols()) != num_assets()) {
            throw std::invalid_argument("return matrix is " + std::to_string(returns.rows()) + "x" +
                                        std::to_string(returns.cols()) + ", expected " +
                                        std::to_string(periods()) + "x" + std::to_string(num_assets()));
        }
        if (!returns.allFinite()) throw std::invalid_argument("return matrix has non-finite entries");
        for (double r : index_returns) {
            if (!std::isfinite(r)) throw std::invalid_argument("index returns have non-finite entries");
        }
        if (std::count(classes.begin(), classes.end(), AssetClass::risk_free) > 1) {
            throw std::invalid_argument("at most one risk-free asset is allowed");
        }
    }
};

struct TailTargets {
    std::vector<double> tau;  // tau[s-1] for s = 1..T
};

/// tau_s = (sum of the s smallest index returns) / T.
inline TailTargets compute_tau(const std::vector<double>& index_returns) {
    if (index_returns.empty()) throw std::invalid_argument("need at least one index return");
    std::vector<double> sorted = index_returns;
    std::sort(sorted.begin(), sorted.end());
    const double T = static_cast<double>(sorted.size());
    TailTargets out;
    out.tau.resize(sorted.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < sorted.size(); ++s) {
        acc += sorted[s];
        out.tau[s] = acc / T;
    }
    return out;
}

enum class AssetGroup { E, F, S, Sc, Sp, Scp };

inline AssetGroup parse_asset_group(std::string_view s) {
    if (s == "E") return AssetGroup::E;
    if (s == "F") return AssetGroup::F;
    if (s == "S") return AssetGroup::S;
    if (s == "Sc") return AssetGroup::Sc;
    if (s == "Sp") return AssetGroup::Sp;
    if (s == "Scp") return AssetGroup::Scp;
    throw std::invalid_argument("unknown asset group '" + std::string(s) + "'");
}

inline bool in_group(AssetGroup g, AssetClass c) {
    switch (g) {
        case AssetGroup::E: return c == AssetClass::equity;
        case AssetGroup::F: return c == AssetClass::risk_free;
        case AssetGroup::S: return is_strategy(c);
        case AssetGroup::Sc: return c == AssetClass::call_strategy;
        case AssetGroup::Sp: return c == AssetClass::put_strategy;
        case AssetGroup::Scp: return c == AssetClass::mixed_strategy;
    }
    return false;
}

/// lower <= total weight of the group <= upper. The group is a class selector or,
/// when `group` is empty, an explicit list of asset indices.
struct GroupBound {
    std::optional<AssetGroup> group;
    std::vector<std::size_t> members;
    double lower = 0.0;
    double upper = 1.0;

    static GroupBound of(AssetGroup g, double lo, double hi) { return {g, {}, lo, hi}; }

    void validate() const {
        if (!(0.0 <= lower && lower <= upper && upper <= 1.0)) {
            throw std::invalid_argument("group bound needs 0 <= lower <= upper <= 1");
        }
    }

    std::vector<std::size_t> resolve(const ScenarioMatrix& sc) const {
        if (!group) {
            for (auto i : members) {
                if (i >= sc.num_assets()) throw std::invalid_argument("group member index out of range");
            }
            return members;
        }
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < sc.num_assets(); ++i) {
            if (in_group(*group, sc.classes[i])) out.push_back(i);
        }
        return out;
    }
};

/// A set of periods (0-based, ascending).
using PeriodSet = std::vector<std::size_t>;

/// Chronological prefixes {0}, {0,1}, ..., {0..T-1}.
inline std::vector<PeriodSet> initial_cut_set(std::size_t T) {
    std::vector<PeriodSet> out;
    PeriodSet cur;
    for (std::size_t t = 0; t < T; ++t) {
        cur.push_back(t);
        out.push_back(cur);
    }
    return out;
}

/// Column layout of the master LP: w_0..w_{N-1}, V, V_1..V_T.
struct MasterLayout {
    std::size_t n_assets = 0;
    std::size_t periods = 0;
    std::size_t v() const { return n_assets; }
    std::size_t v_s(std::size_t s) const { return n_assets + s; }  // s = 1..T
    std::size_t num_vars() const { return n_assets + 1 + periods; }
};

/// V_s - (1/T) sum_{t in J} sum_i r_ti w_i <= -tau_s with s = |J|.
inline lp::Constraint tail_constraint(const ScenarioMatrix& sc, const TailTargets& tau, const PeriodSet& J) {
    const MasterLayout L{sc.num_assets(), sc.periods()};
    if (J.empty() || J.size() > L.periods) throw std::invalid_argument("period subset has invalid size");
    std::vector<double> a(L.num_vars(), 0.0);
    const double T = static_cast<double>(L.periods);
    for (std::size_t i = 0; i < L.n_assets; ++i) {
        double s = 0.0;
        for (auto t : J) s += sc.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
        a[i] = -s / T;
    }
    a[L.v_s(J.size())] = 1.0;
    std::string name = "tail";
    for (auto t : J) name += "_" + std::to_string(t + 1);
    return lp::Constraint::le(std::move(a), -tau.tau[J.size() - 1], std::move(name));
}

inline double kappa(std::size_t s, std::size_t T, bool scaled) {
    return scaled ? static_cast<double>(s) / static_cast<double>(T) : 1.0;
}

inline lp::LpProblem build_master(const ScenarioMatrix& sc, const std::vector<PeriodSet>& cut_set, bool scaled,
                                  const std::vector<GroupBound>& bounds = {}) {
    sc.validate();
    const MasterLayout L{sc.num_assets(), sc.periods()};
    const auto T = L.periods;
    std::vector<char> seen(T + 1, 0);
    for (const auto& J : cut_set) {
        if (J.empty() || J.size() > T) throw std::invalid_argument("period subset has invalid size");
        for (std::size_t k = 0; k < J.size(); ++k) {
            if (J[k] >= T || (k > 0 && J[k] <= J[k - 1])) {
                throw std::invalid_argument("period subsets must be ascending indices below T");
            }
        }
        seen[J.size()] = 1;
    }
    for (std::size_t s = 1; s <= T; ++s) {
        if (!seen[s]) throw std::invalid_argument("cut set has no subset of cardinality " + std::to_string(s));
    }

    lp::LpProblem p;
    for (std::size_t i = 0; i < L.n_assets; ++i) p.add_variable("w_" + std::to_string(i));
    p.add_variable("V", 1.0, -lp::kInf, lp::kInf);
    for (std::size_t s = 1; s <= T; ++s) p.add_variable("V_" + std::to_string(s), 0.0, -lp::kInf, lp::kInf);

    const auto tau = compute_tau(sc.index_returns);
    for (const auto& J : cut_set) p.add_constraint(tail_constraint(sc, tau, J));
    for (std::size_t s = 1; s <= T; ++s) {
        std::vector<double> a(L.num_vars(), 0.0);
        a[L.v()] = kappa(s, T, scaled);
        a[L.v_s(s)] = -1.0;
        p.add_constraint(lp::Constraint::le(std::move(a), 0.0, "scale_" + std::to_string(s)));
    }
    std::vector<double> budget(L.num_vars(), 0.0);
    std::fill(budget.begin(), budget.begin() + static_cast<std::ptrdiff_t>(L.n_assets), 1.0);
    p.add_constraint(lp::Constraint::eq(std::move(budget), 1.0, "budget"));
    for (std::size_t g = 0; g < bounds.size(); ++g) {
        bounds[g].validate();
        std::vector<double> a(L.num_vars(), 0.0);
        for (auto i : bounds[g].resolve(sc)) a[i] = 1.0;
        p.add_constraint(lp::Constraint::between(std::move(a), bounds[g].lower, bounds[g].upper,
                                                 "group_" + std::to_string(g)));
    }
    return p;
}

inline std::vector<double> portfolio_returns(const ScenarioMatrix& sc, const std::vector<double>& w) {
    Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    const Eigen::VectorXd r = sc.returns * wv;
    return {r.data(), r.data() + r.size()};
}

/// Periods ordered by return, ties broken by the earlier period.
inline std::vector<std::size_t> ascending_order(const std::vector<double>& r) {
    std::vector<std::size_t> idx(r.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r[a] < r[b]; });
    return idx;
}

/// For each s, the subset of the s worst portfolio periods if its tail constraint is
/// violated by more than `tol`. tails[s-1] holds V_s.
inline std::vector<PeriodSet> separate(const ScenarioMatrix& sc, const std::vector<double>& weights,
                                       const std::vector<double>& tails, const TailTargets& tau,
                                       double tol = 1e-9) {
    const auto r = portfolio_returns(sc, weights);
    const auto order = ascending_order(r);
    const double T = static_cast<double>(r.size());
    std::vector<PeriodSet> cuts;
    double prefix = 0.0;
    for (std::size_t s = 1; s <= r.size(); ++s) {
        prefix += r[order[s - 1]];
        if (tails[s - 1] > prefix / T - tau.tau[s - 1] + tol) {
            PeriodSet J(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
            std::sort(J.begin(), J.end());
            cuts.push_back(std::move(J));
        }
    }
    return cuts;
}

/// min over s of (sum of s smallest portfolio returns - sum of s smallest index returns).
/// Non-negative (up to rounding) iff the portfolio dominates the index.
inline double dominance_gap(const ScenarioMatrix& sc, const std::vector<double>& weights) {
    auto r = portfolio_returns(sc, weights);
    auto x = sc.index_returns;
    std::sort(r.begin(), r.end());
    std::sort(x.begin(), x.end());
    double pr = 0.0, px = 0.0, gap = lp::kInf;
    for (std::size_t s = 0; s < r.size(); ++s) {
        pr += r[s];
        px += x[s];
        gap = std::min(gap, pr - px);
    }
    return gap;
}

struct SsdOptions {
    bool scaled = true;
    std::vector<GroupBound> bounds;
    /// 0 means 10*T rounds.
    std::size_t max_rounds = 0;
    double cut_tol = 1e-9;
    lp::SolverOptions solver;
};

struct SsdSolution {
    std::vector<double> weights;
    double objective = 0.0;
    std::vector<double> tails;
    std::vector<PeriodSet> cut_set;
    std::size_t iterations = 0;  // solve/separate rounds
    std::size_t lp_pivots = 0;
    bool scaled = true;
    std::vector<double> objective_trace;
};

class SsdError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline SsdSolution optimize(const ScenarioMatrix& sc, const SsdOptions& opt = {}) {
    sc.validate();
    const MasterLayout L{sc.num_assets(), sc.periods()};
    const auto T = L.periods;
    const auto tau = compute_tau(sc.index_returns);

    SsdSolution out;
    out.scaled = opt.scaled;
    out.cut_set = initial_cut_set(T);
    std::set<PeriodSet> known(out.cut_set.begin(), out.cut_set.end());
    lp::Simplex master(build_master(sc, out.cut_set, opt.scaled, opt.bounds), opt.solver);

    const std::size_t cap = opt.max_rounds ? opt.max_rounds : 10 * T;
    while (true) {
        if (out.iterations >= cap) {
            throw SsdError("cutting-plane loop hit its limit of " + std::to_string(cap) + " rounds");
        }
        ++out.iterations;
        const auto sol = master.solve();
        out.lp_pivots += sol.iterations;
        if (!sol.optimal()) {
            throw SsdError("master LP " + std::string(lp::to_string(sol.status)) +
                           (sol.message.empty() ? "" : ": " + sol.message) + " in round " +
                           std::to_string(out.iterations));
        }
        out.weights.assign(sol.values.begin(), sol.values.begin() + static_cast<std::ptrdiff_t>(L.n_assets));
        out.objective = sol.values[L.v()];
        out.tails.assign(sol.values.begin() + static_cast<std::ptrdiff_t>(L.v_s(1)), sol.values.end());
        out.objective_trace.push_back(out.objective);

        std::size_t added = 0;
        for (auto& J : separate(sc, out.weights, out.tails, tau, opt.cut_tol)) {
            if (!known.insert(J).second) continue;
            master.add_constraint(tail_constraint(sc, tau, J));
            out.cut_set.push_back(std::move(J));
            ++added;
        }
        if (added == 0) break;
    }
    return out;
}

}  // namespace ssdopt
