#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssdopt/csv.hpp"

namespace ssdopt::analytics {

inline constexpr double kPeriodsPerYear = 252.0;

namespace detail {

inline void require_positive(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("value series is empty");
    for (double v : values) {
        if (!(v > 0.0)) throw std::invalid_argument("value series must be strictly positive");
    }
}

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double sample_stdev(const std::vector<double>& x) {
    if (x.size() < 2) throw std::invalid_argument("need at least two observations");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline std::vector<double> excess(const std::vector<double>& r, const std::vector<double>& rf) {
    if (rf.size() != r.size() && rf.size() != 1) {
        throw std::invalid_argument("risk-free series must have one entry or one per return");
    }
    std::vector<double> e(r.size());
    for (std::size_t t = 0; t < r.size(); ++t) e[t] = r[t] - (rf.size() == 1 ? rf[0] : rf[t]);
    return e;
}

}  // namespace detail

/// Final value relative to the start, Q_T / Q_0.
inline double fv(const std::vector<double>& values) {
    detail::require_positive(values);
    return values.back() / values.front();
}

/// Annualised growth in percent; T = number of return periods = values.size() - 1.
inline double cagr(const std::vector<double>& values) {
    const double f = fv(values);
    const auto periods = values.size() - 1;
    if (periods == 0) throw std::invalid_argument("need at least two values for an annual growth rate");
    const double years = static_cast<double>(periods) / kPeriodsPerYear;
    return 100.0 * (std::pow(f, 1.0 / years) - 1.0);
}

/// Annualised Sharpe ratio of daily excess returns. Empty when the deviation is zero.
inline std::optional<double> sharpe(const std::vector<double>& returns, const std::vector<double>& rf_daily) {
    if (returns.size() < 2) throw std::invalid_argument("need at least two returns");
    const auto e = detail::excess(returns, rf_daily);
    const double sd = detail::sample_stdev(e);
    // a constant series can leave a few ulps of rounding in the deviation
    double scale = 0.0;
    for (double v : e) scale = std::max(scale, std::abs(v));
    if (!(sd > 1e-12 * scale)) return std::nullopt;
    return detail::mean(e) / sd * std::sqrt(kPeriodsPerYear);
}

/// Annualised Sortino ratio; downside deviation is the RMS of min(excess, 0).
inline std::optional<double> sortino(const std::vector<double>& returns, const std::vector<double>& rf_daily) {
    if (returns.size() < 2) throw std::invalid_argument("need at least two returns");
    const auto e = detail::excess(returns, rf_daily);
    double ss = 0.0;
    for (double v : e) ss += v < 0.0 ? v * v : 0.0;
    const double dd = std::sqrt(ss / static_cast<double>(e.size()));
    if (!(dd > 0.0)) return std::nullopt;
    return detail::mean(e) / dd * std::sqrt(kPeriodsPerYear);
}

/// Mean loss in percent over the ceil(level*N) worst returns.
inline double cvar(const std::vector<double>& returns, double level = 0.05) {
    if (returns.empty()) throw std::invalid_argument("return series is empty");
    if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("cvar level must be in (0, 1]");
    auto sorted = returns;
    std::sort(sorted.begin(), sorted.end());
    // guard against level*N landing a hair above an integer
    const double raw = level * static_cast<double>(sorted.size());
    auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * raw));
    k = std::clamp<std::size_t>(k, 1, sorted.size());
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += sorted[i];
    return -100.0 * s / static_cast<double>(k);
}

/// Annualised volatility in percent.
inline double vol(const std::vector<double>& returns) {
    return 100.0 * detail::sample_stdev(returns) * std::sqrt(kPeriodsPerYear);
}

/// Largest peak-to-trough fall in percent.
inline double mdd(const std::vector<double>& values) {
    detail::require_positive(values);
    double peak = values.front();
    double worst = 0.0;
    for (double v : values) {
        peak = std::max(peak, v);
        worst = std::max(worst, (peak - v) / peak);
    }
    return 100.0 * worst;
}

/// Value series from returns, starting at `start`.
inline std::vector<double> values_from_returns(const std::vector<double>& returns, double start = 1.0) {
    std::vector<double> v{start};
    v.reserve(returns.size() + 1);
    for (double r : returns) v.push_back(v.back() * (1.0 + r));
    return v;
}

struct PerfReport {
    std::string name;
    double fv = 1.0;
    double cagr = 0.0;
    std::optional<double> sharpe;
    std::optional<double> sortino;
    double cvar5 = 0.0;
    double vol = 0.0;
    double mdd = 0.0;
};

/// All seven statistics for a daily return series; rf_daily has one entry or one per return.
inline PerfReport report(std::string name, const std::vector<double>& returns, const std::vector<double>& rf_daily) {
    const auto values = values_from_returns(returns);
    PerfReport r;
    r.name = std::move(name);
    r.fv = fv(values);
    r.cagr = cagr(values);
    r.sharpe = sharpe(returns, rf_daily);
    r.sortino = sortino(returns, rf_daily);
    r.cvar5 = cvar(returns, 0.05);
    r.vol = vol(returns);
    r.mdd = mdd(values);
    return r;
}

inline constexpr const char* kReportHeader = "strategy,fv,cagr,sharpe,sortino,cvar,vol,mdd";

inline void write_report_csv(std::ostream& os, const std::vector<PerfReport>& rows) {
    os << kReportHeader << '\n';
    auto opt = [](const std::optional<double>& v) { return v ? csv::fmt(*v) : std::string("NA"); };
    for (const auto& r : rows) {
        os << r.name << ',' << csv::fmt(r.fv) << ',' << csv::fmt(r.cagr) << ',' << opt(r.sharpe) << ','
           << opt(r.sortino) << ',' << csv::fmt(r.cvar5) << ',' << csv::fmt(r.vol) << ',' << csv::fmt(r.mdd)
           << '\n';
    }
}

}  // namespace ssdopt::analytics
