#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ssdopt/analytics.hpp"
#include "ssdopt/market_data.hpp"
#include "ssdopt/ssd.hpp"
#include "ssdopt/strategy.hpp"

namespace ssdopt {

enum class Universe { equities, spy_only, cash_only };

inline std::string_view to_string(Universe u) {
    switch (u) {
        case Universe::equities: return "equities";
        case Universe::spy_only: return "spy_only";
        case Universe::cash_only: return "cash_only";
    }
    return "?";
}

inline Universe parse_universe(std::string_view s) {
    if (s == "equities") return Universe::equities;
    if (s == "spy_only") return Universe::spy_only;
    if (s == "cash_only") return Universe::cash_only;
    throw std::invalid_argument("unknown universe '" + std::string(s) + "' (expected equities, spy_only or cash_only)");
}

inline constexpr std::string_view kRiskFreeAsset = "RISK_FREE";

struct BacktestConfig {
    int lookback_prices = 201;
    int rebalance_every = 21;
    int oos_hold = 21;
    double riskfree_cap = 0.10;
    bool scaled = true;
    Universe universe = Universe::equities;
    bool include_options = true;
    std::vector<GroupBound> group_bounds;  // in addition to the risk-free cap
    unsigned jobs = 1;
    double cut_tol = 1e-9;
    lp::SolverOptions solver;

    void validate() const {
        if (lookback_prices < 2) throw std::invalid_argument("lookback_prices must be at least 2");
        if (rebalance_every < 1) throw std::invalid_argument("rebalance_every must be positive");
        if (oos_hold < 1 || oos_hold > rebalance_every) {
            throw std::invalid_argument("oos_hold must be between 1 and rebalance_every");
        }
        if (!(riskfree_cap >= 0.0 && riskfree_cap <= 1.0)) throw std::invalid_argument("riskfree_cap must be in [0, 1]");
        for (const auto& g : group_bounds) g.validate();
    }
};

struct Rebalance {
    std::size_t index = 0;  // trading-date index of the rebalance close
    Date date{};
    std::vector<std::string> assets;
    std::vector<AssetClass> classes;
    std::vector<double> weights;
    std::vector<std::string> excluded;
    double objective = 0.0;
    std::size_t cut_rounds = 0;
    std::vector<Date> oos_dates;
    std::vector<double> oos_returns;

    double option_weight() const {
        double s = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (is_strategy(classes[i])) s += weights[i];
        }
        return s;
    }
};

struct BacktestResult {
    std::vector<Rebalance> rebalances;
    std::vector<Date> dates;       // out-of-sample return dates, concatenated
    std::vector<double> returns;
    std::vector<double> values;    // value after each return, starting from 1
    std::vector<double> index_returns;  // benchmark returns on the same dates
    std::vector<double> spy_returns;    // empty when SPY is absent
    std::vector<double> rf_daily;       // per-date daily risk-free rate for ratios
};

class BacktestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Daily returns of a buy-and-hold portfolio: holdings start at the weights and drift with
/// the asset returns. asset_returns[d][i] is asset i's return on day d.
inline std::vector<double> oos_window_returns(const std::vector<double>& weights,
                                              const std::vector<std::vector<double>>& asset_returns) {
    std::vector<double> holdings = weights;
    double value = 0.0;
    for (double w : holdings) value += w;
    if (std::abs(value - 1.0) > 1e-6) throw std::invalid_argument("weights must sum to 1");
    std::vector<double> out;
    out.reserve(asset_returns.size());
    for (const auto& day : asset_returns) {
        if (day.size() != holdings.size()) throw std::invalid_argument("return row does not match weights");
        double next = 0.0;
        for (std::size_t i = 0; i < holdings.size(); ++i) {
            holdings[i] *= 1.0 + day[i];
            next += holdings[i];
        }
        out.push_back(next / value - 1.0);
        value = next;
    }
    return out;
}

namespace detail {

/// Runs fn(k) for k in [0, n) on up to `jobs` threads; rethrows the first failure.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::size_t error_at = n;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < n;) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(mu);
                // keep the earliest failure so the message does not depend on scheduling
                if (k < error_at) {
                    error_at = k;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline AssetClass strategy_class(const StrategyConfig& c) {
    switch (c.legs) {
        case Legs::put: return AssetClass::put_strategy;
        case Legs::call: return AssetClass::call_strategy;
        default: return AssetClass::mixed_strategy;
    }
}

/// Return on date t from the latest available price at or before t-1 onwards, valuing a
/// missing price at the last one seen (0 while a quote is absent).
inline double held_return(const std::vector<double>& prices, std::size_t t, double& last_price) {
    const double p = prices[t];
    if (is_missing(p)) return 0.0;
    const double r = p / last_price - 1.0;
    last_price = p;
    return r;
}

}  // namespace detail

/// Trading-date indices of the rebalance closes.
inline std::vector<std::size_t> rebalance_indices(std::size_t n_dates, const BacktestConfig& cfg) {
    std::vector<std::size_t> out;
    for (auto i = static_cast<std::size_t>(cfg.lookback_prices - 1); i + 1 < n_dates;
         i += static_cast<std::size_t>(cfg.rebalance_every)) {
        out.push_back(i);
    }
    return out;
}

/// Risk-free rate per trading date used for Sharpe and Sortino: the 10-year yield when
/// available, otherwise the 13-week bill, quoted on the previous date.
inline std::vector<double> ratio_rate(const MarketData& data) {
    const auto& src = data.tnx ? data.tnx->values : data.irx.values;
    std::vector<double> out(src.size(), 0.0);
    for (std::size_t t = 1; t < src.size(); ++t) out[t] = daily_risk_free(src[t - 1]);
    return out;
}

inline BacktestResult run_backtest(const MarketData& data, const std::vector<StrategyConfig>& strategies,
                                   const BacktestConfig& cfg) {
    cfg.validate();
    const auto n = data.calendar.size();
    if (n < static_cast<std::size_t>(cfg.lookback_prices) + 1) {
        throw BacktestError("need at least " + std::to_string(cfg.lookback_prices + 1) + " trading dates, have " +
                            std::to_string(n));
    }
    const auto& index_px = data.prices.series(kIndexTicker);
    const auto lb = static_cast<std::size_t>(cfg.lookback_prices);

    // risk-free asset return on date t accrues at the bill rate quoted on t-1
    std::vector<double> rf_ret(n, 0.0);
    for (std::size_t t = 1; t < n; ++t) rf_ret[t] = daily_risk_free(data.irx.values[t - 1]);

    // 1. strategies simulated once over the whole history
    std::vector<ValuationSeries> sims(cfg.include_options ? strategies.size() : 0);
    if (!sims.empty()) {
        const auto market = HistoricalMarket::from(data);
        detail::parallel_for(sims.size(), cfg.jobs, [&](std::size_t k) { sims[k] = evaluate(strategies[k], market); });
    }

    std::vector<std::size_t> equity_cols;
    if (cfg.universe == Universe::equities) {
        for (std::size_t c = 0; c < data.prices.tickers.size(); ++c) {
            const auto& tk = data.prices.tickers[c];
            if (tk != kIndexTicker && tk != kEtfTicker) equity_cols.push_back(c);
        }
    } else if (cfg.universe == Universe::spy_only) {
        const auto c = data.prices.column(kEtfTicker);
        if (!c) throw BacktestError("universe spy_only needs a '" + std::string(kEtfTicker) + "' price series");
        equity_cols.push_back(*c);
    }

    const auto rebal = rebalance_indices(n, cfg);
    BacktestResult result;
    result.rebalances.resize(rebal.size());

    // 2-3. optimise on the trailing window, then hold
    detail::parallel_for(rebal.size(), cfg.jobs, [&](std::size_t k) {
        const std::size_t i = rebal[k];
        const std::size_t first_ret = i + 1 - (lb - 1);  // dates i-lb+2 .. i
        const std::size_t periods = lb - 1;
        Rebalance& rb = result.rebalances[k];
        rb.index = i;
        rb.date = data.calendar[i];

        std::vector<const std::vector<double>*> equity_px;
        for (const auto c : equity_cols) {
            const auto& tk = data.prices.tickers[c];
            const auto& px = data.prices.prices[c];
            if (cfg.universe == Universe::equities && !data.is_member(tk, rb.date)) continue;
            bool complete = true;
            for (std::size_t t = i + 1 - lb; t <= i && complete; ++t) complete = !is_missing(px[t]);
            if (!complete) continue;
            rb.assets.push_back(tk);
            rb.classes.push_back(AssetClass::equity);
            equity_px.push_back(&px);
        }
        rb.assets.emplace_back(kRiskFreeAsset);
        rb.classes.push_back(AssetClass::risk_free);
        std::vector<std::size_t> strat_ids;
        const Date held_from = data.calendar[i + 1 - lb];
        const Date held_to = data.calendar[i - 1];
        for (std::size_t s = 0; s < sims.size(); ++s) {
            if (!traded_in_window(sims[s], held_from, held_to)) {
                rb.excluded.push_back(strategies[s].name);
                continue;
            }
            rb.assets.push_back(strategies[s].name);
            rb.classes.push_back(detail::strategy_class(strategies[s]));
            strat_ids.push_back(s);
        }

        // returns for period p on date first_ret + p; strategy returns[k] is the return on date k+1
        auto asset_return = [&](std::size_t a, std::size_t t) {
            if (a < equity_px.size()) return (*equity_px[a])[t] / (*equity_px[a])[t - 1] - 1.0;
            if (a == equity_px.size()) return rf_ret[t];
            return sims[strat_ids[a - equity_px.size() - 1]].returns[t - 1];
        };
        ScenarioMatrix sc;
        sc.assets = rb.assets;
        sc.classes = rb.classes;
        sc.returns.resize(static_cast<Eigen::Index>(periods), static_cast<Eigen::Index>(rb.assets.size()));
        sc.index_returns.resize(periods);
        for (std::size_t p = 0; p < periods; ++p) {
            const std::size_t t = first_ret + p;
            sc.index_returns[p] = index_px[t] / index_px[t - 1] - 1.0;
            for (std::size_t a = 0; a < rb.assets.size(); ++a) {
                sc.returns(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(a)) = asset_return(a, t);
            }
        }

        SsdOptions opt;
        opt.scaled = cfg.scaled;
        opt.solver = cfg.solver;
        opt.cut_tol = cfg.cut_tol;
        opt.bounds = cfg.group_bounds;
        opt.bounds.push_back(GroupBound::of(AssetGroup::F, 0.0, cfg.riskfree_cap));
        SsdSolution sol;
        try {
            sol = optimize(sc, opt);
        } catch (const std::exception& e) {
            throw BacktestError("rebalance " + format_date(rb.date) + " (in-sample " +
                                format_date(data.calendar[i + 1 - lb]) + ".." + format_date(rb.date) +
                                "): " + e.what());
        }
        rb.weights = sol.weights;
        rb.objective = sol.objective;
        rb.cut_rounds = sol.iterations;

        const std::size_t last = std::min(n - 1, i + static_cast<std::size_t>(cfg.oos_hold));
        std::vector<double> last_px;
        for (const auto* px : equity_px) last_px.push_back((*px)[i]);
        std::vector<std::vector<double>> window;
        for (std::size_t t = i + 1; t <= last; ++t) {
            std::vector<double> row(rb.assets.size());
            for (std::size_t a = 0; a < rb.assets.size(); ++a) {
                row[a] = a < equity_px.size() ? detail::held_return(*equity_px[a], t, last_px[a]) : asset_return(a, t);
            }
            window.push_back(std::move(row));
            rb.oos_dates.push_back(data.calendar[t]);
        }
        rb.oos_returns = oos_window_returns(rb.weights, window);
    });

    // 4. concatenate
    const auto rf_ratio = ratio_rate(data);
    const auto spy_col = data.prices.column(kEtfTicker);
    double value = 1.0;
    for (const auto& rb : result.rebalances) {
        for (std::size_t d = 0; d < rb.oos_dates.size(); ++d) {
            const std::size_t t = rb.index + 1 + d;
            result.dates.push_back(rb.oos_dates[d]);
            result.returns.push_back(rb.oos_returns[d]);
            value *= 1.0 + rb.oos_returns[d];
            result.values.push_back(value);
            result.index_returns.push_back(index_px[t] / index_px[t - 1] - 1.0);
            if (spy_col) {
                const auto& spy = data.prices.prices[*spy_col];
                result.spy_returns.push_back(is_missing(spy[t]) || is_missing(spy[t - 1]) ? 0.0 : spy[t] / spy[t - 1] - 1.0);
            }
            result.rf_daily.push_back(rf_ratio[t]);
        }
    }
    return result;
}

// ---- output files ------------------------------------------------------------------

inline void write_oos_returns_csv(std::ostream& os, const BacktestResult& r) {
    os << "date,return,value\n";
    for (std::size_t k = 0; k < r.dates.size(); ++k) {
        os << format_date(r.dates[k]) << ',' << csv::fmt(r.returns[k]) << ',' << csv::fmt(r.values[k]) << '\n';
    }
}

inline void write_weights_csv(std::ostream& os, const BacktestResult& r) {
    os << "rebalance_date,asset,weight\n";
    for (const auto& rb : r.rebalances) {
        for (std::size_t a = 0; a < rb.assets.size(); ++a) {
            if (rb.weights[a] > 0.0) os << format_date(rb.date) << ',' << rb.assets[a] << ',' << csv::fmt(rb.weights[a]) << '\n';
        }
    }
}

inline void write_exclusions_csv(std::ostream& os, const BacktestResult& r) {
    os << "rebalance_date,strategy\n";
    for (const auto& rb : r.rebalances) {
        for (const auto& s : rb.excluded) os << format_date(rb.date) << ',' << s << '\n';
    }
}

inline void write_option_weight_csv(std::ostream& os, const BacktestResult& r) {
    os << "rebalance_date,total_option_weight\n";
    for (const auto& rb : r.rebalances) os << format_date(rb.date) << ',' << csv::fmt(rb.option_weight()) << '\n';
}

/// Cumulative value of the portfolio and benchmarks, starting at 1 on the first rebalance.
inline void write_cumulative_csv(std::ostream& os, const BacktestResult& r) {
    const bool spy = !r.spy_returns.empty();
    os << "date,portfolio,index" << (spy ? ",spy" : "") << '\n';
    if (r.rebalances.empty()) return;
    os << format_date(r.rebalances.front().date) << ",1,1" << (spy ? ",1" : "") << '\n';
    double p = 1.0, x = 1.0, s = 1.0;
    for (std::size_t k = 0; k < r.dates.size(); ++k) {
        p *= 1.0 + r.returns[k];
        x *= 1.0 + r.index_returns[k];
        os << format_date(r.dates[k]) << ',' << csv::fmt(p) << ',' << csv::fmt(x);
        if (spy) {
            s *= 1.0 + r.spy_returns[k];
            os << ',' << csv::fmt(s);
        }
        os << '\n';
    }
}

inline std::vector<analytics::PerfReport> performance(const BacktestResult& r, const std::string& name = "ssd") {
    std::vector<analytics::PerfReport> out;
    if (r.returns.size() < 2) return out;
    out.push_back(analytics::report(name, r.returns, r.rf_daily));
    out.push_back(analytics::report("index", r.index_returns, r.rf_daily));
    if (!r.spy_returns.empty()) out.push_back(analytics::report("spy", r.spy_returns, r.rf_daily));
    return out;
}

}  // namespace ssdopt
