#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ssdopt/csv.hpp"
#include "ssdopt/market_data.hpp"
#include "ssdopt/pricing.hpp"

namespace ssdopt {

// ---------------------------------------------------------------------------
// Trigger signals
// ---------------------------------------------------------------------------

/// Percent index return from the latest trading date at least `lookback_days` calendar
/// days before dates[t] up to dates[t]. Empty when the history is too short.
inline std::optional<double> trailing_return(const std::vector<Date>& dates,
                                             const std::vector<double>& levels, std::size_t t,
                                             int lookback_days) {
    if (t >= dates.size() || lookback_days <= 0) return std::nullopt;
    const Date anchor = dates[t] - std::chrono::days{lookback_days};
    const auto it = std::upper_bound(dates.begin(), dates.begin() + static_cast<long>(t) + 1, anchor);
    if (it == dates.begin()) return std::nullopt;
    const auto base = static_cast<std::size_t>(it - dates.begin()) - 1;
    return 100.0 * (levels[t] / levels[base] - 1.0);
}

/// Annualised percent volatility of the last `lookback_days` daily returns ending at t,
/// sample standard deviation scaled by sqrt(252). Needs at least two returns.
inline std::optional<double> realized_vol(const std::vector<double>& levels, std::size_t t,
                                          int lookback_days) {
    if (lookback_days < 2 || t >= levels.size() || t < static_cast<std::size_t>(lookback_days)) {
        return std::nullopt;
    }
    const std::size_t n = static_cast<std::size_t>(lookback_days);
    double mean = 0.0;
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = t - n + 1 + k;
        r[k] = levels[i] / levels[i - 1] - 1.0;
        mean += r[k];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : r) ss += (x - mean) * (x - mean);
    return 100.0 * std::sqrt(ss / static_cast<double>(n - 1)) * std::sqrt(kTradingDaysPerYear);
}

// ---------------------------------------------------------------------------
// Strategy definition
// ---------------------------------------------------------------------------

enum class Legs { put, call, straddle, strangle };
enum class Trigger { trailing_return, realized_vol };

inline std::string_view to_string(Legs l) {
    switch (l) {
        case Legs::put: return "put";
        case Legs::call: return "call";
        case Legs::straddle: return "straddle";
        case Legs::strangle: return "strangle";
    }
    return "?";
}

inline std::string_view to_string(Trigger t) {
    return t == Trigger::trailing_return ? "trailing_return" : "realized_vol";
}

inline Legs parse_legs(std::string_view s) {
    if (s == "put") return Legs::put;
    if (s == "call") return Legs::call;
    if (s == "straddle") return Legs::straddle;
    if (s == "strangle") return Legs::strangle;
    throw std::invalid_argument("unknown legs '" + std::string(s) + "'");
}

inline Trigger parse_trigger(std::string_view s) {
    if (s == "trailing_return") return Trigger::trailing_return;
    if (s == "realized_vol") return Trigger::realized_vol;
    throw std::invalid_argument("unknown trigger '" + std::string(s) + "'");
}

/// Rule set for one option strategy.
///
/// Entry: trailing index return <= threshold (return trigger) or realised volatility
/// < threshold (volatility trigger). Exit when the entry condition stops holding.
/// Rollover when fewer than `rollover_min_days` calendar days remain or a leg's strike has
/// drifted `moneyness_dev_pct` or more from its target level.
struct StrategyConfig {
    std::string name;
    Legs legs = Legs::put;
    double moneyness_target_pct = 0.0;
    Trigger trigger = Trigger::trailing_return;
    int trigger_lookback_days = 30;
    double trigger_threshold_pct = -5.0;
    int rollover_min_days = 20;
    double moneyness_dev_pct = 3.0;
    double trade_cost_per_unit = 0.0;

    void validate() const {
        if (name.empty()) throw std::invalid_argument("strategy name is empty");
        auto bad = [&](const std::string& why) {
            throw std::invalid_argument("strategy '" + name + "': " + why);
        };
        if (moneyness_target_pct < 0.0) bad("moneyness target must be >= 0");
        if (trigger_lookback_days <= 0) bad("trigger lookback must be positive");
        if (rollover_min_days <= 0) bad("rollover_min_days must be positive");
        if (!(moneyness_dev_pct > 0.0)) bad("moneyness deviation must be positive");
        if (trade_cost_per_unit < 0.0) bad("trade cost must be >= 0");
        if (legs == Legs::straddle && moneyness_target_pct != 0.0) bad("straddle legs are ATM");
        if (legs == Legs::strangle && !(moneyness_target_pct > 0.0)) bad("strangle legs need an OTM target");
    }

    bool is_entry(std::optional<double> signal) const {
        if (!signal) return false;
        return trigger == Trigger::trailing_return ? *signal <= trigger_threshold_pct
                                                   : *signal < trigger_threshold_pct;
    }

    struct Leg {
        OptionKind kind;
        double target_pct;
    };

    std::vector<Leg> leg_set() const {
        switch (legs) {
            case Legs::put: return {{OptionKind::put, moneyness_target_pct}};
            case Legs::call: return {{OptionKind::call, moneyness_target_pct}};
            case Legs::straddle:
            case Legs::strangle:
                return {{OptionKind::call, moneyness_target_pct}, {OptionKind::put, moneyness_target_pct}};
        }
        return {};
    }
};

/// The twelve configurations: momentum puts, reversal calls, calm-period straddles/strangles.
inline std::vector<StrategyConfig> standard_strategies() {
    std::vector<StrategyConfig> out;
    auto moneyness_tag = [](double m) { return m == 0.0 ? std::string("atm") : std::string("otm3"); };
    for (double threshold : {-5.0, -10.0}) {
        for (double m : {0.0, 3.0}) {
            out.push_back({"put_" + moneyness_tag(m) + "_30d_" + std::to_string(static_cast<int>(-threshold)),
                           Legs::put, m, Trigger::trailing_return, 30, threshold});
        }
    }
    for (double threshold : {-7.0, -15.0}) {
        for (double m : {0.0, 3.0}) {
            out.push_back({"call_" + moneyness_tag(m) + "_45d_" + std::to_string(static_cast<int>(-threshold)),
                           Legs::call, m, Trigger::trailing_return, 45, threshold});
        }
    }
    for (int lookback : {20, 30}) {
        out.push_back({"straddle_vol" + std::to_string(lookback), Legs::straddle, 0.0,
                       Trigger::realized_vol, lookback, 8.0});
        out.push_back({"strangle_vol" + std::to_string(lookback), Legs::strangle, 3.0,
                       Trigger::realized_vol, lookback, 8.0});
    }
    return out;
}

inline const std::vector<std::string>& strategy_csv_header() {
    static const std::vector<std::string> h{"name",
                                            "legs",
                                            "moneyness_target_pct",
                                            "trigger",
                                            "trigger_lookback_days",
                                            "trigger_threshold_pct",
                                            "rollover_min_days",
                                            "moneyness_dev_pct",
                                            "trade_cost_per_unit"};
    return h;
}

inline std::vector<StrategyConfig> load_strategies(std::istream& in,
                                                   const std::string& source = "<strategies>") {
    csv::Reader reader(in, source);
    reader.expect_header(strategy_csv_header());
    std::vector<StrategyConfig> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 9) reader.fail("expected 9 fields");
        StrategyConfig c;
        try {
            c.name = f[0];
            c.legs = parse_legs(f[1]);
            c.moneyness_target_pct = csv::to_double(f[2], source, reader.line());
            c.trigger = parse_trigger(f[3]);
            c.trigger_lookback_days = static_cast<int>(csv::to_long(f[4], source, reader.line()));
            c.trigger_threshold_pct = csv::to_double(f[5], source, reader.line());
            c.rollover_min_days = static_cast<int>(csv::to_long(f[6], source, reader.line()));
            c.moneyness_dev_pct = csv::to_double(f[7], source, reader.line());
            c.trade_cost_per_unit = csv::to_double(f[8], source, reader.line());
            c.validate();
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        out.push_back(std::move(c));
    }
    if (out.empty()) throw ParseError(source, reader.line(), "no strategies");
    return out;
}

inline std::vector<StrategyConfig> load_strategies(const std::string& path) {
    auto in = csv::open_input(path);
    return load_strategies(in, path);
}

inline void write_strategies(std::ostream& out, const std::vector<StrategyConfig>& configs) {
    const auto& h = strategy_csv_header();
    for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
    out << '\n';
    for (const auto& c : configs) {
        out << c.name << ',' << to_string(c.legs) << ',' << csv::fmt(c.moneyness_target_pct) << ','
            << to_string(c.trigger) << ',' << c.trigger_lookback_days << ','
            << csv::fmt(c.trigger_threshold_pct) << ',' << c.rollover_min_days << ','
            << csv::fmt(c.moneyness_dev_pct) << ',' << csv::fmt(c.trade_cost_per_unit) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Market view used by the simulator
// ---------------------------------------------------------------------------

/// What the simulator needs from the market at trading-date index t.
template <class M>
concept StrategyMarket = requires(const M& m, std::size_t t, const OptionSpec& o,
                                  const StrategyConfig& c, Date d, int n) {
    { m.size() } -> std::convertible_to<std::size_t>;
    { m.date(t) } -> std::convertible_to<Date>;
    { m.option_price(o, t) } -> std::convertible_to<double>;
    { m.forward(t, d) } -> std::convertible_to<double>;
    { m.next_expiry(t, n) } -> std::convertible_to<Date>;
    { m.signal(c, t) } -> std::convertible_to<std::optional<double>>;
    { m.cash_growth(t) } -> std::convertible_to<double>;
};

/// Historical index path priced with Black-Scholes, VIX as volatility and IRX as rate.
class HistoricalMarket {
public:
    HistoricalMarket(TradingCalendar calendar, std::vector<double> index_levels,
                     std::vector<double> vol, std::vector<double> rate)
        : calendar_(std::move(calendar)),
          index_(std::move(index_levels)),
          vol_(std::move(vol)),
          rate_(std::move(rate)) {
        const auto n = calendar_.size();
        if (index_.size() != n || vol_.size() != n || rate_.size() != n) {
            throw std::invalid_argument("market series lengths differ from the calendar");
        }
        if (n == 0) throw std::invalid_argument("empty market history");
    }

    static HistoricalMarket from(const MarketData& data) {
        return HistoricalMarket(data.calendar, data.prices.series(kIndexTicker), data.vix.values,
                                data.irx.values);
    }

    std::size_t size() const noexcept { return calendar_.size(); }
    Date date(std::size_t t) const { return calendar_[t]; }
    const TradingCalendar& calendar() const noexcept { return calendar_; }
    const std::vector<double>& index_levels() const noexcept { return index_; }
    const std::vector<double>& rates() const noexcept { return rate_; }

    MarketSnapshot snapshot(std::size_t t) const { return {calendar_[t], index_[t], vol_[t], rate_[t]}; }

    double option_price(const OptionSpec& o, std::size_t t) const { return price(o, snapshot(t)); }

    double forward(std::size_t t, Date expiry) const {
        return forward_price(snapshot(t), lifetime_years(calendar_[t], expiry));
    }

    Date next_expiry(std::size_t t, int min_days) const {
        return next_expiration(calendar_, calendar_[t], min_days);
    }

    std::optional<double> signal(const StrategyConfig& c, std::size_t t) const {
        if (c.trigger == Trigger::trailing_return) {
            return trailing_return(calendar_.dates(), index_, t, c.trigger_lookback_days);
        }
        return realized_vol(index_, t, c.trigger_lookback_days);
    }

    /// Growth of cash held from the close of t-1 to the close of t, at the rate quoted on t-1.
    double cash_growth(std::size_t t) const {
        return t == 0 ? 1.0 : 1.0 + daily_risk_free(rate_[t - 1]);
    }

private:
    TradingCalendar calendar_;
    std::vector<double> index_;
    std::vector<double> vol_;
    std::vector<double> rate_;
};

static_assert(StrategyMarket<HistoricalMarket>);

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

enum class Action { none, buy, sell, hold, rollover };

inline std::string_view to_string(Action a) {
    switch (a) {
        case Action::none: return "none";
        case Action::buy: return "buy";
        case Action::sell: return "sell";
        case Action::hold: return "hold";
        case Action::rollover: return "rollover";
    }
    return "?";
}

struct Holding {
    OptionSpec option;
    double units = 0.0;
};

/// Either all cash or fully invested in option legs.
struct StrategyState {
    double cash = 0.0;
    std::vector<Holding> holdings;

    bool in_options() const noexcept { return !holdings.empty(); }
};

struct TradeEvent {
    Date date;
    Action action;
    std::string details;
};

struct StepResult {
    StrategyState state;
    Action action = Action::none;
    std::string details;
};

namespace detail {

inline std::string describe(const std::vector<Holding>& legs) {
    std::string out;
    for (const auto& h : legs) {
        if (!out.empty()) out += ";";
        out += std::string(to_string(h.option.kind)) + " E=" + csv::fmt(h.option.exercise) +
               " exp=" + format_date(h.option.expiry) + " units=" + csv::fmt(h.units);
    }
    return out;
}

template <StrategyMarket M>
double liquidate(const std::vector<Holding>& legs, const M& market, std::size_t t, double cost) {
    double proceeds = 0.0;
    for (const auto& h : legs) {
        proceeds += h.units * std::max(0.0, market.option_price(h.option, t) - cost);
    }
    if (!(proceeds > 0.0)) {
        throw std::domain_error("option position liquidated for nothing on " +
                                format_date(market.date(t)));
    }
    return proceeds;
}

template <StrategyMarket M>
std::vector<Holding> open_legs(const StrategyConfig& config, const M& market, std::size_t t,
                               double cash) {
    const Date expiry = market.next_expiry(t, config.rollover_min_days);
    const double fwd = market.forward(t, expiry);
    const auto legs = config.leg_set();
    const double share = cash / static_cast<double>(legs.size());
    std::vector<Holding> out;
    out.reserve(legs.size());
    for (const auto& leg : legs) {
        OptionSpec spec{leg.kind, strike_for_target(leg.kind, fwd, leg.target_pct), expiry};
        const double unit_cost = market.option_price(spec, t) + config.trade_cost_per_unit;
        if (!(unit_cost > 0.0)) {
            throw std::domain_error("cannot buy a zero-cost option on " + format_date(market.date(t)));
        }
        out.push_back({spec, share / unit_cost});
    }
    return out;
}

template <StrategyMarket M>
bool needs_rollover(const StrategyConfig& config, const std::vector<Holding>& legs, const M& market,
                    std::size_t t) {
    const Date today = market.date(t);
    for (const auto& h : legs) {
        if (days_between(today, h.option.expiry) < config.rollover_min_days) return true;
        const double target = target_level(h.option.kind, market.forward(t, h.option.expiry),
                                           config.moneyness_target_pct);
        if (moneyness_pct(target, h.option.exercise) >= config.moneyness_dev_pct) return true;
    }
    return false;
}

}  // namespace detail

/// Advances the strategy from the close of t-1 to the close of t.
///
/// Cash first accrues one day of interest. Then, in priority order: buy when in cash and
/// the entry condition holds; sell when invested and it no longer holds; roll when
/// invested and expiry or strike drift demands it; otherwise hold. Straddles and
/// strangles split the cash evenly between the call and put legs on every purchase.
template <StrategyMarket M>
StepResult step(StrategyState state, const StrategyConfig& config, const M& market, std::size_t t) {
    if (!state.in_options()) state.cash *= market.cash_growth(t);

    const bool entry = config.is_entry(market.signal(config, t));
    const double cost = config.trade_cost_per_unit;

    if (!state.in_options()) {
        if (!entry) return {std::move(state), Action::none, {}};
        state.holdings = detail::open_legs(config, market, t, state.cash);
        state.cash = 0.0;
        auto details = detail::describe(state.holdings);
        return {std::move(state), Action::buy, std::move(details)};
    }
    if (!entry) {
        state.cash = detail::liquidate(state.holdings, market, t, cost);
        state.holdings.clear();
        auto details = "proceeds=" + csv::fmt(state.cash);
        return {std::move(state), Action::sell, std::move(details)};
    }
    if (detail::needs_rollover(config, state.holdings, market, t)) {
        const double proceeds = detail::liquidate(state.holdings, market, t, cost);
        state.holdings = detail::open_legs(config, market, t, proceeds);
        auto details = detail::describe(state.holdings);
        return {std::move(state), Action::rollover, std::move(details)};
    }
    return {std::move(state), Action::hold, {}};
}

/// Valuation path of a strategy: the artificial asset.
struct ValuationSeries {
    std::string name;
    std::vector<Date> dates;
    std::vector<double> valuations;
    std::vector<double> returns;   // returns[k] is the return on dates[k + 1]
    std::vector<Action> actions;   // one per date
    std::vector<bool> invested;    // holding options at the close of each date
    std::vector<TradeEvent> trade_log;  // buys, sells and rollovers only

    std::size_t size() const noexcept { return dates.size(); }
};

template <StrategyMarket M>
double mark_to_market(const StrategyState& state, const M& market, std::size_t t) {
    if (!state.in_options()) return state.cash;
    double v = 0.0;
    for (const auto& h : state.holdings) v += h.units * market.option_price(h.option, t);
    return v;
}

/// Runs the strategy over every date of the market history, starting in cash.
template <StrategyMarket M>
ValuationSeries evaluate(const StrategyConfig& config, const M& market, double initial_cash = 1.0) {
    config.validate();
    if (market.size() == 0) throw std::invalid_argument("empty market history");
    if (!(initial_cash > 0.0)) throw std::invalid_argument("initial cash must be positive");

    ValuationSeries out;
    out.name = config.name;
    const std::size_t n = market.size();
    out.dates.reserve(n);
    out.valuations.reserve(n);
    out.actions.reserve(n);
    out.invested.reserve(n);

    StrategyState state{initial_cash, {}};
    for (std::size_t t = 0; t < n; ++t) {
        auto r = step(std::move(state), config, market, t);
        state = std::move(r.state);
        const Date d = market.date(t);
        const double v = mark_to_market(state, market, t);
        if (!(v > 0.0)) {
            throw std::domain_error("strategy '" + config.name + "' valuation reached zero on " +
                                    format_date(d));
        }
        out.dates.push_back(d);
        out.valuations.push_back(v);
        out.actions.push_back(r.action);
        out.invested.push_back(state.in_options());
        if (r.action == Action::buy || r.action == Action::sell || r.action == Action::rollover) {
            out.trade_log.push_back({d, r.action, std::move(r.details)});
        }
        if (t > 0) out.returns.push_back(v / out.valuations[t - 1] - 1.0);
    }
    return out;
}

/// True when the strategy bought options inside [first, last] or was holding options at the
/// close of `first`; false means every return generated from holdings over the window
/// was cash.
inline bool traded_in_window(const ValuationSeries& series, Date first, Date last) {
    for (const auto& e : series.trade_log) {
        if (e.action == Action::buy && e.date >= first && e.date <= last) return true;
    }
    const auto it = std::lower_bound(series.dates.begin(), series.dates.end(), first);
    if (it == series.dates.end() || *it > last) return false;
    return series.invested[static_cast<std::size_t>(it - series.dates.begin())];
}

inline void write_valuation_csv(std::ostream& out, const ValuationSeries& s) {
    out << "date,valuation,return,action\n";
    for (std::size_t t = 0; t < s.size(); ++t) {
        out << format_date(s.dates[t]) << ',' << csv::fmt(s.valuations[t]) << ','
            << (t == 0 ? std::string("NA") : csv::fmt(s.returns[t - 1])) << ','
            << to_string(s.actions[t]) << '\n';
    }
}

}  // namespace ssdopt
