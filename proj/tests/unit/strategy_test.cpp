#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ssdopt/strategy.hpp"
#include "six_period.hpp"

using namespace ssdopt;

namespace {

double round1(double x) { return std::round(x * 10.0) / 10.0; }

// Flat or scripted index on consecutive weekdays, fixed vol and rate.
HistoricalMarket make_history(const std::vector<double>& levels, double vol = 0.2, double rate = 0.0) {
    std::vector<Date> dates;
    Date d = make_date(2020, 1, 2);
    while (dates.size() < levels.size()) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) dates.push_back(d);
        d += std::chrono::days{1};
    }
    const auto n = levels.size();
    return HistoricalMarket(TradingCalendar(dates), levels, std::vector<double>(n, vol), std::vector<double>(n, rate));
}

}  // namespace

TEST(Signals, TrailingReturn) {
    const std::vector<Date> dates{make_date(2020, 1, 1), make_date(2020, 1, 15), make_date(2020, 1, 31)};
    EXPECT_NEAR(*trailing_return(dates, {100, 97, 94.9}, 2, 30), -5.1, 1e-12);
    EXPECT_EQ(*trailing_return(dates, {100, 100, 100}, 2, 30), 0.0);
    EXPECT_FALSE(trailing_return(dates, {100, 100, 100}, 1, 30).has_value());
    // the anchor is the latest date at least lookback days back
    EXPECT_NEAR(*trailing_return(dates, {100, 90, 99}, 2, 16), 10.0, 1e-12);
}

TEST(Signals, RealizedVol) {
    std::vector<double> flat(30, 100.0);
    EXPECT_EQ(*realized_vol(flat, 25, 20), 0.0);
    std::vector<double> growth{100.0};
    for (int k = 0; k < 25; ++k) growth.push_back(growth.back() * 1.001);
    EXPECT_NEAR(*realized_vol(growth, 25, 20), 0.0, 1e-9);

    std::vector<double> alt{100.0};
    for (int k = 0; k < 20; ++k) alt.push_back(alt.back() * (k % 2 ? 0.995 : 1.005));
    // 10 x +0.5%, 10 x -0.5%: mean 0, sample sd = 0.005 * sqrt(20/19)
    EXPECT_NEAR(*realized_vol(alt, 20, 20), 100.0 * 0.005 * std::sqrt(20.0 / 19.0) * std::sqrt(252.0), 1e-10);
    EXPECT_FALSE(realized_vol(alt, 20, 1).has_value());
    EXPECT_FALSE(realized_vol(alt, 19, 20).has_value());
}

TEST(SixPeriodExample, ValuationsAndReturns) {
    const six_period::ScriptedMarket m;
    const auto s = evaluate(six_period::config(), m, 1000.0);
    ASSERT_EQ(s.size(), 6u);
    for (std::size_t t = 0; t < 6; ++t) EXPECT_EQ(round1(s.valuations[t]), six_period::kValuations[t]) << t;
    for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(round1(100.0 * s.returns[t]), six_period::kReturnsPct[t]) << t;
    const std::vector<Action> want{Action::none, Action::buy, Action::hold, Action::rollover, Action::hold, Action::sell};
    EXPECT_EQ(s.actions, want);
    ASSERT_EQ(s.trade_log.size(), 3u);
    EXPECT_NE(s.trade_log[0].details.find("E=6190"), std::string::npos) << s.trade_log[0].details;
    EXPECT_EQ(days_between(m.date(3), m.first_expiry()), 19);
}

TEST(SixPeriodExample, StepByStep) {
    const six_period::ScriptedMarket m;
    const auto cfg = six_period::config();
    StrategyState st{1000.0, {}};
    auto r = step(st, cfg, m, 0);
    EXPECT_EQ(r.action, Action::none);
    r = step(r.state, cfg, m, 1);
    ASSERT_EQ(r.action, Action::buy);
    ASSERT_EQ(r.state.holdings.size(), 1u);
    EXPECT_EQ(r.state.holdings[0].option.exercise, 6190.0);
    EXPECT_EQ(r.state.holdings[0].option.kind, OptionKind::put);
    EXPECT_NEAR(r.state.holdings[0].units, 1000.0 / 90.0, 1e-12);
}

TEST(Strategy, FlatCashPath) {
    const auto m = make_history(std::vector<double>(120, 3000.0), 0.2, 0.0);
    for (const auto& c : standard_strategies()) {
        if (c.trigger != Trigger::trailing_return) continue;
        const auto s = evaluate(c, m, 1.0);
        for (double v : s.valuations) EXPECT_EQ(v, 1.0);
        for (double r : s.returns) EXPECT_EQ(r, 0.0);
        EXPECT_TRUE(s.trade_log.empty());
    }
}

TEST(Strategy, CashAccruesAtPreviousRate) {
    const auto m = make_history(std::vector<double>(10, 3000.0), 0.2, 0.05);
    auto c = standard_strategies()[0];
    const auto s = evaluate(c, m, 1.0);
    EXPECT_NEAR(s.valuations.back(), std::pow(1.0 + daily_risk_free(0.05), 9.0), 1e-14);
}

TEST(Strategy, SelfFinancingAndCosts) {
    // a 12% slide over six weeks fires the momentum puts, then a recovery closes them
    std::vector<double> lv;
    for (int k = 0; k < 40; ++k) lv.push_back(3000.0);
    for (int k = 0; k < 30; ++k) lv.push_back(lv.back() * 0.996);
    for (int k = 0; k < 60; ++k) lv.push_back(lv.back() * 1.004);
    const auto m = make_history(lv, 0.25, 0.02);
    auto c = standard_strategies()[1];  // OTM put, -5%
    const auto s = evaluate(c, m, 1.0);
    EXPECT_FALSE(s.trade_log.empty());
    EXPECT_EQ(s.trade_log.front().action, Action::buy);

    // replay: at each trade date the position value is unchanged by the trade when costs are zero
    StrategyState st{1.0, {}};
    for (std::size_t t = 0; t < m.size(); ++t) {
        const double before = mark_to_market(st, m, t) * (st.in_options() ? 1.0 : m.cash_growth(t));
        auto r = step(st, c, m, t);
        const double after = mark_to_market(r.state, m, t);
        EXPECT_NEAR(after, before, 1e-12 * before) << t;
        st = std::move(r.state);
    }

    auto costly = c;
    costly.trade_cost_per_unit = 1.0;
    const auto sc = evaluate(costly, m, 1.0);
    EXPECT_LT(sc.valuations.back(), s.valuations.back());
}

TEST(Strategy, StraddleSplitsCash) {
    std::vector<double> lv(80, 3000.0);
    const auto m = make_history(lv, 0.2, 0.0);
    auto c = standard_strategies()[8];
    ASSERT_EQ(c.legs, Legs::straddle);
    StrategyState st{2.0, {}};
    auto r = step(st, c, m, 40);
    ASSERT_EQ(r.action, Action::buy);
    ASSERT_EQ(r.state.holdings.size(), 2u);
    for (const auto& h : r.state.holdings) EXPECT_NEAR(h.units * m.option_price(h.option, 40), 1.0, 1e-12);
    EXPECT_EQ(r.state.holdings[0].option.exercise, r.state.holdings[1].option.exercise);
}

TEST(Strategy, StandardSet) {
    const auto s = standard_strategies();
    ASSERT_EQ(s.size(), 12u);
    int puts = 0, calls = 0;
    for (const auto& c : s) {
        c.validate();
        EXPECT_EQ(c.rollover_min_days, 20);
        EXPECT_EQ(c.moneyness_dev_pct, 3.0);
        puts += c.legs == Legs::put;
        calls += c.legs == Legs::call;
        if (c.legs == Legs::straddle) { EXPECT_EQ(c.moneyness_target_pct, 0.0); }
    }
    EXPECT_EQ(puts, 4);
    EXPECT_EQ(calls, 4);
    const auto first_call = std::find_if(s.begin(), s.end(), [](const auto& c) { return c.legs == Legs::call; });
    EXPECT_EQ(first_call->trigger_lookback_days, 45);
}

TEST(Strategy, EntryRules) {
    StrategyConfig c = six_period::config();
    EXPECT_TRUE(c.is_entry(-5.0));
    EXPECT_FALSE(c.is_entry(-4.9));
    EXPECT_FALSE(c.is_entry(std::nullopt));
    c.trigger = Trigger::realized_vol;
    c.trigger_threshold_pct = 8.0;
    EXPECT_TRUE(c.is_entry(7.9));
    EXPECT_FALSE(c.is_entry(8.0));
}

TEST(Strategy, TradedInWindow) {
    ValuationSeries s;
    for (int k = 0; k < 5; ++k) {
        s.dates.push_back(make_date(2020, 1, 1) + std::chrono::days{k});
        s.invested.push_back(false);
    }
    EXPECT_FALSE(traded_in_window(s, s.dates[0], s.dates[4]));
    s.trade_log.push_back({s.dates[3], Action::buy, ""});
    s.invested[3] = s.invested[4] = true;
    EXPECT_TRUE(traded_in_window(s, s.dates[1], s.dates[3]));
    EXPECT_FALSE(traded_in_window(s, s.dates[0], s.dates[2]));
    // already holding at the start of the window
    EXPECT_TRUE(traded_in_window(s, s.dates[4], s.dates[4]));
}

TEST(Strategy, CsvRoundTrip) {
    std::ostringstream os;
    write_strategies(os, standard_strategies());
    std::istringstream in(os.str());
    const auto back = load_strategies(in);
    ASSERT_EQ(back.size(), 12u);
    for (std::size_t k = 0; k < 12; ++k) {
        EXPECT_EQ(back[k].name, standard_strategies()[k].name);
        EXPECT_EQ(back[k].legs, standard_strategies()[k].legs);
        EXPECT_EQ(back[k].trigger_threshold_pct, standard_strategies()[k].trigger_threshold_pct);
    }
    std::istringstream bad(strategy_csv_header()[0] + std::string(",legs,moneyness_target_pct,trigger,trigger_lookback_days,"
                                                                  "trigger_threshold_pct,rollover_min_days,moneyness_dev_pct,"
                                                                  "trade_cost_per_unit\nx,straddle,3,realized_vol,20,8,20,3,0\n"));
    EXPECT_THROW(load_strategies(bad), ParseError);
}

TEST(Strategy, ValuationCsv) {
    const auto s = evaluate(six_period::config(), six_period::ScriptedMarket{}, 1000.0);
    std::ostringstream os;
    write_valuation_csv(os, s);
    EXPECT_EQ(os.str().rfind("date,valuation,return,action\n2025-07-01,1000,NA,none\n", 0), 0u) << os.str();
}
