#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ssdopt/csv.hpp"
#include "ssdopt/date.hpp"

namespace ssdopt {

inline constexpr std::string_view kIndexTicker = "SP500";
inline constexpr std::string_view kEtfTicker = "SPY";
inline constexpr double kTradingDaysPerYear = 252.0;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Daily close prices, one column per ticker, NaN where a ticker has no quote.
struct PricePanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    std::vector<std::vector<double>> prices;  // prices[column][date index]

    std::size_t size() const noexcept { return dates.size(); }

    std::optional<std::size_t> column(std::string_view ticker) const {
        const auto it = std::find(tickers.begin(), tickers.end(), ticker);
        if (it == tickers.end()) return std::nullopt;
        return static_cast<std::size_t>(it - tickers.begin());
    }

    const std::vector<double>& series(std::string_view ticker) const {
        const auto c = column(ticker);
        if (!c) throw std::out_of_range("no price series for '" + std::string(ticker) + "'");
        return prices[*c];
    }

    void validate() const {
        for (std::size_t i = 1; i < dates.size(); ++i) {
            if (dates[i] <= dates[i - 1]) {
                throw ValidationError("price dates not strictly increasing at " +
                                      format_date(dates[i]));
            }
        }
        if (prices.size() != tickers.size()) throw ValidationError("ticker/column count mismatch");
        for (std::size_t c = 0; c < prices.size(); ++c) {
            if (prices[c].size() != dates.size()) {
                throw ValidationError("column '" + tickers[c] + "' has wrong length");
            }
            for (std::size_t t = 0; t < dates.size(); ++t) {
                const double p = prices[c][t];
                if (!is_missing(p) && !(p > 0.0)) {
                    throw ValidationError("non-positive price for '" + tickers[c] + "' on " +
                                          format_date(dates[t]));
                }
            }
        }
        if (const auto idx = column(kIndexTicker)) {
            for (std::size_t t = 0; t < dates.size(); ++t) {
                if (is_missing(prices[*idx][t])) {
                    throw ValidationError("index series has a gap on " + format_date(dates[t]));
                }
            }
        }
    }
};

/// Long-format `date,ticker,close`. Each ticker's rows must be in strictly increasing date order.
inline PricePanel load_prices(std::istream& in, const std::string& source = "<prices>") {
    csv::Reader reader(in, source);
    reader.expect_header({"date", "ticker", "close"});

    struct Row {
        Date date;
        std::size_t ticker;
        double close;
    };
    std::vector<Row> rows;
    std::unordered_map<std::string, std::size_t> ticker_ids;
    std::vector<std::string> tickers;
    std::vector<Date> last_seen;

    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 3) reader.fail("expected 3 fields, got " + std::to_string(f.size()));
        Date d;
        try {
            d = parse_date(f[0]);
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        if (f[1].empty()) reader.fail("empty ticker");
        const double close = csv::to_double(f[2], source, reader.line());
        if (!(close > 0.0)) {
            throw ValidationError(source + ":" + std::to_string(reader.line()) +
                                  ": non-positive close for '" + f[1] + "'");
        }
        auto [it, inserted] = ticker_ids.try_emplace(f[1], tickers.size());
        if (inserted) {
            tickers.push_back(f[1]);
            last_seen.push_back(d);
        } else {
            Date& prev = last_seen[it->second];
            if (d == prev) {
                throw ValidationError(source + ":" + std::to_string(reader.line()) +
                                      ": duplicate date " + f[0] + " for '" + f[1] + "'");
            }
            if (d < prev) {
                throw ValidationError(source + ":" + std::to_string(reader.line()) +
                                      ": non-monotone dates for '" + f[1] + "'");
            }
            prev = d;
        }
        rows.push_back({d, it->second, close});
    }
    if (rows.empty()) throw ParseError(source, reader.line(), "no price rows");

    std::set<Date> date_set;
    for (const auto& r : rows) date_set.insert(r.date);

    PricePanel panel;
    panel.dates.assign(date_set.begin(), date_set.end());
    panel.tickers = std::move(tickers);
    panel.prices.assign(panel.tickers.size(), std::vector<double>(panel.dates.size(), kMissing));
    for (const auto& r : rows) {
        const auto t = static_cast<std::size_t>(
            std::lower_bound(panel.dates.begin(), panel.dates.end(), r.date) - panel.dates.begin());
        panel.prices[r.ticker][t] = r.close;
    }
    panel.validate();
    return panel;
}

inline PricePanel load_prices(const std::string& path) {
    auto in = csv::open_input(path);
    return load_prices(in, path);
}

/// Ordered trading dates taken from the price file itself.
class TradingCalendar {
public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::vector<Date> dates) : dates_(std::move(dates)) {
        for (std::size_t i = 1; i < dates_.size(); ++i) {
            if (dates_[i] <= dates_[i - 1]) throw ValidationError("calendar dates not increasing");
        }
    }
    explicit TradingCalendar(const PricePanel& panel) : TradingCalendar(panel.dates) {}

    const std::vector<Date>& dates() const noexcept { return dates_; }
    std::size_t size() const noexcept { return dates_.size(); }
    bool empty() const noexcept { return dates_.empty(); }
    Date operator[](std::size_t i) const { return dates_[i]; }
    Date front() const { return dates_.front(); }
    Date back() const { return dates_.back(); }

    bool contains(Date d) const { return std::binary_search(dates_.begin(), dates_.end(), d); }

    std::optional<std::size_t> index_of(Date d) const {
        const auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
        if (it == dates_.end() || *it != d) return std::nullopt;
        return static_cast<std::size_t>(it - dates_.begin());
    }

    /// Index of the latest trading date <= d.
    std::optional<std::size_t> index_at_or_before(Date d) const {
        const auto it = std::upper_bound(dates_.begin(), dates_.end(), d);
        if (it == dates_.begin()) return std::nullopt;
        return static_cast<std::size_t>(it - dates_.begin()) - 1;
    }

private:
    std::vector<Date> dates_;
};

/// Dated index-membership intervals (inclusive at both ends).
class MembershipMask {
public:
    struct Interval {
        Date start;
        Date end;
    };

    void add(const std::string& ticker, Date start, Date end) {
        if (end < start) {
            throw ValidationError("membership interval for '" + ticker + "' ends before it starts");
        }
        auto& list = intervals_[ticker];
        const auto pos = std::lower_bound(list.begin(), list.end(), start,
                                          [](const Interval& iv, Date d) { return iv.start < d; });
        if (pos != list.end() && pos->start <= end) {
            throw ValidationError("overlapping membership intervals for '" + ticker + "'");
        }
        if (pos != list.begin() && std::prev(pos)->end >= start) {
            throw ValidationError("overlapping membership intervals for '" + ticker + "'");
        }
        list.insert(pos, Interval{start, end});
    }

    bool is_member(std::string_view ticker, Date d) const {
        const auto it = intervals_.find(std::string(ticker));
        if (it == intervals_.end()) return false;
        const auto& list = it->second;
        auto pos = std::upper_bound(list.begin(), list.end(), d,
                                    [](Date x, const Interval& iv) { return x < iv.start; });
        if (pos == list.begin()) return false;
        return std::prev(pos)->end >= d;
    }

    bool empty() const noexcept { return intervals_.empty(); }

    std::vector<std::string> tickers() const {
        std::vector<std::string> out;
        for (const auto& [t, _] : intervals_) out.push_back(t);
        return out;
    }

    /// Tickers referenced by the mask that have no price column.
    std::vector<std::string> unknown_tickers(const PricePanel& panel) const {
        std::vector<std::string> out;
        for (const auto& [t, _] : intervals_) {
            if (!panel.column(t)) out.push_back(t);
        }
        return out;
    }

private:
    std::map<std::string, std::vector<Interval>> intervals_;
};

inline MembershipMask load_membership(std::istream& in, const std::string& source = "<membership>") {
    csv::Reader reader(in, source);
    reader.expect_header({"ticker", "start_date", "end_date"});
    MembershipMask mask;
    std::vector<std::string> f;
    std::size_t n = 0;
    while (reader.next(f)) {
        if (f.size() != 3) reader.fail("expected 3 fields");
        try {
            mask.add(f[0], parse_date(f[1]), parse_date(f[2]));
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        ++n;
    }
    if (n == 0) throw ParseError(source, reader.line(), "no membership rows");
    return mask;
}

inline MembershipMask load_membership(const std::string& path) {
    auto in = csv::open_input(path);
    return load_membership(in, path);
}

enum class RateKind { vix, irx, tnx };

inline std::string_view to_string(RateKind k) {
    switch (k) {
        case RateKind::vix: return "vix";
        case RateKind::irx: return "irx";
        case RateKind::tnx: return "tnx";
    }
    return "?";
}

/// Annualised rate or volatility as a decimal fraction (files carry percent).
struct RateSeries {
    RateKind kind = RateKind::irx;
    std::vector<Date> dates;
    std::vector<double> values;

    /// Value on each calendar date, carrying the last observation forward. Calendar dates
    /// before the first observation take the first observation.
    RateSeries aligned_to(const TradingCalendar& calendar) const {
        if (values.empty()) throw ValidationError("cannot align an empty rate series");
        RateSeries out;
        out.kind = kind;
        out.dates = calendar.dates();
        out.values.reserve(calendar.size());
        std::size_t j = 0;
        for (const Date d : calendar.dates()) {
            while (j + 1 < dates.size() && dates[j + 1] <= d) ++j;
            out.values.push_back(values[j]);
        }
        return out;
    }
};

inline RateSeries load_rate_series(std::istream& in, RateKind kind,
                                   const std::string& source = "<rates>") {
    csv::Reader reader(in, source);
    reader.expect_header({"date", "value"});
    RateSeries series;
    series.kind = kind;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 2) reader.fail("expected 2 fields");
        Date d;
        try {
            d = parse_date(f[0]);
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        if (!series.dates.empty() && d <= series.dates.back()) {
            throw ValidationError(source + ":" + std::to_string(reader.line()) +
                                  ": rate dates not strictly increasing");
        }
        const double pct = csv::to_double(f[1], source, reader.line());
        if (pct < 0.0) {
            throw ValidationError(source + ":" + std::to_string(reader.line()) + ": negative " +
                                  std::string(to_string(kind)) + " value");
        }
        series.dates.push_back(d);
        series.values.push_back(pct / 100.0);
    }
    if (series.values.empty()) throw ParseError(source, reader.line(), "empty rate file");
    return series;
}

inline RateSeries load_rate_series(const std::string& path, RateKind kind) {
    auto in = csv::open_input(path);
    return load_rate_series(in, kind, path);
}

/// Simple returns r_t = P_t / P_{t-1} - 1.
inline std::vector<double> to_returns(const std::vector<double>& prices) {
    if (prices.size() < 2) throw std::invalid_argument("need at least two prices for returns");
    std::vector<double> r(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) r[t - 1] = prices[t] / prices[t - 1] - 1.0;
    return r;
}

/// Per-ticker simple returns; entry k is the return on dates[k + 1]. NaN where either
/// endpoint price is missing.
struct ReturnPanel {
    std::vector<Date> dates;
    std::vector<std::string> tickers;
    std::vector<std::vector<double>> returns;
};

inline ReturnPanel to_returns(const PricePanel& panel) {
    if (panel.size() < 2) throw std::invalid_argument("need at least two dates for returns");
    ReturnPanel out;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.tickers = panel.tickers;
    out.returns.reserve(panel.tickers.size());
    for (const auto& col : panel.prices) {
        std::vector<double> r(col.size() - 1);
        for (std::size_t t = 1; t < col.size(); ++t) r[t - 1] = col[t] / col[t - 1] - 1.0;
        out.returns.push_back(std::move(r));
    }
    return out;
}

/// Daily rate compounding to the given annualised rate over 252 trading days.
inline double daily_risk_free(double annualized) {
    if (annualized < -1.0) throw std::domain_error("annualised rate below -100%");
    return std::pow(1.0 + annualized, 1.0 / kTradingDaysPerYear) - 1.0;
}

// ---------------------------------------------------------------------------
// Option expiry calendar
// ---------------------------------------------------------------------------

inline Date third_friday(int year, unsigned month) {
    using namespace std::chrono;
    const year_month_weekday ymw{std::chrono::year{year}, std::chrono::month{month},
                                 weekday_indexed{Friday, 3}};
    return Date{ymw};
}

namespace detail {

inline Date last_day_of_month(int y, unsigned m) {
    using namespace std::chrono;
    return Date{year_month_day_last{std::chrono::year{y}, month_day_last{std::chrono::month{m}}}};
}

inline bool is_weekday(Date d) {
    const std::chrono::weekday wd{d};
    return wd != std::chrono::Saturday && wd != std::chrono::Sunday;
}

// The calendar is authoritative for a month only once it extends through that month's end.
inline bool calendar_covers(const TradingCalendar& cal, int y, unsigned m) {
    return !cal.empty() && cal.front() <= make_date(y, m, 1) && cal.back() >= last_day_of_month(y, m);
}

inline void next_month(int& y, unsigned& m) {
    if (++m == 13) {
        m = 1;
        ++y;
    }
}

}  // namespace detail

/// Last trading date of the month according to the calendar.
inline Date last_business_day(const TradingCalendar& calendar, int year, unsigned month) {
    const Date first = make_date(year, month, 1);
    const Date last = detail::last_day_of_month(year, month);
    const auto idx = calendar.index_at_or_before(last);
    if (!idx || calendar[*idx] < first) {
        throw std::out_of_range("no trading dates in " + std::to_string(year) + "-" +
                                std::to_string(month));
    }
    return calendar[*idx];
}

/// Monthly (third Friday) and EOM expiries for a month. Inside the calendar's span a
/// third Friday that is not a trading date moves to the preceding trading date; months
/// past the end of the calendar fall back to weekday rules.
inline std::vector<Date> expiries_in_month(const TradingCalendar& calendar, int year,
                                           unsigned month) {
    Date monthly = third_friday(year, month);
    Date eom;
    if (detail::calendar_covers(calendar, year, month)) {
        if (!calendar.contains(monthly)) {
            const auto idx = calendar.index_at_or_before(monthly);
            if (idx) monthly = calendar[*idx];
        }
        eom = last_business_day(calendar, year, month);
    } else {
        eom = detail::last_day_of_month(year, month);
        while (!detail::is_weekday(eom)) eom -= std::chrono::days{1};
    }
    std::vector<Date> out{monthly};
    if (eom != monthly) out.push_back(eom);
    std::sort(out.begin(), out.end());
    return out;
}

/// Earliest Monthly-or-EOM expiry at least `min_days` calendar days after t.
inline Date next_expiration(const TradingCalendar& calendar, Date t, int min_days) {
    if (min_days < 0) throw std::invalid_argument("min_days must be non-negative");
    if (calendar.empty()) throw std::out_of_range("empty trading calendar");
    int y = year_of(t);
    unsigned m = month_of(t);
    // Two expiries per month; a horizon of min_days/28 + 3 months always contains one.
    const int max_months = min_days / 28 + 3;
    for (int k = 0; k < max_months; ++k, detail::next_month(y, m)) {
        for (const Date e : expiries_in_month(calendar, y, m)) {
            if (days_between(t, e) >= min_days) return e;
        }
    }
    throw std::out_of_range("no expiry found at least " + std::to_string(min_days) +
                            " days after " + format_date(t));
}

// ---------------------------------------------------------------------------
// Dataset bundle
// ---------------------------------------------------------------------------

/// Everything the backtester needs, aligned on one trading calendar.
struct MarketData {
    PricePanel prices;
    TradingCalendar calendar;
    std::optional<MembershipMask> membership;  // absent: every ticker is always eligible
    RateSeries vix;
    RateSeries irx;
    std::optional<RateSeries> tnx;
    std::vector<std::string> warnings;

    bool is_member(std::string_view ticker, Date d) const {
        return !membership || membership->is_member(ticker, d);
    }
};

/// Loads `prices.csv`, `vix.csv`, `irx.csv` and, when present, `membership.csv` and
/// `tnx.csv` from a directory.
inline MarketData load_market_data(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    auto require = [&](const char* name) {
        const fs::path p = dir / name;
        if (!fs::exists(p)) throw std::runtime_error("missing input file '" + p.string() + "'");
        return p.string();
    };
    MarketData data;
    data.prices = load_prices(require("prices.csv"));
    if (!data.prices.column(kIndexTicker)) {
        throw ValidationError("prices.csv has no '" + std::string(kIndexTicker) + "' series");
    }
    data.calendar = TradingCalendar(data.prices);
    data.vix = load_rate_series(require("vix.csv"), RateKind::vix).aligned_to(data.calendar);
    data.irx = load_rate_series(require("irx.csv"), RateKind::irx).aligned_to(data.calendar);
    if (fs::exists(dir / "tnx.csv")) {
        data.tnx = load_rate_series((dir / "tnx.csv").string(), RateKind::tnx)
                       .aligned_to(data.calendar);
    }
    if (fs::exists(dir / "membership.csv")) {
        data.membership = load_membership((dir / "membership.csv").string());
        for (const auto& t : data.membership->unknown_tickers(data.prices)) {
            data.warnings.push_back("membership references unknown ticker '" + t + "'");
        }
    }
    return data;
}

}  // namespace ssdopt
