#pragma once

#include <cmath>
#include <stdexcept>
#include <string_view>

#include "ssdopt/date.hpp"

namespace ssdopt {

inline constexpr double kDaysPerYear = 365.0;

enum class OptionKind { call, put };

inline std::string_view to_string(OptionKind k) { return k == OptionKind::call ? "call" : "put"; }

/// European index option.
struct OptionSpec {
    OptionKind kind = OptionKind::call;
    double exercise = 0.0;
    Date expiry{};

    friend bool operator==(const OptionSpec&, const OptionSpec&) = default;
};

/// Market state used to price an option at date t.
struct MarketSnapshot {
    Date t{};
    double underlying = 0.0;
    double vol = 0.0;   // annualised, decimal
    double rate = 0.0;  // annualised risk-free, decimal
};

/// Remaining lifetime in years, calendar days / 365.
inline double lifetime_years(Date t, Date expiry) {
    return static_cast<double>(days_between(t, expiry)) / kDaysPerYear;
}

/// Standard normal CDF via erfc, which keeps full relative accuracy in the lower tail.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct BlackScholesResult {
    double price = 0.0;
    double d1 = 0.0;  // NaN when the limit branch is used
    double d2 = 0.0;
};

/// Black-Scholes price of a European option on a non-dividend underlying.
/// A zero lifetime or zero volatility takes the deterministic limit max(0, ±(U − E·e^{−rL})),
/// which is the intrinsic value at L = 0.
inline BlackScholesResult black_scholes(OptionKind kind, double underlying, double exercise,
                                        double rate, double vol, double years) {
    if (years < 0.0) throw std::domain_error("option lifetime is negative");
    if (!(underlying > 0.0)) throw std::domain_error("underlying must be positive");
    if (!(exercise > 0.0)) throw std::domain_error("exercise price must be positive");
    if (vol < 0.0) throw std::domain_error("volatility must be non-negative");

    const double discounted_strike = exercise * std::exp(-rate * years);
    const double sd = vol * std::sqrt(years);
    if (sd == 0.0) {
        const double fwd_intrinsic = underlying - discounted_strike;
        const double nan = std::nan("");
        return {kind == OptionKind::call ? std::max(0.0, fwd_intrinsic) : std::max(0.0, -fwd_intrinsic),
                nan, nan};
    }
    const double d1 = (std::log(underlying / exercise) + (rate + 0.5 * vol * vol) * years) / sd;
    const double d2 = d1 - sd;
    const double price = kind == OptionKind::call
                             ? underlying * norm_cdf(d1) - discounted_strike * norm_cdf(d2)
                             : discounted_strike * norm_cdf(-d2) - underlying * norm_cdf(-d1);
    // Cancellation can leave a value a few ulps below zero deep out of the money.
    return {std::max(0.0, price), d1, d2};
}

inline double price(const OptionSpec& option, const MarketSnapshot& mkt) {
    if (option.expiry < mkt.t) throw std::domain_error("option has already expired");
    return black_scholes(option.kind, mkt.underlying, option.exercise, mkt.rate, mkt.vol,
                         lifetime_years(mkt.t, option.expiry))
        .price;
}

/// Forward level U·e^{rL} with no dividends.
inline double forward_price(const MarketSnapshot& mkt, double years) {
    if (years < 0.0) throw std::domain_error("forward horizon is negative");
    return mkt.underlying * std::exp(mkt.rate * years);
}

/// Percentage distance 100·|F − E|/F.
inline double moneyness_pct(double forward, double exercise) {
    if (!(forward > 0.0)) throw std::domain_error("forward must be positive");
    return 100.0 * std::abs(forward - exercise) / forward;
}

enum class Moneyness { atm, itm, otm };

inline std::string_view to_string(Moneyness m) {
    switch (m) {
        case Moneyness::atm: return "ATM";
        case Moneyness::itm: return "ITM";
        case Moneyness::otm: return "OTM";
    }
    return "?";
}

/// Reporting tolerance for "approximately at the money", as a fraction of F.
inline constexpr double kAtmTolerance = 1e-3;

/// ATM/ITM/OTM label. For reporting only; strategy rules use strike targets directly.
inline Moneyness classify(OptionKind kind, double forward, double exercise,
                          double atm_tolerance = kAtmTolerance) {
    if (!(forward > 0.0) || !(exercise > 0.0)) throw std::domain_error("levels must be positive");
    if (std::abs(forward - exercise) / forward < atm_tolerance || forward == exercise) {
        return Moneyness::atm;
    }
    const bool strike_below = exercise < forward;
    if (kind == OptionKind::call) return strike_below ? Moneyness::itm : Moneyness::otm;
    return strike_below ? Moneyness::otm : Moneyness::itm;
}

inline constexpr double kStrikeGrid = 5.0;

inline double round_to_strike_grid(double level) {
    // std::round rounds half away from zero.
    return std::round(level / kStrikeGrid) * kStrikeGrid;
}

/// Strike level sitting `target_pct` out of the money relative to the forward
/// (below F for puts, above F for calls), before grid rounding.
inline double target_level(OptionKind kind, double forward, double target_pct) {
    const double k = kind == OptionKind::put ? 1.0 - target_pct / 100.0 : 1.0 + target_pct / 100.0;
    return k * forward;
}

/// Exercise price on the 5-point grid nearest to the moneyness target. A target of 0 is ATM.
inline double strike_for_target(OptionKind kind, double forward, double target_pct) {
    if (!(forward > 0.0)) throw std::domain_error("forward must be positive");
    if (target_pct < 0.0) throw std::domain_error("moneyness target must be non-negative");
    return round_to_strike_grid(target_level(kind, forward, target_pct));
}

enum class StrikeSide { atm, otm };

inline double strike_for_target(OptionKind kind, double forward, double target_pct,
                                StrikeSide side) {
    return strike_for_target(kind, forward, side == StrikeSide::atm ? 0.0 : target_pct);
}

}  // namespace ssdopt
