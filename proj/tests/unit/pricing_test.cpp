#include <gtest/gtest.h>

#include <random>

#include "bs_oracle.hpp"
#include "ssdopt/pricing.hpp"

using namespace ssdopt;

TEST(NormCdf, KnownValues) {
    EXPECT_EQ(norm_cdf(0.0), 0.5);
    EXPECT_NEAR(norm_cdf(1.0), 0.8413447461, 1e-10);
    for (double x : {-7.0, -2.5, -0.3, 0.1, 1.7, 4.0}) EXPECT_NEAR(norm_cdf(x), 1.0 - norm_cdf(-x), 1e-15);
    double prev = 0.0;
    for (double x = -10.0; x <= 10.0; x += 0.01) {
        const double v = norm_cdf(x);
        EXPECT_GE(v, prev);
        EXPECT_LE(v, 1.0);
        prev = v;
    }
}

TEST(BlackScholes, VanishingVolIsIntrinsic) {
    const auto r = black_scholes(OptionKind::call, 100, 50, 0.0, 1e-9, 1.0);
    EXPECT_NEAR(r.price, 50.0, 1e-9);
    EXPECT_EQ(black_scholes(OptionKind::put, 100, 50, 0.0, 0.0, 1.0).price, 0.0);
    EXPECT_EQ(black_scholes(OptionKind::call, 100, 90, 0.05, 0.3, 0.0).price, 10.0);
    EXPECT_TRUE(std::isnan(black_scholes(OptionKind::call, 100, 90, 0.05, 0.3, 0.0).d1));
}

TEST(BlackScholes, AtTheMoneyAgainstQuadrature) {
    const double bs = black_scholes(OptionKind::call, 100, 100, 0.05, 0.2, 1.0).price;
    EXPECT_NEAR(bs, 10.450583572185565, 1e-12);
    EXPECT_NEAR(bs, oracle::lognormal_option(true, 100, 100, 0.05, 0.2, 1.0), 1e-9);
}

TEST(BlackScholes, GridAgainstQuadratureAndParity) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(50, 150), E(40, 160), R(0.0, 0.08), S(0.05, 0.8), L(0.01, 2.0);
    for (int k = 0; k < 200; ++k) {
        const double u = U(rng), e = E(rng), r = R(rng), s = S(rng), l = L(rng);
        const double c = black_scholes(OptionKind::call, u, e, r, s, l).price;
        const double p = black_scholes(OptionKind::put, u, e, r, s, l).price;
        EXPECT_NEAR(c, oracle::lognormal_option(true, u, e, r, s, l), 1e-6);
        EXPECT_NEAR(p, oracle::lognormal_option(false, u, e, r, s, l), 1e-6);
        EXPECT_NEAR(c - p, u - e * std::exp(-r * l), 1e-10);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, u);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, e * std::exp(-r * l));
    }
}

TEST(BlackScholes, MonotoneInStrike) {
    double prev_call = 1e9, prev_put = -1.0;
    for (double e = 50; e <= 150; e += 2.5) {
        const double c = black_scholes(OptionKind::call, 100, e, 0.03, 0.25, 0.5).price;
        const double p = black_scholes(OptionKind::put, 100, e, 0.03, 0.25, 0.5).price;
        EXPECT_LE(c, prev_call);
        EXPECT_GE(p, prev_put);
        prev_call = c;
        prev_put = p;
    }
}

TEST(BlackScholes, ConvergesToIntrinsic) {
    for (double e : {80.0, 99.0, 101.0, 120.0}) {
        EXPECT_NEAR(black_scholes(OptionKind::call, 100, e, 0.02, 0.3, 1e-8).price, std::max(0.0, 100 - e), 1e-6);
        EXPECT_NEAR(black_scholes(OptionKind::put, 100, e, 0.02, 0.3, 1e-8).price, std::max(0.0, e - 100), 1e-6);
    }
    // at the money the time value is about U*sigma*sqrt(L/2pi), not below 1e-6
    const double atm = black_scholes(OptionKind::call, 100, 100, 0.0, 0.3, 1e-8).price;
    EXPECT_NEAR(atm, 100 * 0.3 * 1e-4 * 0.3989422804014327, 1e-8);
}

TEST(BlackScholes, RejectsBadInputs) {
    EXPECT_THROW(black_scholes(OptionKind::call, 100, 100, 0, 0.2, -0.1), std::domain_error);
    EXPECT_THROW(black_scholes(OptionKind::call, 0, 100, 0, 0.2, 1), std::domain_error);
    EXPECT_THROW(black_scholes(OptionKind::call, 100, -1, 0, 0.2, 1), std::domain_error);
    EXPECT_THROW(black_scholes(OptionKind::call, 100, 100, 0, -0.2, 1), std::domain_error);
    const OptionSpec o{OptionKind::put, 100, make_date(2020, 1, 17)};
    EXPECT_THROW(price(o, {make_date(2020, 1, 20), 100, 0.2, 0.01}), std::domain_error);
}

TEST(Pricing, CalendarDayLifetime) {
    EXPECT_DOUBLE_EQ(lifetime_years(make_date(2025, 7, 1), make_date(2025, 7, 30)), 29.0 / 365.0);
    const OptionSpec o{OptionKind::call, 100, make_date(2021, 1, 1)};
    const MarketSnapshot m{make_date(2020, 1, 1), 100, 0.2, 0.05};
    EXPECT_DOUBLE_EQ(price(o, m), black_scholes(OptionKind::call, 100, 100, 0.05, 0.2, 366.0 / 365.0).price);
}

TEST(Forward, Identities) {
    const MarketSnapshot zero_rate{make_date(2020, 1, 1), 6379, 0.2, 0.0};
    EXPECT_EQ(forward_price(zero_rate, 0.5), 6379.0);
    const MarketSnapshot m{make_date(2020, 1, 1), 6379, 0.2, 0.04};
    EXPECT_EQ(forward_price(m, 0.0), 6379.0);
    const double L = 29.0 / 365.0;
    const MarketSnapshot backed{make_date(2020, 1, 1), 6379 * std::exp(-0.04 * L), 0.2, 0.04};
    EXPECT_NEAR(forward_price(backed, L), 6379.0, 1e-9);
    EXPECT_THROW(forward_price(m, -1.0), std::domain_error);
}

TEST(Moneyness, PercentAndLabels) {
    EXPECT_NEAR(moneyness_pct(100, 103), 3.0, 1e-12);
    EXPECT_NEAR(moneyness_pct(103, 100), 2.912621359, 1e-9);
    EXPECT_EQ(moneyness_pct(100, 100), 0.0);
    EXPECT_EQ(classify(OptionKind::put, 100, 103), Moneyness::itm);
    EXPECT_EQ(classify(OptionKind::put, 103, 100), Moneyness::otm);
    EXPECT_EQ(classify(OptionKind::call, 100, 103), Moneyness::otm);
    EXPECT_EQ(classify(OptionKind::call, 103, 100), Moneyness::itm);
    EXPECT_EQ(classify(OptionKind::call, 100, 100), Moneyness::atm);
    EXPECT_EQ(classify(OptionKind::put, 100, 100.05), Moneyness::atm);
}

TEST(Strikes, TargetsAndRounding) {
    EXPECT_EQ(strike_for_target(OptionKind::put, 6379, 3.0), 6190.0);
    EXPECT_EQ(strike_for_target(OptionKind::call, 6002.4, 0.0), 6000.0);
    EXPECT_EQ(strike_for_target(OptionKind::call, 1000, 3.0), 1030.0);
    EXPECT_EQ(strike_for_target(OptionKind::put, 6002.4, 3.0, StrikeSide::atm), 6000.0);
    EXPECT_EQ(round_to_strike_grid(1002.5), 1005.0);
    EXPECT_THROW(strike_for_target(OptionKind::put, 100, -1.0), std::domain_error);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> F(100, 8000), M(0, 10);
    for (int k = 0; k < 1000; ++k) {
        const double e = strike_for_target(k % 2 ? OptionKind::call : OptionKind::put, F(rng), M(rng));
        EXPECT_EQ(std::fmod(e, 5.0), 0.0);
    }
}
