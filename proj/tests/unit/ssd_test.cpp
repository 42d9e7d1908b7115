#include <gtest/gtest.h>

#include <random>

#include "ssd_oracle.hpp"
#include "ssdopt/ssd.hpp"

using namespace ssdopt;

namespace {

ScenarioMatrix make(std::vector<std::vector<double>> cols, std::vector<double> index,
                    std::vector<AssetClass> classes = {}) {
    ScenarioMatrix sc;
    sc.index_returns = std::move(index);
    sc.returns.resize(static_cast<Eigen::Index>(sc.index_returns.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
        sc.assets.push_back("a" + std::to_string(i));
        sc.classes.push_back(classes.empty() ? AssetClass::equity : classes[i]);
        for (std::size_t t = 0; t < cols[i].size(); ++t) {
            sc.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = cols[i][t];
        }
    }
    return sc;
}

}  // namespace

TEST(Tau, SmallestReturnsOverT) {
    const auto tau = compute_tau({-0.03, 0.02, -0.01});
    EXPECT_DOUBLE_EQ(tau.tau[0], -0.01);
    EXPECT_DOUBLE_EQ(tau.tau[1], -0.04 / 3);
    EXPECT_NEAR(tau.tau[2], (-0.03 - 0.01 + 0.02) / 3, 1e-17);
}

TEST(Tau, ZeroReturnsAndIncrements) {
    for (double v : compute_tau({0, 0, 0, 0}).tau) EXPECT_EQ(v, 0.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N(0, 1);
    std::vector<double> r(50);
    for (auto& x : r) x = N(rng);
    const auto tau = compute_tau(r);
    for (std::size_t s = 2; s < r.size(); ++s) {
        EXPECT_GE(tau.tau[s] - tau.tau[s - 1], tau.tau[s - 1] - tau.tau[s - 2] - 1e-15);
    }
    EXPECT_THROW(compute_tau({}), std::invalid_argument);
}

TEST(BuildMaster, CountsRows) {
    const auto sc = make({{0.01, 0.02}}, {0.0, 0.01});
    const auto p = build_master(sc, {{0}, {0, 1}}, true);
    EXPECT_EQ(p.num_constraints(), 2u + 2u + 1u);
    EXPECT_EQ(p.num_vars(), 1u + 1u + 2u);

    const auto q = build_master(sc, {{0}, {0, 1}}, true, {GroupBound::of(AssetGroup::F, 0.0, 0.10)});
    EXPECT_EQ(q.num_constraints(), p.num_constraints() + 1);
    EXPECT_EQ(q.constraints.back().relation(), lp::Relation::range);
}

TEST(BuildMaster, ScaledDiffersOnlyInKappa) {
    const auto sc = make({{0.01, 0.02, -0.01}, {0.0, 0.01, 0.0}}, {0.0, 0.01, -0.02});
    const auto cuts = initial_cut_set(3);
    const auto a = build_master(sc, cuts, true);
    const auto b = build_master(sc, cuts, false);
    ASSERT_EQ(a.num_constraints(), b.num_constraints());
    const std::size_t v = 2;
    for (std::size_t i = 0; i < a.num_constraints(); ++i) {
        for (std::size_t j = 0; j < a.num_vars(); ++j) {
            const bool scaling_row = a.constraints[i].name.rfind("scale_", 0) == 0;
            if (scaling_row && j == v) {
                const double s = static_cast<double>(std::stoi(a.constraints[i].name.substr(6)));
                EXPECT_DOUBLE_EQ(a.constraints[i].coeffs[j], s / 3.0);
                EXPECT_DOUBLE_EQ(b.constraints[i].coeffs[j], 1.0);
            } else {
                EXPECT_EQ(a.constraints[i].coeffs[j], b.constraints[i].coeffs[j]);
            }
        }
    }
}

TEST(BuildMaster, RejectsMissingCardinality) {
    const auto sc = make({{0.01, 0.02}}, {0.0, 0.01});
    EXPECT_THROW(build_master(sc, {{0, 1}}, true), std::invalid_argument);
    EXPECT_THROW(build_master(sc, {{0}, {1, 0}}, true), std::invalid_argument);
    EXPECT_THROW(build_master(sc, {{0}, {0, 1}}, true, {GroupBound::of(AssetGroup::F, 0.5, 0.2)}),
                 std::invalid_argument);
}

TEST(Separate, NothingWhenFullFamilyHolds) {
    const auto sc = make({{-0.02, 0.01, 0.03}}, {-0.02, 0.01, 0.03});
    const auto tau = compute_tau(sc.index_returns);
    EXPECT_TRUE(separate(sc, {1.0}, {0.0, 0.0, 0.0}, tau).empty());
}

TEST(Separate, ReturnsArgminSubsetOfViolatedCardinality) {
    // portfolio returns 0.03, -0.05, 0.01; index all zero
    const auto sc = make({{0.03, -0.05, 0.01}}, {0.0, 0.0, 0.0});
    const auto tau = compute_tau(sc.index_returns);
    // claim V_2 = 0 > (-0.05 + 0.01)/3; V_1 and V_3 claims are honest
    const std::vector<double> tails{-0.05 / 3, 0.0, -0.01 / 3};
    const auto cuts = separate(sc, {1.0}, tails, tau);
    ASSERT_EQ(cuts.size(), 1u);
    EXPECT_EQ(cuts[0], (PeriodSet{1, 2}));

    // brute force: this is the 2-subset with the smallest sum
    double best = 1e9;
    PeriodSet arg;
    for (const auto& J : oracle::all_subsets(3)) {
        if (J.size() != 2) continue;
        double s = 0;
        for (auto t : J) s += sc.returns(static_cast<Eigen::Index>(t), 0);
        if (s < best) {
            best = s;
            arg = J;
        }
    }
    EXPECT_EQ(arg, cuts[0]);
}

TEST(Separate, TiesGoToEarliestPeriod) {
    const auto sc = make({{0.01, -0.01, -0.01, 0.02}}, {0, 0, 0, 0});
    const auto tau = compute_tau(sc.index_returns);
    const auto cuts = separate(sc, {1.0}, {1.0, -1.0, -1.0, -1.0}, tau);
    ASSERT_EQ(cuts.size(), 1u);
    EXPECT_EQ(cuts[0], (PeriodSet{1}));
}

TEST(Optimize, IndexItselfGivesZero) {
    const std::vector<double> idx{-0.02, 0.01, 0.03, -0.005, 0.0};
    const auto sol = optimize(make({idx}, idx));
    EXPECT_NEAR(sol.weights[0], 1.0, 1e-12);
    EXPECT_NEAR(sol.objective, 0.0, 1e-12);
}

TEST(Optimize, PicksTheDominatingAsset) {
    const std::vector<double> idx{-0.02, 0.01, 0.03};
    std::vector<double> a = idx, b = idx;
    for (auto& x : a) x += 0.01;
    for (auto& x : b) x -= 0.02;
    for (bool scaled : {true, false}) {
        SsdOptions o;
        o.scaled = scaled;
        const auto sol = optimize(make({a, b}, idx), o);
        EXPECT_NEAR(sol.weights[0], 1.0, 1e-10);
        EXPECT_GT(sol.objective, 0.0);
    }
}

TEST(Optimize, GroupBoundsRespected) {
    std::mt19937_64 rng(5);
    auto sc = oracle::random_instance(rng, 10, 5);
    // asset 0 becomes a lucrative risk-free asset, capped at 10%
    sc.classes[0] = AssetClass::risk_free;
    for (Eigen::Index t = 0; t < 10; ++t) sc.returns(t, 0) = 0.05;
    sc.classes[1] = AssetClass::put_strategy;
    SsdOptions o;
    o.bounds = {GroupBound::of(AssetGroup::F, 0.0, 0.10), GroupBound::of(AssetGroup::S, 0.2, 0.3)};
    const auto sol = optimize(sc, o);
    EXPECT_LE(sol.weights[0], 0.10 + 1e-8);
    EXPECT_GE(sol.weights[1], 0.2 - 1e-8);
    EXPECT_LE(sol.weights[1], 0.3 + 1e-8);
    const auto full = oracle::full_enumeration(sc, true, o.bounds);
    ASSERT_TRUE(full.optimal());
    EXPECT_NEAR(sol.objective, full.objective_value, 1e-8);
}

TEST(Optimize, MatchesFullEnumerationAndInvariants) {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t T = 3 + rep % 8;
        const std::size_t n = 1 + rep % 6;
        const auto sc = oracle::random_instance(rng, T, n);
        for (bool scaled : {true, false}) {
            SsdOptions o;
            o.scaled = scaled;
            const auto sol = optimize(sc, o);
            const auto full = oracle::full_enumeration(sc, scaled);
            ASSERT_TRUE(full.optimal());
            EXPECT_NEAR(sol.objective, full.objective_value, 1e-8) << "T=" << T << " n=" << n;

            double sum = 0;
            for (double w : sol.weights) {
                EXPECT_GE(w, 0.0);
                sum += w;
            }
            EXPECT_NEAR(sum, 1.0, 1e-8);

            // objective is min_s V_s / kappa_s
            double m = lp::kInf;
            for (std::size_t s = 1; s <= T; ++s) m = std::min(m, sol.tails[s - 1] / kappa(s, T, scaled));
            EXPECT_NEAR(sol.objective, m, 1e-8);

            // the whole combinatorial family holds at termination
            const auto tau = compute_tau(sc.index_returns);
            auto r = portfolio_returns(sc, sol.weights);
            std::sort(r.begin(), r.end());
            double pre = 0;
            for (std::size_t s = 1; s <= T; ++s) {
                pre += r[s - 1];
                EXPECT_LE(sol.tails[s - 1], pre / static_cast<double>(T) - tau.tau[s - 1] + 1e-8);
            }
            for (std::size_t k = 1; k < sol.objective_trace.size(); ++k) {
                EXPECT_LE(sol.objective_trace[k], sol.objective_trace[k - 1] + 1e-12);
            }
            if (sol.objective >= 0) { EXPECT_GE(dominance_gap(sc, sol.weights), -1e-6); }
        }
    }
}

TEST(Optimize, TimeOrderDoesNotMatter) {
    std::mt19937_64 rng(17);
    const auto sc = oracle::random_instance(rng, 30, 4);
    auto shuffled = sc;
    std::vector<Eigen::Index> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index t = 0; t < 30; ++t) {
        shuffled.returns.row(t) = sc.returns.row(perm[static_cast<std::size_t>(t)]);
        shuffled.index_returns[static_cast<std::size_t>(t)] = sc.index_returns[static_cast<std::size_t>(perm[static_cast<std::size_t>(t)])];
    }
    EXPECT_NEAR(optimize(sc).objective, optimize(shuffled).objective, 1e-8);
}

TEST(Optimize, RoundLimitIsAnError) {
    std::mt19937_64 rng(2);
    const auto sc = oracle::random_instance(rng, 12, 4);
    SsdOptions o;
    o.max_rounds = 1;
    EXPECT_THROW(optimize(sc, o), SsdError);
}

TEST(Optimize, InfeasibleBoundsPropagate) {
    const auto sc = make({{0.01, 0.02}, {0.0, 0.01}}, {0.0, 0.01}, {AssetClass::equity, AssetClass::equity});
    SsdOptions o;
    o.bounds = {GroupBound::of(AssetGroup::F, 0.5, 1.0)};  // no risk-free asset present
    EXPECT_THROW(optimize(sc, o), SsdError);
}

TEST(Optimize, DeskSizedMasterSolves) {
    std::mt19937_64 rng(23);
    const auto sc = oracle::random_instance(rng, 200, 120);
    const auto sol = optimize(sc);
    EXPECT_GE(sol.iterations, 1u);
    double sum = 0;
    for (double w : sol.weights) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-8);
    const auto tau = compute_tau(sc.index_returns);
    EXPECT_TRUE(separate(sc, sol.weights, sol.tails, tau, 1e-8).empty());
}
