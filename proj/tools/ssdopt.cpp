// ssdopt: option pricing, strategy simulation, SSD optimisation and backtests from the shell.

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "ssdopt/analytics.hpp"
#include "ssdopt/backtest.hpp"
#include "ssdopt/lp/lp_format.hpp"
#include "ssdopt/ssd.hpp"
#include "ssdopt/strategy.hpp"

namespace fs = std::filesystem;
using namespace ssdopt;

namespace {

struct Settings {
    unsigned jobs = 1;
    double tolerance = 1e-9;
    std::string config;

    // price
    std::string kind = "call";
    double u = 0, e = 0, vol = 0, r = 0, days = 0;
    std::string grid;

    std::string data, out, strategies;
    double initial = 1.0;

    // optimize
    std::string scenarios;
    bool unscaled = false;
    bool write_lp = false;
    std::vector<std::string> bounds;

    // backtest
    std::string universe = "equities";
    bool no_options = false;
    double riskfree_cap = 0.10;
    int lookback = 201, rebalance_every = 21, oos_hold = 21;

    // stats
    std::string returns;
    double rf = 0.0;
    std::string name = "series";
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Outputs go to a hidden sibling directory and are moved into place only on success.
class Staging {
public:
    explicit Staging(const std::string& out) {
        if (out.empty()) throw UsageError("--out is required");
        out_ = fs::path(out).lexically_normal();
        if (out_.filename().empty()) out_ = out_.parent_path();
        stage_ = out_.parent_path() / ("." + out_.filename().string() + ".partial");
        fs::remove_all(stage_);
        fs::create_directories(stage_);
    }
    Staging(const Staging&) = delete;
    Staging& operator=(const Staging&) = delete;
    ~Staging() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(stage_, ec);
        }
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& fn) {
        const auto path = stage_ / name;
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot create '" + path.string() + "'");
        fn(os);
        os.flush();
        if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
    }

    void commit() {
        fs::create_directories(out_);
        for (const auto& entry : fs::directory_iterator(stage_)) {
            fs::rename(entry.path(), out_ / entry.path().filename());
        }
        fs::remove_all(stage_);
        committed_ = true;
    }

    const fs::path& dir() const { return out_; }

private:
    fs::path out_, stage_;
    bool committed_ = false;
};

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("--") + what + " is required");
    if (!fs::is_regular_file(path)) throw std::runtime_error("missing input file '" + path + "'");
}

void require_dir(const std::string& path) {
    if (path.empty()) throw UsageError("--data is required (or set SSDOPT_DATA_DIR)");
    if (!fs::is_directory(path)) throw std::runtime_error("missing data directory '" + path + "'");
}

std::vector<GroupBound> parse_bounds(const std::vector<std::string>& specs) {
    std::vector<GroupBound> out;
    for (const auto& s : specs) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw UsageError("bound '" + s + "' is not GROUP:LOWER:UPPER");
        try {
            auto g = GroupBound::of(parse_asset_group(parts[0]), std::stod(parts[1]), std::stod(parts[2]));
            g.validate();
            out.push_back(g);
        } catch (const std::exception& e) {
            throw UsageError("bound '" + s + "': " + e.what());
        }
    }
    return out;
}

std::vector<StrategyConfig> strategies_from(const Settings& s) {
    if (s.strategies.empty()) return standard_strategies();
    require_file(s.strategies, "strategies");
    return load_strategies(s.strategies);
}

// ---------------------------------------------------------------------------

OptionKind parse_kind(const std::string& k) {
    if (k == "call") return OptionKind::call;
    if (k == "put") return OptionKind::put;
    throw UsageError("--kind must be call or put, got '" + k + "'");
}

void price_row(std::ostream& os, OptionKind kind, double u, double e, double r, double vol, double days) {
    const auto res = black_scholes(kind, u, e, r, vol, days / kDaysPerYear);
    os << to_string(kind) << ',' << csv::fmt(u) << ',' << csv::fmt(e) << ',' << csv::fmt(r) << ',' << csv::fmt(vol)
       << ',' << csv::fmt(days) << ',' << csv::fmt(res.price) << ',' << csv::fmt(res.d1) << ',' << csv::fmt(res.d2)
       << '\n';
}

int cmd_price(const Settings& s) {
    const char* header = "kind,underlying,exercise,rate,vol,days,price,d1,d2\n";
    if (s.grid.empty()) {
        std::cout << header;
        price_row(std::cout, parse_kind(s.kind), s.u, s.e, s.r, s.vol, s.days);
        return 0;
    }
    require_file(s.grid, "grid");
    auto in = csv::open_input(s.grid);
    csv::Reader reader(in, s.grid);
    reader.expect_header({"kind", "underlying", "exercise", "rate", "vol", "days"});
    std::ostringstream os;
    os << header;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != 6) reader.fail("expected 6 fields");
        auto num = [&](std::size_t i) { return csv::to_double(f[i], s.grid, reader.line()); };
        try {
            price_row(os, parse_kind(f[0]), num(1), num(2), num(3), num(4), num(5));
        } catch (const std::domain_error& e) {
            reader.fail(e.what());
        } catch (const UsageError& e) {
            reader.fail(e.what());
        }
    }
    if (s.out.empty()) {
        std::cout << os.str();
    } else {
        Staging st(s.out);
        st.write("prices.csv", [&](std::ostream& o) { o << os.str(); });
        st.commit();
    }
    return 0;
}

int cmd_simulate(const Settings& s) {
    require_dir(s.data);
    const auto configs = strategies_from(s);
    const auto data = load_market_data(s.data);
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
    Staging st(s.out);
    const auto market = HistoricalMarket::from(data);
    std::vector<ValuationSeries> runs;
    for (const auto& c : configs) runs.push_back(evaluate(c, market, s.initial));
    for (const auto& v : runs) {
        st.write(v.name + ".csv", [&](std::ostream& os) { write_valuation_csv(os, v); });
    }
    st.write("trades.csv", [&](std::ostream& os) {
        os << "strategy,date,action,details\n";
        for (const auto& v : runs) {
            for (const auto& e : v.trade_log) {
                os << v.name << ',' << format_date(e.date) << ',' << to_string(e.action) << ',' << e.details << '\n';
            }
        }
    });
    st.write("summary.csv", [&](std::ostream& os) {
        os << "strategy,final_value,trades,days_invested\n";
        for (const auto& v : runs) {
            const auto invested = std::count(v.invested.begin(), v.invested.end(), true);
            os << v.name << ',' << csv::fmt(v.valuations.back()) << ',' << v.trade_log.size() << ',' << invested << '\n';
        }
    });
    st.commit();
    std::cout << "simulated " << runs.size() << " strategies over " << market.size() << " dates -> "
              << st.dir().string() << '\n';
    return 0;
}

// Wide scenario file: `period,index,<CLASS>:<name>,...` with one row per period.
ScenarioMatrix load_scenarios(const std::string& path) {
    auto in = csv::open_input(path);
    csv::Reader reader(in, path);
    std::vector<std::string> header;
    if (!reader.next(header)) throw ParseError(path, 0, "empty file");
    if (header.size() < 3 || header[1] != "index") {
        reader.fail("expected header 'period,index,<CLASS>:<asset>,...'");
    }
    ScenarioMatrix sc;
    for (std::size_t c = 2; c < header.size(); ++c) {
        const auto colon = header[c].find(':');
        if (colon == std::string::npos) reader.fail("column '" + header[c] + "' has no class prefix");
        try {
            sc.classes.push_back(parse_asset_class(header[c].substr(0, colon)));
        } catch (const std::invalid_argument& e) {
            reader.fail(e.what());
        }
        sc.assets.push_back(header[c].substr(colon + 1));
    }
    std::vector<std::vector<double>> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != header.size()) reader.fail("expected " + std::to_string(header.size()) + " fields");
        sc.index_returns.push_back(csv::to_double(f[1], path, reader.line()));
        std::vector<double> row;
        for (std::size_t c = 2; c < f.size(); ++c) row.push_back(csv::to_double(f[c], path, reader.line()));
        rows.push_back(std::move(row));
    }
    sc.returns.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(sc.assets.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t i = 0; i < rows[t].size(); ++i) {
            sc.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = rows[t][i];
        }
    }
    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return sc;
}

int cmd_optimize(const Settings& s) {
    require_file(s.scenarios, "scenarios");
    const auto sc = load_scenarios(s.scenarios);
    SsdOptions opt;
    opt.scaled = !s.unscaled;
    opt.bounds = parse_bounds(s.bounds);
    opt.cut_tol = s.tolerance;
    Staging st(s.out);
    const auto sol = optimize(sc, opt);
    const double gap = dominance_gap(sc, sol.weights);

    st.write("weights.csv", [&](std::ostream& os) {
        os << "asset,class,weight\n";
        for (std::size_t i = 0; i < sc.num_assets(); ++i) {
            os << sc.assets[i] << ',' << to_string(sc.classes[i]) << ',' << csv::fmt(sol.weights[i]) << '\n';
        }
    });
    st.write("summary.csv", [&](std::ostream& os) {
        os << "key,value\n";
        os << "objective," << csv::fmt(sol.objective) << '\n';
        os << "scaled," << (sol.scaled ? "true" : "false") << '\n';
        os << "periods," << sc.periods() << '\n';
        os << "assets," << sc.num_assets() << '\n';
        os << "rounds," << sol.iterations << '\n';
        os << "cuts," << sol.cut_set.size() << '\n';
        os << "lp_pivots," << sol.lp_pivots << '\n';
        os << "dominance_gap," << csv::fmt(gap) << '\n';
    });
    st.write("objective_trace.csv", [&](std::ostream& os) {
        os << "round,objective\n";
        for (std::size_t k = 0; k < sol.objective_trace.size(); ++k) {
            os << k + 1 << ',' << csv::fmt(sol.objective_trace[k]) << '\n';
        }
    });
    if (s.write_lp) {
        const auto master = build_master(sc, sol.cut_set, opt.scaled, opt.bounds);
        st.write("master.lp", [&](std::ostream& os) { lp::write_lp(os, master); });
    }
    st.commit();
    std::printf("objective %.10g after %zu rounds (%zu cuts)\n", sol.objective, sol.iterations, sol.cut_set.size());
    return 0;
}

int cmd_backtest(const Settings& s) {
    require_dir(s.data);
    BacktestConfig cfg;
    cfg.lookback_prices = s.lookback;
    cfg.rebalance_every = s.rebalance_every;
    cfg.oos_hold = s.oos_hold;
    cfg.riskfree_cap = s.riskfree_cap;
    cfg.scaled = !s.unscaled;
    cfg.include_options = !s.no_options;
    cfg.group_bounds = parse_bounds(s.bounds);
    cfg.jobs = s.jobs;
    cfg.cut_tol = s.tolerance;
    try {
        cfg.universe = parse_universe(s.universe);
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto configs = cfg.include_options ? strategies_from(s) : std::vector<StrategyConfig>{};
    const auto data = load_market_data(s.data);
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';

    Staging st(s.out);
    const auto res = run_backtest(data, configs, cfg);
    const std::string label = cfg.universe == Universe::spy_only ? "ssd_spy" : "ssd";
    st.write("oos_returns.csv", [&](std::ostream& os) { write_oos_returns_csv(os, res); });
    st.write("weights.csv", [&](std::ostream& os) { write_weights_csv(os, res); });
    st.write("exclusions.csv", [&](std::ostream& os) { write_exclusions_csv(os, res); });
    st.write("option_weight.csv", [&](std::ostream& os) { write_option_weight_csv(os, res); });
    st.write("cumulative.csv", [&](std::ostream& os) { write_cumulative_csv(os, res); });
    st.write("report.csv", [&](std::ostream& os) { analytics::write_report_csv(os, performance(res, label)); });
    st.write("rebalances.csv", [&](std::ostream& os) {
        os << "rebalance_date,assets,objective,cut_rounds,option_weight\n";
        for (const auto& rb : res.rebalances) {
            os << format_date(rb.date) << ',' << rb.assets.size() << ',' << csv::fmt(rb.objective) << ','
               << rb.cut_rounds << ',' << csv::fmt(rb.option_weight()) << '\n';
        }
    });
    st.commit();
    std::cout << res.rebalances.size() << " rebalances, first " << format_date(res.rebalances.front().date)
              << ", final value " << csv::fmt(res.values.back()) << " -> " << st.dir().string() << '\n';
    return 0;
}

// `date,return` or a single `return` column.
std::vector<double> load_return_column(const std::string& path) {
    auto in = csv::open_input(path);
    csv::Reader reader(in, path);
    std::vector<std::string> header;
    if (!reader.next(header)) throw ParseError(path, 0, "empty file");
    const auto it = std::find(header.begin(), header.end(), "return");
    if (it == header.end()) reader.fail("no 'return' column");
    const auto col = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    std::vector<std::string> f;
    while (reader.next(f)) {
        if (f.size() != header.size()) reader.fail("expected " + std::to_string(header.size()) + " fields");
        out.push_back(csv::to_double(f[col], path, reader.line()));
    }
    return out;
}

int cmd_stats(const Settings& s) {
    require_file(s.returns, "returns");
    const auto r = load_return_column(s.returns);
    if (r.size() < 2) throw ValidationError(s.returns + ": need at least two returns");
    const auto rep = analytics::report(s.name, r, {daily_risk_free(s.rf)});
    std::ostringstream os;
    analytics::write_report_csv(os, {rep});
    if (!s.out.empty()) {
        Staging st(s.out);
        st.write("report.csv", [&](std::ostream& o) { o << os.str(); });
        st.commit();
    }
    std::cout << os.str();
    return 0;
}

// ---------------------------------------------------------------------------

void build_app(CLI::App& app, Settings& s) {
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--jobs", s.jobs, "Worker threads for parallel phases")->check(CLI::Range(1u, 1024u));
    app.add_option("--tolerance", s.tolerance, "Cut violation tolerance")->check(CLI::PositiveNumber);
    app.add_option("--config", s.config, "Flat key=value file; flags on the command line win");

    auto* price = app.add_subcommand("price", "Black-Scholes price of a European option");
    price->add_option("--kind", s.kind, "call or put");
    price->add_option("--u", s.u, "Underlying level");
    price->add_option("--e", s.e, "Exercise price");
    price->add_option("--vol", s.vol, "Annual volatility, decimal");
    price->add_option("--r", s.r, "Annual risk-free rate, decimal");
    price->add_option("--days", s.days, "Calendar days to expiry");
    price->add_option("--grid", s.grid, "CSV kind,underlying,exercise,rate,vol,days to price in bulk");
    price->add_option("--out", s.out, "Output directory for --grid (default stdout)");

    auto* sim = app.add_subcommand("simulate-strategy", "Valuation paths of option strategies");
    sim->add_option("--strategies", s.strategies, "Strategy CSV (default: the twelve standard strategies)");
    sim->add_option("--data", s.data, "Market data directory")->envname("SSDOPT_DATA_DIR");
    sim->add_option("--out", s.out, "Output directory");
    sim->add_option("--initial", s.initial, "Initial cash")->check(CLI::PositiveNumber);

    auto* opt = app.add_subcommand("optimize", "SSD portfolio for one scenario matrix");
    opt->add_option("--scenarios", s.scenarios, "Wide CSV: period,index,<CLASS>:<asset>,...");
    opt->add_option("--out", s.out, "Output directory");
    opt->add_flag("--unscaled", s.unscaled, "Unscaled formulation (kappa = 1)");
    opt->add_option("--bound", s.bounds, "Group bound GROUP:LOWER:UPPER, GROUP in E,F,S,Sc,Sp,Scp");
    opt->add_flag("--write-lp", s.write_lp, "Also write the final master problem as master.lp");

    auto* bt = app.add_subcommand("backtest", "Rolling out-of-sample SSD backtest");
    bt->add_option("--data", s.data, "Market data directory")->envname("SSDOPT_DATA_DIR");
    bt->add_option("--out", s.out, "Output directory");
    bt->add_option("--strategies", s.strategies, "Strategy CSV (default: the twelve standard strategies)");
    bt->add_option("--universe", s.universe, "equities, spy_only or cash_only");
    bt->add_flag("--no-options", s.no_options, "Leave option strategies out of the universe");
    bt->add_flag("--unscaled", s.unscaled, "Unscaled formulation (kappa = 1)");
    bt->add_option("--riskfree-cap", s.riskfree_cap, "Upper bound on the risk-free weight");
    bt->add_option("--lookback", s.lookback, "Prices per in-sample window");
    bt->add_option("--rebalance-every", s.rebalance_every, "Trading days between rebalances");
    bt->add_option("--oos-hold", s.oos_hold, "Out-of-sample days per window");
    bt->add_option("--bound", s.bounds, "Extra group bound GROUP:LOWER:UPPER");

    auto* st = app.add_subcommand("stats", "Performance report for a daily return series");
    st->add_option("--returns", s.returns, "CSV with a 'return' column");
    st->add_option("--rf", s.rf, "Annual risk-free rate, decimal");
    st->add_option("--name", s.name, "Series label");
    st->add_option("--out", s.out, "Output directory (report also printed)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
}

std::map<std::string, std::string> read_config(const std::string& path) {
    if (!fs::is_regular_file(path)) throw std::runtime_error("missing config file '" + path + "'");
    std::ifstream in(path);
    std::map<std::string, std::string> kv;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto t = csv::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError(path, line_no, "expected key=value");
        kv[std::string(csv::trim(t.substr(0, eq)))] = std::string(csv::trim(t.substr(eq + 1)));
    }
    return kv;
}

// Turns config entries into extra arguments for options not already given on the command line.
std::vector<std::string> config_args(CLI::App& app, const std::map<std::string, std::string>& kv) {
    CLI::App* sub = app.get_subcommands().front();
    std::vector<std::string> extra;
    for (const auto& [key, value] : kv) {
        const std::string flag = "--" + key;
        CLI::Option* o = sub->get_option_no_throw(flag);
        if (!o) o = app.get_option_no_throw(flag);
        if (!o) throw UsageError("config key '" + key + "' is not an option of " + sub->get_name());
        if (flag == "--config" || o->count() > 0) continue;
        if (o->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "yes") extra.push_back(flag);
            continue;
        }
        if (o->get_expected_max() > 1) {
            std::stringstream ss(value);
            for (std::string item; std::getline(ss, item, ',');) {
                extra.push_back(flag);
                extra.emplace_back(csv::trim(item));
            }
        } else {
            extra.push_back(flag);
            extra.push_back(value);
        }
    }
    return extra;
}

int dispatch(CLI::App& app, const Settings& s) {
    const auto name = app.get_subcommands().front()->get_name();
    if (name == "price") return cmd_price(s);
    if (name == "simulate-strategy") return cmd_simulate(s);
    if (name == "optimize") return cmd_optimize(s);
    if (name == "backtest") return cmd_backtest(s);
    return cmd_stats(s);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    auto parse = [](CLI::App& app, std::vector<std::string> a) {
        std::reverse(a.begin(), a.end());
        app.parse(a);
    };

    Settings s;
    CLI::App app{"SSD portfolio optimisation with option strategies"};
    app.name("ssdopt");
    build_app(app, s);
    try {
        parse(app, args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    Settings merged;
    CLI::App app2{"SSD portfolio optimisation with option strategies"};
    app2.name("ssdopt");
    CLI::App* active = &app;
    const Settings* settings = &s;
    try {
        if (!s.config.empty()) {
            const auto extra = config_args(app, read_config(s.config));
            build_app(app2, merged);
            auto all = args;
            all.insert(all.end(), extra.begin(), extra.end());
            try {
                parse(app2, all);
            } catch (const CLI::ParseError& e) {
                return app2.exit(e);
            }
            active = &app2;
            settings = &merged;
        }
        return dispatch(*active, *settings);
    } catch (const UsageError& e) {
        std::cerr << "ssdopt: " << e.what() << "\nRun with --help for usage.\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ssdopt: error: " << e.what() << '\n';
        return 1;
    }
}
