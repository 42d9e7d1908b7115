#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "ssdopt/lp/problem.hpp"

namespace ssdopt::lp {

namespace detail {

inline std::string lp_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// LP-format names may not start with a digit or contain spaces/operators.
inline std::string lp_name(const std::string& raw, const std::string& fallback) {
    std::string s = raw.empty() ? fallback : raw;
    for (char& ch : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
        if (!ok) ch = '_';
    }
    if (std::isdigit(static_cast<unsigned char>(s.front())) || s.front() == '.') s = "v" + s;
    return s;
}

inline void lp_terms(std::ostream& os, const LpProblem& p, const std::vector<double>& a) {
    bool any = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] == 0.0) continue;
        const std::string name = lp_name(p.names.empty() ? std::string{} : p.names[j], "x" + std::to_string(j));
        os << (a[j] < 0.0 ? " - " : (any ? " + " : " ")) << lp_number(std::abs(a[j])) << ' ' << name;
        any = true;
    }
    if (!any) os << " 0 " << lp_name(p.names.empty() ? std::string{} : p.names[0], "x0");
}

}  // namespace detail

/// Writes the problem in CPLEX LP text format. Two-sided rows are emitted as a pair
/// of one-sided rows suffixed _lo and _hi.
inline void write_lp(std::ostream& os, const LpProblem& p) {
    p.validate();
    using detail::lp_name;
    using detail::lp_number;
    auto vname = [&](std::size_t j) {
        return lp_name(p.names.empty() ? std::string{} : p.names[j], "x" + std::to_string(j));
    };
    os << "Maximize\n obj:";
    detail::lp_terms(os, p, p.objective);
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
        const auto& c = p.constraints[i];
        const std::string base = lp_name(c.name, "c" + std::to_string(i));
        auto row = [&](const std::string& name, const char* op, double rhs) {
            os << ' ' << name << ':';
            detail::lp_terms(os, p, c.coeffs);
            os << ' ' << op << ' ' << lp_number(rhs) << '\n';
        };
        switch (c.relation()) {
            case Relation::le: row(base, "<=", c.upper); break;
            case Relation::ge: row(base, ">=", c.lower); break;
            case Relation::eq: row(base, "=", c.upper); break;
            case Relation::range:
                row(base + "_lo", ">=", c.lower);
                row(base + "_hi", "<=", c.upper);
                break;
        }
    }
    os << "Bounds\n";
    for (std::size_t j = 0; j < p.num_vars(); ++j) {
        const double lo = p.lower[j];
        const double hi = p.upper[j];
        if (lo == 0.0 && hi == kInf) continue;
        os << ' ';
        if (std::isinf(lo) && std::isinf(hi)) {
            os << vname(j) << " free\n";
        } else if (std::isinf(hi)) {
            os << vname(j) << " >= " << lp_number(lo) << '\n';
        } else if (std::isinf(lo)) {
            os << "-inf <= " << vname(j) << " <= " << lp_number(hi) << '\n';
        } else if (lo == hi) {
            os << vname(j) << " = " << lp_number(lo) << '\n';
        } else {
            os << lp_number(lo) << " <= " << vname(j) << " <= " << lp_number(hi) << '\n';
        }
    }
    os << "End\n";
}

}  // namespace ssdopt::lp
