#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssdopt {

/// Raised for malformed input files. Carries the file and 1-based line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
          source_(source),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Raised when parsed data violates a domain invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

/// Splits one line on commas. Quoting is not supported; none of the formats need it.
inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double to_double(const std::string& s, const std::string& source, std::size_t line) {
    if (s.empty()) throw ParseError(source, line, "empty numeric field");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError(source, line, "not a number: '" + s + "'");
    }
    if (used != s.size()) throw ParseError(source, line, "not a number: '" + s + "'");
    return v;
}

inline long to_long(const std::string& s, const std::string& source, std::size_t line) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw ParseError(source, line, "not an integer: '" + s + "'");
    }
    if (used != s.size()) throw ParseError(source, line, "not an integer: '" + s + "'");
    return v;
}

/// Line-oriented reader that checks the header and yields split records.
class Reader {
public:
    Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    /// Reads the header and checks it matches `expected` exactly.
    void expect_header(const std::vector<std::string>& expected) {
        std::vector<std::string> header;
        if (!next(header)) throw ParseError(source_, 0, "empty file");
        if (header != expected) {
            std::string want;
            for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
            throw ParseError(source_, line_, "expected header '" + want + "'");
        }
    }

    /// Next non-blank record; false at end of input.
    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (trim(line).empty()) continue;
            fields = split(line);
            return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return line_; }
    const std::string& source() const noexcept { return source_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_, what); }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return in;
}

/// Fixed 10-significant-digit formatting used for every float written to disk.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace csv
}  // namespace ssdopt
