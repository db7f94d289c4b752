#include "report.hpp"

#include "polyagg/errors.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace polyagg::cli {

namespace {

std::string number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quoted(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv(const std::string& line, int line_no)
{
    std::vector<std::string> fields(1);
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    if (in_quotes) throw ParseError("unterminated quote", line_no);
    return fields;
}

template <class T>
T parse_field(const std::string& s, int line_no)
{
    T value{};
    if constexpr (std::is_floating_point_v<T>) {
        char* end = nullptr;
        value = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0') throw ParseError("bad number '" + s + "'", line_no);
    } else {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ParseError("bad integer '" + s + "'", line_no);
        }
    }
    return value;
}

}  // namespace

const std::vector<std::string>& report_columns()
{
    static const std::vector<std::string> columns{
        "mesh",  "k",           "lambda",        "dofs",         "cells", "err_l2",   "err_h1", "nnz",
        "cond",  "max_pi_nabla", "max_pi_0",     "energy_before", "energy_after", "h", "wall_time"};
    return columns;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows)
{
    const auto& cols = report_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const ReportRow& r : rows) {
        out << quoted(r.mesh) << ',' << r.k << ',' << number(r.lambda) << ',' << r.dofs << ',' << r.cells
            << ',' << number(r.err_l2) << ',' << number(r.err_h1) << ',' << r.nnz << ',' << number(r.cond)
            << ',' << number(r.max_pi_nabla) << ',' << number(r.max_pi_0) << ',' << r.energy_before << ','
            << r.energy_after << ',' << number(r.h) << ',' << number(r.wall_time) << '\n';
    }
}

std::vector<ReportRow> read_report_csv(std::istream& in)
{
    std::vector<ReportRow> rows;
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    ++line_no;
    if (split_csv(line, line_no) != report_columns()) throw ParseError("unexpected header", line_no);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line, line_no);
        if (f.size() != report_columns().size()) throw ParseError("wrong number of fields", line_no);
        ReportRow r;
        r.mesh = f[0];
        r.k = parse_field<int>(f[1], line_no);
        r.lambda = parse_field<double>(f[2], line_no);
        r.dofs = parse_field<int>(f[3], line_no);
        r.cells = parse_field<int>(f[4], line_no);
        r.err_l2 = parse_field<double>(f[5], line_no);
        r.err_h1 = parse_field<double>(f[6], line_no);
        r.nnz = parse_field<long>(f[7], line_no);
        r.cond = parse_field<double>(f[8], line_no);
        r.max_pi_nabla = parse_field<double>(f[9], line_no);
        r.max_pi_0 = parse_field<double>(f[10], line_no);
        r.energy_before = parse_field<long long>(f[11], line_no);
        r.energy_after = parse_field<long long>(f[12], line_no);
        r.h = parse_field<double>(f[13], line_no);
        r.wall_time = parse_field<double>(f[14], line_no);
        rows.push_back(r);
    }
    return rows;
}

void write_report_json(std::ostream& out, const std::vector<ReportRow>& rows)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ReportRow& r : rows) {
        arr.push_back({{"mesh", r.mesh},
                       {"k", r.k},
                       {"lambda", r.lambda},
                       {"dofs", r.dofs},
                       {"cells", r.cells},
                       {"err_l2", r.err_l2},
                       {"err_h1", r.err_h1},
                       {"nnz", r.nnz},
                       {"cond", r.cond},
                       {"max_pi_nabla", r.max_pi_nabla},
                       {"max_pi_0", r.max_pi_0},
                       {"energy_before", r.energy_before},
                       {"energy_after", r.energy_after},
                       {"h", r.h},
                       {"wall_time", r.wall_time}});
    }
    out << arr.dump(2) << '\n';
}

void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rates)
{
    out << "lambda,k,points,l2_vs_h,h1_vs_h,l2_vs_dofs,h1_vs_dofs\n";
    for (const RateRow& r : rates) {
        out << number(r.lambda) << ',' << r.k << ',' << r.points << ',' << number(r.l2_vs_h) << ','
            << number(r.h1_vs_h) << ',' << number(r.l2_vs_dofs) << ',' << number(r.h1_vs_dofs) << '\n';
    }
}

void write_rates_json(std::ostream& out, const std::vector<RateRow>& rates)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const RateRow& r : rates) {
        arr.push_back({{"lambda", r.lambda},
                       {"k", r.k},
                       {"points", r.points},
                       {"l2_vs_h", r.l2_vs_h},
                       {"h1_vs_h", r.h1_vs_h},
                       {"l2_vs_dofs", r.l2_vs_dofs},
                       {"h1_vs_dofs", r.h1_vs_dofs}});
    }
    out << arr.dump(2) << '\n';
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw InputError("slope needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) throw InputError("log-log slope needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (std::abs(den) <= 1e-14 * n * sxx) throw InputError("slope needs distinct abscissae");
    return (n * sxy - sx * sy) / den;
}

ExpectedErrors expected_errors(const ReportRow& reference, int dofs)
{
    // h ~ DOFs^(-1/2) on planar meshes.
    const double ratio = static_cast<double>(reference.dofs) / dofs;
    return {reference.err_l2 * std::pow(ratio, 0.5 * (reference.k + 1)),
            reference.err_h1 * std::pow(ratio, 0.5 * reference.k)};
}

}  // namespace polyagg::cli
