#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polyagg::cli {

/// One run: a mesh, an agglomeration strength and a VEM order.
struct ReportRow {
    std::string mesh;
    int k = 1;
    double lambda = 0.0;
    int dofs = 0;
    int cells = 0;
    double err_l2 = 0.0;
    double err_h1 = 0.0;
    long nnz = 0;
    double cond = 0.0;  // 0 when not estimated
    double max_pi_nabla = 0.0;
    double max_pi_0 = 0.0;
    long long energy_before = 0;
    long long energy_after = 0;
    double h = 0.0;  // maximum cell diameter
    double wall_time = 0.0;  // seconds
};

const std::vector<std::string>& report_columns();

/// Doubles are written with 17 significant digits so that reading back is exact.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_report_csv(std::istream& in);
void write_report_json(std::ostream& out, const std::vector<ReportRow>& rows);

/// Least-squares slopes of log(error) against log(h) and log(DOFs) for one (lambda, k) series.
struct RateRow {
    double lambda = 0.0;
    int k = 1;
    int points = 0;
    double l2_vs_h = 0.0;
    double h1_vs_h = 0.0;
    double l2_vs_dofs = 0.0;
    double h1_vs_dofs = 0.0;
};

void write_rates_csv(std::ostream& out, const std::vector<RateRow>& rates);
void write_rates_json(std::ostream& out, const std::vector<RateRow>& rates);

/// Slope of the least-squares line through (log x, log y). Needs two distinct x values.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Errors of the reference run rescaled to another DOF count, assuming optimal rates
/// (k for H1, k + 1 for L2) and h proportional to DOFs^(-1/2).
struct ExpectedErrors {
    double l2 = 0.0;
    double h1 = 0.0;
};
ExpectedErrors expected_errors(const ReportRow& reference, int dofs);

}  // namespace polyagg::cli
