#pragma once

#include "ufem/assembly.hpp"
#include "ufem/enrichment.hpp"
#include "ufem/problems.hpp"
#include "ufem/solver.hpp"

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ufem {

struct ExperimentRecord {
    std::string scheme;
    int p = 0;
    int N = 0;
    double kappa0 = 1.0;
    double kappa1 = 1.0;
    std::string geom;
    double delta = std::numeric_limits<double>::quiet_NaN();
    double energy_error = std::numeric_limits<double>::quiet_NaN();
    double scn = std::numeric_limits<double>::quiet_NaN();
    int n_fem = 0;
    int n_enr = 0;
    int dropped = 0;
    double seconds = 0.0;
    bool ok = true;
    std::string message;  // failure reason or SCN warning
};

struct RunOptions {
    Scheme scheme;
    QuadratureConfig quad;
    bool solve = true;
    bool compute_scn = false;
    /// SGFEM only: condense the enrichment by LPCA before solving.
    bool condense = true;
    SCNOptions scn;
    /// Coordinate dump of the scaled stiffness matrix when nonempty.
    std::string dump_matrix_path;
};

struct CaseResult {
    ExperimentRecord record;
    /// Coefficients in the uncondensed basis (FEM nodes, then enrichment DOFs).
    Eigen::VectorXd U;
    SCNResult scn;
};

/// Build, assemble, condense (SGFEM), solve and measure one configuration.
CaseResult run_case(const ManufacturedProblem& prob, int p, int N, const RunOptions& opt);

/// Discrete solution and optionally its gradient at x.
double eval_solution(const EnrichmentSpace& space, const Eigen::VectorXd& U, Point2 x, Vec2* grad = nullptr);

/// sqrt of the sum over cells and sides of the integral of kappa |grad(u - u_h)|^2.
double energy_error(const EnrichmentSpace& space, const Eigen::VectorXd& U, const ManufacturedProblem& prob,
                    const QuadratureConfig& quad = {});

/// Least-squares slope of log y against log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Convergence slope of errors vs 1/N over the last three entries.
double convergence_slope(const std::vector<int>& Ns, const std::vector<double>& errors);
std::vector<double> pairwise_rates(const std::vector<int>& Ns, const std::vector<double>& errors);

struct ConvergenceResult {
    std::vector<ExperimentRecord> records;
    double slope = std::numeric_limits<double>::quiet_NaN();
    /// Slope of log SCN against log N over the last three entries.
    double scn_slope = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> rates;
};

/// Runs in a pool of `jobs` threads; records come back sorted by N.
ConvergenceResult convergence_study(const ManufacturedProblem& prob, int p, const std::vector<int>& Ns,
                                    const RunOptions& opt, int jobs = 1);

/// SCN for every (scheme, i) with delta_i = 0.03 * 2^-i on the horizontal line.
std::vector<ExperimentRecord> robustness_sweep(const std::vector<SchemeKind>& schemes, int p, int N, int i_lo,
                                               int i_hi, const RunOptions& base, int jobs = 1);

/// Runs `count` independent tasks on up to `jobs` threads.
void parallel_for(int count, int jobs, const std::function<void(int)>& task);

/// Sort key order: scheme, p, geom, kappa, delta, N.
void sort_records(std::vector<ExperimentRecord>& records);

std::string csv_header();
std::string csv_row(const ExperimentRecord& r);
void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
/// "%.17g" formatting; NaN prints as "nan".
std::string format_double(double v);

}  // namespace ufem
