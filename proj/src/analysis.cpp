#include "ufem/analysis.hpp"

#include "ufem/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace ufem {

namespace {

/// Gradient (and value) of the discrete solution at x in cell c.
double solution_on_cell(const EnrichmentSpace& space, const Eigen::VectorXd& U, int c, Point2 x, Side side,
                        const ReferenceBasis& lag, CellValues& enr, Vec2* grad)
{
    const QuadMesh& mesh = space.mesh();
    const Point2 st = mesh.to_reference(c, x);
    std::vector<double> vals;
    std::vector<Vec2> grads;
    lag.eval_all(st.x, st.y, vals, &grads);
    const auto nodes = mesh.cell_nodes(c);
    double v = 0.0;
    Vec2 g{0.0, 0.0};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        v += U[nodes[k]] * vals[k];
        g = g + grads[k] * (U[nodes[k]] * mesh.n());
    }
    space.eval_cell(c, x, side, enr);
    const int n_fem = mesh.num_nodes();
    for (std::size_t k = 0; k < enr.dofs.size(); ++k) {
        const double u = U[n_fem + enr.dofs[k]];
        v += u * enr.values[k];
        g = g + enr.grads[k] * u;
    }
    if (grad) *grad = g;
    return v;
}

}  // namespace

double eval_solution(const EnrichmentSpace& space, const Eigen::VectorXd& U, Point2 x, Vec2* grad)
{
    const ReferenceBasis lag(BasisKind::Lagrange, space.mesh().degree());
    CellValues enr;
    return solution_on_cell(space, U, locate_cell(space.mesh(), x), x, space.geometry().classify(x), lag, enr,
                            grad);
}

double energy_error(const EnrichmentSpace& space, const Eigen::VectorXd& U, const ManufacturedProblem& prob,
                    const QuadratureConfig& quad)
{
    const QuadMesh& mesh = space.mesh();
    const ReferenceBasis lag(BasisKind::Lagrange, mesh.degree());
    CellValues enr;
    double total = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const bool enriched = !space.active_blocks(c).empty();
        for (const auto& rule : cell_rule(mesh, space.classification(), space.geometry(), c, mesh.degree(),
                                          quad.bump + 2, enriched)) {
            const double kappa = prob.kappa(rule.side);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                Vec2 gh;
                solution_on_cell(space, U, c, rule.points[q], rule.side, lag, enr, &gh);
                const Vec2 e = prob.grad_u(rule.points[q], rule.side) - gh;
                total += rule.weights[q] * kappa * e.dot(e);
            }
        }
    }
    return std::sqrt(total);
}

CaseResult run_case(const ManufacturedProblem& prob, int p, int N, const RunOptions& opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    CaseResult out;
    auto& rec = out.record;
    rec.scheme = scheme_name(opt.scheme.kind);
    rec.p = p;
    rec.N = N;
    rec.kappa0 = prob.kappa0;
    rec.kappa1 = prob.kappa1;
    rec.geom = prob.geometry.tag();
    try {
        const QuadMesh mesh(N, p);
        const auto cls = classify_cells(mesh, prob.geometry);
        const EnrichmentSpace space(mesh, cls, prob.geometry, opt.scheme);
        const BlockLinearSystem sys = assemble(space, prob, opt.quad);
        rec.n_fem = sys.n_fem;
        rec.dropped = space.dropped();

        BlockLinearSystem work;
        SparseMatrix T;
        const bool condense = opt.condense && opt.scheme.kind == SchemeKind::SGFEM;
        if (condense) {
            int d = 0;
            T = lpca_transform(sys, space, opt.scheme.lpca_xi, &d);
            work = transform_enrichment(sys, T);
            rec.dropped += d;
        } else {
            work = sys;
        }
        rec.n_enr = work.n_enr;

        if (opt.solve && prob.has_exact) {
            const Eigen::VectorXd Uw = solve_zero_mean(work);
            out.U.resize(sys.size());
            out.U.head(sys.n_fem) = Uw.head(sys.n_fem);
            if (condense) {
                out.U.tail(sys.n_enr) = T * Uw.tail(work.n_enr);
            } else {
                out.U.tail(sys.n_enr) = Uw.tail(work.n_enr);
            }
            rec.energy_error = energy_error(space, out.U, prob, opt.quad);
        }
        if (opt.compute_scn || !opt.dump_matrix_path.empty()) {
            const ScaledSystem sc = jacobi_scale(work);
            if (!opt.dump_matrix_path.empty()) {
                std::ofstream os(opt.dump_matrix_path);
                if (!os) throw std::runtime_error("cannot open " + opt.dump_matrix_path);
                dump_matrix(sc.K, os);
            }
            if (opt.compute_scn) {
                out.scn = scaled_condition_number(sc.K, scaled_constant_kernel(work, sc.D), opt.scn);
                rec.scn = out.scn.scn;
                if (!out.scn.converged) rec.message = "scn estimate not converged";
            }
        }
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.message = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog_slope: need two or more points");
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double convergence_slope(const std::vector<int>& Ns, const std::vector<double>& errors)
{
    if (Ns.size() != errors.size() || Ns.size() < 2) throw std::invalid_argument("convergence_slope: size mismatch");
    const std::size_t first = Ns.size() > 3 ? Ns.size() - 3 : 0;
    std::vector<double> x, y;
    for (std::size_t i = first; i < Ns.size(); ++i) {
        x.push_back(1.0 / Ns[i]);
        y.push_back(errors[i]);
    }
    return fit_loglog_slope(x, y);
}

std::vector<double> pairwise_rates(const std::vector<int>& Ns, const std::vector<double>& errors)
{
    std::vector<double> out;
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        out.push_back(std::log(errors[i - 1] / errors[i]) / std::log(static_cast<double>(Ns[i]) / Ns[i - 1]));
    }
    return out;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& task)
{
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) task(i);
        });
    }
    for (auto& th : pool) th.join();
}

ConvergenceResult convergence_study(const ManufacturedProblem& prob, int p, const std::vector<int>& Ns,
                                    const RunOptions& opt, int jobs)
{
    if (Ns.size() < 3) throw std::invalid_argument("convergence_study: need at least three mesh sizes");
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        if (Ns[i] <= Ns[i - 1]) throw std::invalid_argument("convergence_study: N list must be strictly increasing");
    }
    ConvergenceResult res;
    res.records.resize(Ns.size());
    parallel_for(static_cast<int>(Ns.size()), jobs, [&](int i) {
        res.records[static_cast<std::size_t>(i)] = run_case(prob, p, Ns[static_cast<std::size_t>(i)], opt).record;
    });

    std::vector<int> n_ok, n_scn;
    std::vector<double> err, scn;
    for (const auto& r : res.records) {
        if (r.ok && std::isfinite(r.energy_error) && r.energy_error > 0.0) {
            n_ok.push_back(r.N);
            err.push_back(r.energy_error);
        }
        if (r.ok && std::isfinite(r.scn)) {
            n_scn.push_back(r.N);
            scn.push_back(r.scn);
        }
    }
    if (n_ok.size() >= 2) {
        res.slope = convergence_slope(n_ok, err);
        res.rates = pairwise_rates(n_ok, err);
    }
    if (n_scn.size() >= 2) res.scn_slope = -convergence_slope(n_scn, scn);
    return res;
}

std::vector<ExperimentRecord> robustness_sweep(const std::vector<SchemeKind>& schemes, int p, int N, int i_lo,
                                               int i_hi, const RunOptions& base, int jobs)
{
    if (i_hi < i_lo) throw std::invalid_argument("robustness_sweep: empty index range");
    const int per = i_hi - i_lo + 1;
    std::vector<ExperimentRecord> out(schemes.size() * static_cast<std::size_t>(per));
    parallel_for(static_cast<int>(out.size()), jobs, [&](int t) {
        const SchemeKind kind = schemes[static_cast<std::size_t>(t / per)];
        const int i = i_lo + t % per;
        const double delta = robustness_delta(i);
        RunOptions opt = base;
        opt.scheme.kind = kind;
        opt.solve = false;
        opt.compute_scn = true;
        ExperimentRecord rec;
        try {
            rec = run_case(robustness_config(delta), p, N, opt).record;
        } catch (const std::exception& e) {
            rec.scheme = scheme_name(kind);
            rec.p = p;
            rec.N = N;
            rec.ok = false;
            rec.message = e.what();
        }
        rec.delta = delta;
        out[static_cast<std::size_t>(t)] = rec;
    });
    return out;
}

void sort_records(std::vector<ExperimentRecord>& records)
{
    auto key = [](const ExperimentRecord& r) {
        return std::make_tuple(r.scheme, r.p, r.geom, r.kappa0, r.kappa1, std::isnan(r.delta) ? -1.0 : -r.delta, r.N);
    };
    std::stable_sort(records.begin(), records.end(),
                     [&](const ExperimentRecord& a, const ExperimentRecord& b) { return key(a) < key(b); });
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header()
{
    return "scheme,p,N,kappa0,kappa1,geom,delta,energy_error,scn,n_fem,n_enr,dropped,seconds";
}

std::string csv_row(const ExperimentRecord& r)
{
    std::ostringstream os;
    os << r.scheme << ',' << r.p << ',' << r.N << ',' << format_double(r.kappa0) << ',' << format_double(r.kappa1)
       << ',' << r.geom << ',' << format_double(r.delta) << ',' << format_double(r.energy_error) << ','
       << format_double(r.scn) << ',' << r.n_fem << ',' << r.n_enr << ',' << r.dropped << ','
       << format_double(r.seconds);
    return os.str();
}

void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records)
{
    os << csv_header() << '\n';
    for (const auto& r : records) os << csv_row(r) << '\n';
}

}  // namespace ufem
