// End-to-end acceptance checks.  Every threshold below is fixed; the binary
// prints one PASS/FAIL line per criterion and exits nonzero if any fails.

#include "ufem/analysis.hpp"
#include "ufem/lemma_oracle.hpp"
#include "ufem/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace ufem;

namespace {

// criterion 1
constexpr double kRateTolerance = 0.35;
// criterion 2
constexpr double kFemRateLo = 0.3, kFemRateHi = 0.8;
// criterion 3
constexpr double kScnSlopeLo = 1.5, kScnSlopeHi = 2.5;
// criterion 4
constexpr int kRobustN = 40, kRobustP = 3, kRobustILo = 1, kRobustIHi = 15, kRobustIMaxFem = 8;
constexpr double kGfemOverHo = 1e3, kHoOverFem = 1e2;
// criterion 5
constexpr double kPuTolerance = 1e-12;
// criterion 6
constexpr double kLemmaFlat = 1e-8, kLemmaCircle = 1e-4;
constexpr int kLemmaPMax = 4;
// criterion 7
constexpr double kPatchTolerance = 1e-8;
// criterion 8
constexpr double kLpcaReproduction = 1e-10, kLpcaXi = 1e-15;
// criterion 9
constexpr double kAreaTolerance = 1e-12, kLengthTolerance = 1e-10;
// criterion 10
constexpr double kNodeTolerance = 1e-12, kGramTolerance = 1e-8, kSpanTolerance = 1e-8;
constexpr std::size_t kCellsPerConfig = 20;
constexpr int kGramCheckBump = 12;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string num(double v, int digits = 4)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

int jobs() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

RunOptions options(SchemeKind kind)
{
    RunOptions opt;
    opt.scheme.kind = kind;
    return opt;
}

std::vector<ManufacturedProblem> problems() { return {line_problem(1.0, 10.0), circle_problem(1.0, 20.0)}; }

bool all_ok(const std::vector<ExperimentRecord>& recs)
{
    return std::all_of(recs.begin(), recs.end(), [](const ExperimentRecord& r) { return r.ok; });
}

Outcome optimal_convergence()
{
    Outcome out;
    for (const auto& prob : problems()) {
        for (int p = 2; p <= 5; ++p) {
            const std::vector<int> Ns = p <= 3 ? std::vector<int>{10, 20, 40} : std::vector<int>{5, 10, 20};
            const auto res = convergence_study(prob, p, Ns, options(SchemeKind::HoSGFEM), jobs());
            out.require(all_ok(res.records) && std::abs(res.slope - p) <= kRateTolerance,
                        prob.name + " p=" + std::to_string(p) + " slope " + num(res.slope));
        }
    }
    return out;
}

Outcome fem_suboptimal()
{
    Outcome out;
    for (const auto& prob : problems()) {
        for (int p : {1, 3}) {
            const auto res = convergence_study(prob, p, {10, 20, 40}, options(SchemeKind::FEM), jobs());
            out.require(all_ok(res.records) && res.slope >= kFemRateLo && res.slope <= kFemRateHi,
                        prob.name + " p=" + std::to_string(p) + " slope " + num(res.slope));
        }
    }
    return out;
}

Outcome scn_growth()
{
    Outcome out;
    const std::vector<int> Ns{5, 10, 20, 40};
    for (const auto& prob : problems()) {
        for (SchemeKind kind : {SchemeKind::HoSGFEM, SchemeKind::FEM}) {
            for (int p : {2, 3}) {
                auto opt = options(kind);
                opt.solve = false;
                opt.compute_scn = true;
                const auto res = convergence_study(prob, p, Ns, opt, jobs());
                std::vector<double> x, y;
                for (const auto& r : res.records) {
                    x.push_back(r.N);
                    y.push_back(r.scn);
                }
                const double slope = fit_loglog_slope(x, y);
                out.require(all_ok(res.records) && slope >= kScnSlopeLo && slope <= kScnSlopeHi,
                            scheme_name(kind) + " " + prob.name + " p=" + std::to_string(p) + " " + num(slope));
            }
        }
    }
    return out;
}

Outcome conditioning_ordering()
{
    Outcome out;
    RunOptions base;
    base.solve = false;
    base.compute_scn = true;
    const std::vector<SchemeKind> kinds{SchemeKind::FEM, SchemeKind::GFEM, SchemeKind::HoSGFEM};
    const auto recs = robustness_sweep(kinds, kRobustP, kRobustN, kRobustILo, kRobustIHi, base, jobs());
    const int per = kRobustIHi - kRobustILo + 1;
    auto scn = [&](int k, int i) { return recs[static_cast<std::size_t>(k * per + i - kRobustILo)].scn; };
    out.require(all_ok(recs), "all sweep points computed");

    int separated = 0;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int i = kRobustILo; i <= kRobustIHi; ++i) {
        const double ratio = scn(1, i) / scn(2, i);
        worst_ratio = std::min(worst_ratio, ratio);
        if (ratio >= kGfemOverHo) ++separated;
    }
    out.require(2 * separated >= per, "SCN(GFEM) >= 1e3 SCN(HoSGFEM) at " + std::to_string(separated) + "/" +
                                          std::to_string(per) + " points (min ratio " + num(worst_ratio) + ")");

    double worst_fem = 0.0;
    for (int i = kRobustILo; i <= kRobustIMaxFem; ++i) worst_fem = std::max(worst_fem, scn(2, i) / scn(0, i));
    out.require(worst_fem <= kHoOverFem, "max SCN(HoSGFEM)/SCN(FEM) for i<=8 " + num(worst_fem));
    return out;
}

Outcome partition_of_unity()
{
    Outcome out;
    double worst = 0.0;
    for (const auto& g : {InterfaceGeometry::standard_line(), InterfaceGeometry::standard_circle()}) {
        for (int n : {5, 10, 20}) {
            for (int p = 1; p <= 5; ++p) {
                const QuadMesh mesh(n, p);
                const auto cls = classify_cells(mesh, g);
                worst = std::max(worst, pu_defect(mesh, cls, g, build_pu(mesh, cls, p)));
            }
        }
    }
    out.require(worst <= kPuTolerance, "max |sum phi - 1| " + num(worst));
    return out;
}

Outcome lemma_recursion()
{
    Outcome out;
    double flat = 0.0, circle = 0.0;
    for (const auto& row : lemma::verify_lemma(kLemmaPMax)) {
        (row.name == "flat" ? flat : circle) = std::max(row.name == "flat" ? flat : circle, row.residual);
    }
    out.require(flat <= kLemmaFlat, "flat " + num(flat));
    out.require(circle <= kLemmaCircle, "circle " + num(circle));
    return out;
}

Outcome patch_test()
{
    Outcome out;
    double worst = 0.0;
    bool ok = true;
    const auto prob = patch_problem();
    for (SchemeKind kind : {SchemeKind::FEM, SchemeKind::GFEM, SchemeKind::CGFEM, SchemeKind::SGFEM,
                            SchemeKind::HoSGFEM}) {
        for (int p = 1; p <= 3; ++p) {
            const auto r = run_case(prob, p, 5, options(kind)).record;
            ok = ok && r.ok;
            worst = std::max(worst, r.ok ? r.energy_error : std::numeric_limits<double>::infinity());
        }
    }
    out.require(ok && worst <= kPatchTolerance, "max energy error " + num(worst));
    return out;
}

Outcome lpca_behavior()
{
    Outcome out;
    const auto prob = line_problem(1.0, 10.0);
    auto plain = options(SchemeKind::SGFEM);
    plain.condense = false;
    auto none = options(SchemeKind::SGFEM);
    none.scheme.lpca_xi = 0.0;
    const auto a = run_case(prob, 3, 20, plain);
    const auto b = run_case(prob, 3, 20, none);
    const bool solved = a.record.ok && b.record.ok && a.U.size() == b.U.size();
    const double diff = solved ? (a.U - b.U).cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity();
    out.require(diff <= kLpcaReproduction, "xi=0 max coefficient difference " + num(diff));

    auto sg = options(SchemeKind::SGFEM);
    sg.scheme.lpca_xi = kLpcaXi;
    sg.solve = false;
    sg.compute_scn = true;
    auto gf = options(SchemeKind::GFEM);
    gf.solve = false;
    gf.compute_scn = true;
    const auto rs = run_case(prob, 3, 20, sg).record;
    const auto rg = run_case(prob, 3, 20, gf).record;
    out.require(rs.ok && rg.ok && rs.scn < rg.scn, "SCN sgfem " + num(rs.scn) + " < gfem " + num(rg.scn));
    return out;
}

Outcome quadrature_oracles()
{
    Outcome out;
    double worst_area = 0.0, worst_length = 0.0;
    std::vector<InterfaceGeometry> geoms{InterfaceGeometry::standard_line(), InterfaceGeometry::standard_circle()};
    for (int i : {1, 8, 15}) geoms.push_back(InterfaceGeometry::hline(robustness_delta(i)));
    for (const auto& g : geoms) {
        for (int n : {5, 10, 20, 40}) {
            for (int p : {1, 3, 5}) {
                const QuadMesh mesh(n, p);
                const auto cls = classify_cells(mesh, g);
                double area = 0.0;
                for (int c = 0; c < mesh.num_cells(); ++c) {
                    for (const auto& r : cell_rule(mesh, cls, g, c, p, 0, true)) area += r.measure();
                }
                worst_area = std::max(worst_area, std::abs(area - 1.0));
            }
        }
    }
    const auto circle = InterfaceGeometry::standard_circle();
    const double exact = 2.0 * std::numbers::pi / std::sqrt(10.0);
    for (int n : {5, 10, 20, 40}) {
        const QuadMesh mesh(n, 1);
        const auto cls = classify_cells(mesh, circle);
        double length = 0.0;
        for (int c : cls.cut_cells) length += interface_rule(circle, *cls.topology[static_cast<std::size_t>(c)], 10).measure();
        worst_length = std::max(worst_length, std::abs(length - exact));
    }
    out.require(worst_area <= kAreaTolerance, "area defect " + num(worst_area));
    out.require(worst_length <= kLengthTolerance, "circle length defect " + num(worst_length));
    return out;
}

std::vector<int> pick(std::size_t count, std::size_t from, std::uint64_t seed)
{
    std::vector<int> all(from);
    for (std::size_t k = 0; k < from; ++k) all[k] = static_cast<int>(k);
    std::mt19937_64 rng(seed);
    std::shuffle(all.begin(), all.end(), rng);
    if (all.size() > count) all.resize(count);
    return all;
}

Outcome enrichment_invariants()
{
    Outcome out;
    double node = 0.0, gram = 0.0, span = 0.0;
    std::vector<double> rv;
    std::uint64_t seed = 1;
    for (const auto& g : {InterfaceGeometry::standard_line(), InterfaceGeometry::standard_circle()}) {
        for (int n : {5, 10, 20}) {
            for (int p = 1; p <= 5; ++p) {
                const QuadMesh mesh(n, p);
                const auto cls = classify_cells(mesh, g);
                for (SchemeKind kind : {SchemeKind::SGFEM, SchemeKind::HoSGFEM}) {
                    Scheme s;
                    s.kind = kind;
                    s.orthogonalize = kind == SchemeKind::HoSGFEM ? Orthogonalize::On : Orthogonalize::Off;
                    const EnrichmentSpace sp(mesh, cls, g, s);
                    for (int b : pick(kCellsPerConfig, sp.blocks().size(), seed++)) {
                        const auto& blk = sp.blocks()[static_cast<std::size_t>(b)];
                        // raw functions at every node of the support
                        for (int c : blk.support) {
                            for (int id : mesh.cell_nodes(c)) {
                                const Point2 x = mesh.node(id);
                                sp.eval_raw(b, c, x, g.classify(x), rv);
                                for (double v : rv) node = std::max(node, std::abs(v));
                            }
                        }
                        if (kind != SchemeKind::HoSGFEM) continue;
                        // Gram matrix and span on a finer rule than the one that built them
                        std::vector<std::vector<double>> rows;
                        std::vector<double> w;
                        for (int c : blk.support) {
                            for (const auto& r : cell_rule(mesh, cls, g, c, p, kGramCheckBump, true)) {
                                for (std::size_t q = 0; q < r.size(); ++q) {
                                    sp.eval_raw(b, c, r.points[q], r.side, rv);
                                    rows.push_back(rv);
                                    w.push_back(r.weights[q]);
                                }
                            }
                        }
                        Eigen::MatrixXd V(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(blk.raw.size()));
                        for (std::size_t q = 0; q < rows.size(); ++q) {
                            for (std::size_t k = 0; k < rows[q].size(); ++k) {
                                V(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(k)) = rows[q][k];
                            }
                        }
                        const Eigen::Map<const Eigen::VectorXd> W(w.data(), static_cast<Eigen::Index>(w.size()));
                        const Eigen::MatrixXd Q = V * blk.combo;
                        const Eigen::MatrixXd G = Q.transpose() * W.asDiagonal() * Q;
                        gram = std::max(gram, (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());
                        for (Eigen::Index r = 0; r < V.cols(); ++r) {
                            const Eigen::VectorXd f = V.col(r);
                            const double nf = std::sqrt(f.dot(W.asDiagonal() * f));
                            if (nf == 0.0) continue;
                            const Eigen::VectorXd e = f - Q * (Q.transpose() * (W.asDiagonal() * f));
                            span = std::max(span, std::sqrt(e.dot(W.asDiagonal() * e)) / nf);
                        }
                    }
                }
            }
        }
    }
    out.require(node <= kNodeTolerance, "max nodal value " + num(node));
    out.require(gram <= kGramTolerance, "max |G - I| " + num(gram));
    out.require(span <= kSpanTolerance, "max span residual " + num(span));
    return out;
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "HoSGFEM energy-error slopes within 0.35 of p", optimal_convergence},
        {2, "FEM energy-error slopes in [0.3, 0.8]", fem_suboptimal},
        {3, "SCN slopes against N in [1.5, 2.5]", scn_growth},
        {4, "conditioning ordering over the offset sweep", conditioning_ordering},
        {5, "partition of unity within 1e-12", partition_of_unity},
        {6, "interface factorization recursion residuals", lemma_recursion},
        {7, "patch test energy error within 1e-8", patch_test},
        {8, "LPCA reproduction and conditioning", lpca_behavior},
        {9, "global area and circle length", quadrature_oracles},
        {10, "node vanishing and Gram-Schmidt invariants", enrichment_invariants},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("%s criterion %d: %s (%.1f s)\n    %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
