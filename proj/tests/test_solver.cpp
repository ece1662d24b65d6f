#include "ufem/analysis.hpp"
#include "ufem/solver.hpp"

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

using namespace ufem;

namespace {

Scheme scheme_of(SchemeKind kind)
{
    Scheme s;
    s.kind = kind;
    return s;
}

struct Built {
    QuadMesh mesh;
    CellClassification cls;
    EnrichmentSpace space;
    BlockLinearSystem sys;

    Built(const ManufacturedProblem& prob, SchemeKind kind, int n, int p)
        : mesh(n, p),
          cls(classify_cells(mesh, prob.geometry)),
          space(build_enrichment_space(mesh, cls, prob.geometry, scheme_of(kind), p)),
          sys(assemble(space, prob))
    {
    }
};

SparseMatrix sparse(const Eigen::MatrixXd& A) { return A.sparseView(0.0, 0.0); }

SCNResult scn_by(const BlockLinearSystem& sys, bool dense)
{
    const auto sc = jacobi_scale(sys);
    SCNOptions opt;
    opt.dense_limit = dense ? 1 << 20 : 0;
    opt.dense_fallback_limit = dense ? 1 << 20 : 0;
    return scaled_condition_number(sc.K, scaled_constant_kernel(sys, sc.D), opt);
}

}  // namespace

TEST_CASE("zero data gives the zero solution")
{
    const Built b(robustness_config(robustness_delta(2)), SchemeKind::FEM, 2, 1);
    const Eigen::VectorXd U = solve_zero_mean(b.sys);
    CHECK(U.size() == 9);
    CHECK(U.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("patch solution is exact, mean-free and reproducible")
{
    const auto prob = patch_problem();
    for (SchemeKind kind : {SchemeKind::FEM, SchemeKind::GFEM, SchemeKind::CGFEM, SchemeKind::SGFEM,
                            SchemeKind::HoSGFEM}) {
        for (int p = 1; p <= 3; ++p) {
            const Built b(prob, kind, 5, p);
            const Eigen::VectorXd U = solve_zero_mean(b.sys);
            CAPTURE(scheme_name(kind));
            CAPTURE(p);
            const double fscale = b.sys.F.cwiseAbs().maxCoeff();
            CHECK((b.sys.K * U - b.sys.F).cwiseAbs().maxCoeff() <= 1e-10 * fscale);
            CHECK(std::abs(b.sys.mean.dot(U)) <= 1e-10);
            if (kind == SchemeKind::FEM || kind == SchemeKind::HoSGFEM) {
                // the enrichment vanishes at the nodes, so U carries the nodal values
                for (int g = 0; g < b.sys.n_fem; ++g) CHECK(std::abs(U[g] - prob.u(b.mesh.node(g), Side::Omega0)) <= 1e-9);
            }
            const Eigen::VectorXd again = solve_zero_mean(b.sys);
            CHECK((again - U).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("adding a constant to the exact solution leaves U unchanged")
{
    const auto prob = circle_problem(1.0, 20.0);
    auto shifted = prob;
    shifted.u = [u = prob.u](Point2 x, Side s) { return u(x, s) + 5.0; };
    shifted.mean = prob.mean + 5.0;
    const Built a(prob, SchemeKind::HoSGFEM, 10, 2);
    const Built b(shifted, SchemeKind::HoSGFEM, 10, 2);
    CHECK((a.sys.F - b.sys.F).cwiseAbs().maxCoeff() == 0.0);
    CHECK((solve_zero_mean(a.sys) - solve_zero_mean(b.sys)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a second kernel direction")
{
    // two disconnected pure-Neumann pairs: the mean constraint removes only one constant
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(4, 4);
    K.block(0, 0, 2, 2) << 1, -1, -1, 1;
    K.block(2, 2, 2, 2) << 1, -1, -1, 1;
    BlockLinearSystem sys;
    sys.K = sparse(K);
    sys.mean = Eigen::Vector4d(1, 1, 1, 1);
    sys.n_fem = 4;

    // consistent data: some solution is returned
    sys.F = Eigen::Vector4d(1, -1, 0, 0);
    const Eigen::VectorXd U = solve_zero_mean(sys);
    CHECK((K * U - sys.F).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(U.sum()) <= 1e-10);

    // the second pair carries net load, which no multiplier can balance
    sys.F = Eigen::Vector4d(1, -1, 1, 1);
    CHECK_THROWS_AS(solve_zero_mean(sys), SingularSystem);
}

TEST_CASE("scaled condition number of small matrices")
{
    const SparseMatrix I = sparse(Eigen::MatrixXd::Identity(50, 50));
    for (int limit : {0, 1000}) {
        SCNOptions opt;
        opt.dense_limit = limit;
        const auto r = scaled_condition_number(I, {}, opt);
        CHECK(r.converged);
        CHECK(r.scn == doctest::Approx(1.0).epsilon(1e-10));
    }

    const double c = std::cos(0.3), s = std::sin(0.3);
    Eigen::Matrix2d Q;
    Q << c, -s, s, c;
    const Eigen::Matrix2d A = Q * Eigen::Vector2d(1.0, 100.0).asDiagonal() * Q.transpose();
    const auto r = scaled_condition_number(sparse(A));
    CHECK(r.scn == doctest::Approx(100.0).epsilon(1e-10));
    CHECK(r.lambda_max == doctest::Approx(100.0).epsilon(1e-10));

    // the known kernel is excluded
    Eigen::Matrix3d L;
    L << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    const Eigen::VectorXd one = Eigen::Vector3d::Ones().normalized();
    const auto rl = scaled_condition_number(sparse(L), one);
    CHECK(rl.scn == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("FEM condition numbers grow like N^2")
{
    std::vector<double> ns, scn;
    const auto prob = line_problem(1.0, 20.0);
    for (int n : {5, 10, 20, 40}) {
        const Built b(prob, SchemeKind::FEM, n, 1);
        const auto dense = scn_by(b.sys, true);
        const auto iter = scn_by(b.sys, false);
        CAPTURE(n);
        CHECK(dense.method == "dense");
        CHECK(iter.method == "lanczos");
        CHECK(iter.converged);
        CHECK(std::abs(iter.scn - dense.scn) <= 0.01 * dense.scn);
        ns.push_back(n);
        scn.push_back(dense.scn);
    }
    CHECK(std::abs(fit_loglog_slope(ns, scn) - 2.0) <= 0.2);
}

TEST_CASE("iterative and dense condition numbers agree on enriched systems")
{
    for (const auto& prob : {line_problem(1.0, 20.0), circle_problem(1.0, 20.0)}) {
        for (SchemeKind kind : {SchemeKind::SGFEM, SchemeKind::HoSGFEM}) {
            const Built b(prob, kind, 10, 3);
            const auto dense = scn_by(b.sys, true);
            const auto iter = scn_by(b.sys, false);
            CAPTURE(prob.name);
            CAPTURE(scheme_name(kind));
            CHECK(iter.converged);
            CHECK(std::abs(iter.scn - dense.scn) <= 0.02 * dense.scn);
        }
    }
}
