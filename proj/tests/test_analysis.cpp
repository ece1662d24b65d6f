#include "ufem/analysis.hpp"

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

using namespace ufem;

namespace {

RunOptions options(SchemeKind kind)
{
    RunOptions opt;
    opt.scheme.kind = kind;
    return opt;
}

}  // namespace

TEST_CASE("slope fits")
{
    CHECK(convergence_slope({10, 20, 40}, {1e-1, 2.5e-2, 6.25e-3}) == doctest::Approx(2.0).epsilon(1e-14));
    const auto rates = pairwise_rates({10, 20, 40}, {1e-1, 2.5e-2, 6.25e-3});
    REQUIRE(rates.size() == 2);
    CHECK(rates[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rates[1] == doctest::Approx(2.0).epsilon(1e-14));

    // exact power laws, any exponent
    for (double k : {-1.5, 0.5, 3.0, 4.25}) {
        std::vector<double> x, y;
        for (double v : {3.0, 7.0, 11.0, 50.0}) {
            x.push_back(v);
            y.push_back(2.5 * std::pow(v, k));
        }
        CHECK(std::abs(fit_loglog_slope(x, y) - k) <= 1e-12);
    }
    // only the last three sizes enter the fit
    CHECK(convergence_slope({5, 10, 20, 40}, {1.0, 1e-1, 2.5e-2, 6.25e-3}) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("energy error of simple discrete functions")
{
    const auto prob = patch_problem();
    const QuadMesh mesh(5, 2);
    const auto cls = classify_cells(mesh, prob.geometry);
    Scheme s;
    s.kind = SchemeKind::FEM;
    const EnrichmentSpace space(mesh, cls, prob.geometry, s);

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(mesh.num_nodes());
    CHECK(energy_error(space, zero, prob) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

    Eigen::VectorXd interp(mesh.num_nodes());
    for (int g = 0; g < mesh.num_nodes(); ++g) interp[g] = prob.u(mesh.node(g), Side::Omega0);
    CHECK(energy_error(space, interp, prob) <= 1e-9);

    // the constant is invisible
    CHECK(energy_error(space, interp.array() + 3.0, prob) <= 1e-9);
}

TEST_CASE("doubling the quadrature order leaves the energy error in place")
{
    const auto prob = circle_problem(1.0, 20.0);
    const int p = 3;
    const QuadMesh mesh(10, p);
    const auto cls = classify_cells(mesh, prob.geometry);
    Scheme s;
    s.kind = SchemeKind::HoSGFEM;
    const EnrichmentSpace space(mesh, cls, prob.geometry, s);
    const auto sys = assemble(space, prob);
    const Eigen::VectorXd U = solve_zero_mean(sys);
    const double e = energy_error(space, U, prob);
    // the enriched rule has 2p + 5 points per direction for the error; double it
    QuadratureConfig doubled;
    doubled.bump = 2 * p + 5;
    const double e2 = energy_error(space, U, prob, doubled);
    CHECK(std::abs(e - e2) <= 1e-8 * e2);
}

TEST_CASE("refinement is monotone and the enriched space beats FEM")
{
    for (const auto& prob : {line_problem(1.0, 10.0), circle_problem(1.0, 20.0)}) {
        for (int p : {2, 3}) {
            const auto ho = convergence_study(prob, p, {5, 10, 20, 40}, options(SchemeKind::HoSGFEM));
            const auto fem = convergence_study(prob, p, {5, 10, 20, 40}, options(SchemeKind::FEM));
            CAPTURE(prob.name);
            CAPTURE(p);
            for (std::size_t k = 0; k < 4; ++k) {
                REQUIRE(ho.records[k].ok);
                REQUIRE(fem.records[k].ok);
                CHECK(ho.records[k].energy_error >= 0.0);
                CHECK(ho.records[k].energy_error <= fem.records[k].energy_error);
                if (k > 0) CHECK(ho.records[k].energy_error < ho.records[k - 1].energy_error);
            }
            CHECK(std::abs(ho.slope - p) <= 0.35);
        }
    }
}

TEST_CASE("FEM rate on the line problem")
{
    const auto res = convergence_study(line_problem(1.0, 10.0), 3, {10, 20, 40}, options(SchemeKind::FEM));
    CHECK(std::abs(res.slope - 0.5) <= 0.2);
    CHECK(res.rates.size() == 2);
}

TEST_CASE("convergence study bookkeeping")
{
    const auto prob = circle_problem(1.0, 20.0);
    auto opt = options(SchemeKind::HoSGFEM);
    opt.compute_scn = true;
    const auto serial = convergence_study(prob, 2, {5, 10, 20}, opt, 1);
    const auto pooled = convergence_study(prob, 2, {5, 10, 20}, opt, 3);
    REQUIRE(serial.records.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& a = serial.records[k];
        const auto& b = pooled.records[k];
        CHECK(a.N == (k == 0 ? 5 : k == 1 ? 10 : 20));
        CHECK(a.energy_error == b.energy_error);
        CHECK(a.scn == b.scn);
        CHECK(a.scn >= 1.0);
        CHECK(a.n_fem == (2 * a.N + 1) * (2 * a.N + 1));
        CHECK(a.n_enr > 0);
        CHECK(a.geom == prob.geometry.tag());
        CHECK(std::isnan(a.delta));
    }
    CHECK(std::isfinite(serial.scn_slope));

    CHECK_THROWS_AS(convergence_study(prob, 2, {5, 10}, opt), std::invalid_argument);
    CHECK_THROWS_AS(convergence_study(prob, 2, {5, 10, 10}, opt), std::invalid_argument);

    // a failing configuration marks its rows and the study carries on
    auto broken = prob;
    broken.f = [](Point2, Side) { return std::numeric_limits<double>::quiet_NaN(); };
    const auto failed = convergence_study(broken, 1, {4, 6, 8}, options(SchemeKind::FEM));
    for (const auto& r : failed.records) {
        CHECK_FALSE(r.ok);
        CHECK_FALSE(r.message.empty());
    }
    CHECK(std::isnan(failed.slope));
}

TEST_CASE("robustness sweep records")
{
    RunOptions base;
    base.compute_scn = true;
    const auto recs = robustness_sweep({SchemeKind::FEM, SchemeKind::HoSGFEM}, 2, 10, 1, 3, base);
    REQUIRE(recs.size() == 6);
    for (const auto& r : recs) {
        CHECK(r.ok);
        CHECK(r.scn >= 1.0);
        CHECK(std::isnan(r.energy_error));
        CHECK(r.kappa1 == 10.0);
    }
    CHECK(recs[0].scheme == "fem");
    CHECK(recs[3].scheme == "hosgfem");
    CHECK(recs[0].delta == robustness_delta(1));
    CHECK(recs[2].delta == robustness_delta(3));
    CHECK_THROWS_AS(robustness_sweep({SchemeKind::FEM}, 2, 10, 3, 1, base), std::invalid_argument);
}

TEST_CASE("parallel_for visits every index once")
{
    for (int jobs : {1, 2, 7}) {
        std::vector<std::atomic<int>> hits(50);
        parallel_for(50, jobs, [&](int i) { ++hits[static_cast<std::size_t>(i)]; });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
}

TEST_CASE("CSV rows")
{
    CHECK(csv_header() == "scheme,p,N,kappa0,kappa1,geom,delta,energy_error,scn,n_fem,n_enr,dropped,seconds");
    ExperimentRecord r;
    r.scheme = "hosgfem";
    r.p = 3;
    r.N = 20;
    r.kappa0 = 1.0;
    r.kappa1 = 10.0;
    r.geom = "line";
    r.energy_error = 0.1;
    r.scn = 12345.678;
    r.n_fem = 3721;
    r.n_enr = 240;
    r.dropped = 2;
    CHECK(csv_row(r) ==
          "hosgfem,3,20,1,10,line,nan,0.10000000000000001,12345.678,3721,240,2,0");
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);

    std::vector<ExperimentRecord> recs(3, r);
    recs[0].N = 40;
    recs[1].scheme = "fem";
    recs[2].N = 10;
    sort_records(recs);
    CHECK(recs[0].scheme == "fem");
    CHECK(recs[1].N == 10);
    CHECK(recs[2].N == 40);

    std::ostringstream os;
    write_csv(os, recs);
    std::istringstream is(os.str());
    std::string line;
    int count = 0;
    while (std::getline(is, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 12);
        ++count;
    }
    CHECK(count == 4);
}
