#include "ufem/basis.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ufem;

TEST_CASE("Bernstein values")
{
    CHECK(basis1d::bernstein(2, 1, 0.5) == doctest::Approx(0.5));
    const ReferenceBasis b(BasisKind::Bernstein, 2);
    CHECK(b.eval(1 + 3 * 1, 0.5, 0.5) == doctest::Approx(0.25));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 1; p <= 5; ++p) {
        const ReferenceBasis bp(BasisKind::Bernstein, p);
        for (int k = 0; k < 50; ++k) {
            const double s = u(rng), t = u(rng);
            double sum = 0.0;
            for (int i = 0; i < bp.size(); ++i) {
                const double v = bp.eval(i, s, t);
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("Lagrange basis is nodal and sums to one")
{
    const ReferenceBasis l(BasisKind::Lagrange, 3);
    for (int k = 0; k < l.size(); ++k) {
        for (int j = 0; j < l.size(); ++j) {
            const Point2 x = l.node(j);
            CHECK(l.eval(k, x.x, x.y) == doctest::Approx(k == j ? 1.0 : 0.0).epsilon(1e-13));
        }
    }
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 1; p <= 5; ++p) {
        const ReferenceBasis lp(BasisKind::Lagrange, p);
        for (int k = 0; k < 50; ++k) {
            const double s = u(rng), t = u(rng);
            double sum = 0.0;
            for (int i = 0; i < lp.size(); ++i) sum += lp.eval(i, s, t);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(l.eval(16, 0.5, 0.5), std::out_of_range);
    CHECK_THROWS(ReferenceBasis(BasisKind::Lagrange, 6));
}

TEST_CASE("Hermite value function")
{
    CHECK(basis1d::hermite(0, 0.0) == 1.0);
    CHECK(basis1d::hermite(0, 1.0) == doctest::Approx(0.0));
    CHECK(basis1d::hermite_deriv(0, 0.0) == doctest::Approx(0.0));
    CHECK(basis1d::hermite_deriv(0, 1.0) == doctest::Approx(0.0));
    for (double s : {0.1, 0.4, 0.77}) CHECK(basis1d::hermite(0, s) == doctest::Approx(1 - 3 * s * s + 2 * s * s * s));
}

TEST_CASE("gradients match finite differences")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const double h = 1e-5;
    for (auto kind : {BasisKind::Lagrange, BasisKind::Bernstein, BasisKind::HermiteValue}) {
        for (int p = 1; p <= 5; ++p) {
            if (kind == BasisKind::HermiteValue && p != 3) continue;
            const ReferenceBasis b(kind, p);
            for (int n = 0; n < 100; ++n) {
                const double s = u(rng), t = u(rng);
                const int k = static_cast<int>(rng() % static_cast<unsigned>(b.size()));
                const Vec2 g = b.grad(k, s, t);
                const double gs = (b.eval(k, s + h, t) - b.eval(k, s - h, t)) / (2 * h);
                const double gt = (b.eval(k, s, t + h) - b.eval(k, s, t - h)) / (2 * h);
                const double scale = std::max(1.0, std::hypot(g.x, g.y));
                CHECK(std::abs(g.x - gs) <= 1e-7 * scale);
                CHECK(std::abs(g.y - gt) <= 1e-7 * scale);
            }
        }
    }
}

TEST_CASE("interpolation reproduces constants and polynomials")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 1; p <= 5; ++p) {
        const QuadMesh m(4, p);
        const Eigen::VectorXd c = interpolate(m, [](Point2) { return 2.5; });
        CHECK((c.array() == 2.5).all());
        // tensor polynomial of degree p per direction
        auto f = [p](Point2 x) { return std::pow(x.x, p) * std::pow(x.y, p) - 0.3 * std::pow(x.x, p - 1) + x.y; };
        const Eigen::VectorXd v = interpolate(m, f);
        for (int g = 0; g < m.num_nodes(); ++g) CHECK(v[g] == f(m.node(g)));
        for (int k = 0; k < 50; ++k) {
            const Point2 x{u(rng), u(rng)};
            CHECK(std::abs(eval_fe(m, v, x) - f(x)) <= 1e-12);
        }
    }
}

TEST_CASE("interpolated distance differs from the distance inside the cut row")
{
    const int n = 10;
    const QuadMesh m(n, 1);
    const auto g = InterfaceGeometry::hline(0.25 / n);
    const Eigen::VectorXd v = interpolate(m, [&](Point2 x) { return g.distance(x); });
    for (int c = 0; c < m.num_cells(); ++c) {
        const Point2 mid = m.centroid(c);
        const double diff = std::abs(eval_fe(m, v, mid) - g.distance(mid));
        if (m.cell_j(c) == 5) CHECK(diff > 1e-3);
        else CHECK(diff <= 1e-14);
    }
}
