#include "ufem/problems.hpp"

#include "ufem/mesh.hpp"
#include "ufem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ufem {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double k0, double k1)
{
    if (!(k0 > 0.0) || !(k1 > 0.0)) {
        throw std::invalid_argument("conductivities must be positive");
    }
}

}  // namespace

double domain_mean(const ManufacturedProblem& prob)
{
    const QuadMesh mesh(16, 5);
    const auto cls = classify_cells(mesh, prob.geometry);
    double total = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        for (const auto& rule : cell_rule(mesh, cls, prob.geometry, c, 5, 4)) {
            for (std::size_t q = 0; q < rule.size(); ++q) {
                total += rule.weights[q] * prob.u(rule.points[q], rule.side);
            }
        }
    }
    return total;
}

ManufacturedProblem line_problem(double kappa0, double kappa1)
{
    require_positive(kappa0, kappa1);
    const double theta0 = kPi / 6.0;
    const double beta = 1.0 / kPi;
    const Point2 origin{1.0 + beta, 1.0};
    if (origin.x >= 0.0 && origin.x <= 1.0 && origin.y >= 0.0 && origin.y <= 1.0) {
        throw std::logic_error("line_problem: singular point inside the domain");
    }

    ManufacturedProblem prob{"line", InterfaceGeometry::line(theta0, beta), kappa0, kappa1};

    // polar angle in (-2 pi, 0] so that the branch cut stays outside the square
    // and the angle measured from the interface, theta + pi - theta0, is 0 on it
    auto polar = [origin](Point2 x) {
        const double dx = x.x - origin.x, dy = x.y - origin.y;
        double t = std::atan2(dy, dx);
        if (t > 0.0) t -= 2.0 * kPi;
        return std::pair{std::hypot(dx, dy), t};
    };
    const double a1 = kappa0 / kappa1;
    auto sin_coef = [a1](Side s) { return s == Side::Omega0 ? 1.0 : a1; };

    prob.u = [=](Point2 x, Side s) {
        const auto [r, t] = polar(x);
        const double phi = 4.0 / 3.0 * (t + kPi - theta0);
        return std::pow(r, 4.0 / 3.0) * (std::cos(phi) + sin_coef(s) * std::sin(phi))
               + std::sin(x.x * x.y);
    };
    prob.grad_u = [=](Point2 x, Side s) {
        const auto [r, t] = polar(x);
        const double phi = 4.0 / 3.0 * (t + kPi - theta0);
        const double a = sin_coef(s);
        const double radial = 4.0 / 3.0 * (std::cos(phi) + a * std::sin(phi));
        const double angular = 4.0 / 3.0 * (-std::sin(phi) + a * std::cos(phi));
        const double r13 = std::cbrt(r);
        const Vec2 er{std::cos(t), std::sin(t)};
        const Vec2 et{-std::sin(t), std::cos(t)};
        const double cxy = std::cos(x.x * x.y);
        return er * (r13 * radial) + et * (r13 * angular) + Vec2{x.y * cxy, x.x * cxy};
    };
    prob.f = [=](Point2 x, Side s) {
        const double k = s == Side::Omega0 ? kappa0 : kappa1;
        return k * (x.x * x.x + x.y * x.y) * std::sin(x.x * x.y);
    };
    prob.mean = domain_mean(prob);
    return prob;
}

ManufacturedProblem circle_problem(double kappa0, double kappa1)
{
    require_positive(kappa0, kappa1);
    ManufacturedProblem prob{"circle", InterfaceGeometry::standard_circle(), kappa0, kappa1};
    const auto& c = std::get<CircleInterface>(prob.geometry.shape());
    const Point2 ctr = c.center;
    const double r4 = std::pow(c.radius, 4);
    const double a0 = 2.0 * kappa1 / r4;
    const double a1 = (kappa1 + kappa0) / r4;
    const double b = kappa1 - kappa0;

    // r^2 cos(2 theta) = X^2 - Y^2 and cos(2 theta) / r^2 = (X^2 - Y^2) / rho^4
    prob.u = [=](Point2 x, Side s) {
        const double X = x.x - ctr.x, Y = x.y - ctr.y;
        const double h = X * X - Y * Y;
        if (s == Side::Omega0) return a0 * h;
        const double rho2 = X * X + Y * Y;
        return a1 * h + b * h / (rho2 * rho2);
    };
    prob.grad_u = [=](Point2 x, Side s) {
        const double X = x.x - ctr.x, Y = x.y - ctr.y;
        if (s == Side::Omega0) return Vec2{2.0 * a0 * X, -2.0 * a0 * Y};
        const double rho2 = X * X + Y * Y;
        const double rho6 = rho2 * rho2 * rho2;
        const double gx = 2.0 * X * (3.0 * Y * Y - X * X) / rho6;
        const double gy = -2.0 * Y * (3.0 * X * X - Y * Y) / rho6;
        return Vec2{2.0 * a1 * X + b * gx, -2.0 * a1 * Y + b * gy};
    };
    prob.f = [](Point2, Side) { return 0.0; };
    prob.mean = domain_mean(prob);
    return prob;
}

ManufacturedProblem patch_problem()
{
    ManufacturedProblem prob{"patch", InterfaceGeometry::standard_line(), 1.0, 1.0};
    prob.u = [](Point2 x, Side) { return x.x + x.y - 1.0; };
    prob.grad_u = [](Point2, Side) { return Vec2{1.0, 1.0}; };
    prob.f = [](Point2, Side) { return 0.0; };
    prob.mean = 0.0;
    return prob;
}

double robustness_delta(int i) { return 0.03 * std::ldexp(1.0, -i); }

ManufacturedProblem robustness_config(double delta)
{
    if (!(delta > 0.0 && delta < 0.5)) {
        throw std::invalid_argument("robustness_config: delta must lie in (0, 0.5)");
    }
    ManufacturedProblem prob{"hline", InterfaceGeometry::hline(delta), 1.0, 10.0};
    prob.has_exact = false;
    prob.u = [](Point2, Side) { return 0.0; };
    prob.grad_u = [](Point2, Side) { return Vec2{0.0, 0.0}; };
    prob.f = [](Point2, Side) { return 0.0; };
    prob.mean = 0.0;
    return prob;
}

}  // namespace ufem
