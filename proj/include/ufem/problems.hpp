#pragma once

#include "ufem/geometry.hpp"

#include <functional>
#include <string>

namespace ufem {

/// Interface problem -div(kappa grad u) = f with Neumann data g on the
/// boundary and flux jump q on the interface, plus its exact solution.
struct ManufacturedProblem {
    std::string name;
    InterfaceGeometry geometry;
    double kappa0 = 1.0;
    double kappa1 = 1.0;
    bool has_exact = true;

    std::function<double(Point2, Side)> u{};
    std::function<Vec2(Point2, Side)> grad_u{};
    std::function<double(Point2, Side)> f{};

    /// Domain mean of u, used to compare mean-free functions.
    double mean = 0.0;

    double kappa(Side s) const { return s == Side::Omega0 ? kappa0 : kappa1; }

    /// Neumann datum kappa du/dn_b at a boundary point.
    double g(Point2 x, Side s, Vec2 outward) const
    {
        return kappa(s) * grad_u(x, s).dot(outward);
    }

    /// kappa0 du0/dn0 + kappa1 du1/dn1 with n0, n1 the outward normals of
    /// Omega0 and Omega1 at an interface point.
    double q(Point2 x) const
    {
        const Vec2 n0 = geometry.offset_gradient(x);
        return kappa0 * grad_u(x, Side::Omega0).dot(n0) - kappa1 * grad_u(x, Side::Omega1).dot(n0);
    }
};

ManufacturedProblem line_problem(double kappa0, double kappa1);
ManufacturedProblem circle_problem(double kappa0, double kappa1);
ManufacturedProblem patch_problem();

/// delta_i = 0.03 * 2^-i.
double robustness_delta(int i);

/// Horizontal interface at y = 0.5 + delta with kappa0 = 1, kappa1 = 10 and
/// zero data; only conditioning is measured on it.
ManufacturedProblem robustness_config(double delta);

/// Domain integral of u by a fine side-aware quadrature.
double domain_mean(const ManufacturedProblem& prob);

}  // namespace ufem
