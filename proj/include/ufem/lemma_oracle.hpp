#pragma once

#include "ufem/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ufem::lemma {

/// Function of the local coordinates (s, t) = ((x - y).n, (x - y).tau),
/// evaluated in extended precision so that high-order differences keep
/// their digits.
using LocalFunction = std::function<long double(long double s, long double t)>;

/// Orthonormal frame at a point y on the interface.  `n` points into
/// Omega0, where the one-sided distance grows.
struct LocalFrame {
    Point2 y;
    Vec2 n;
    Vec2 tau;

    Point2 to_global(double s, double t) const { return y + n * s + tau * t; }
};

LocalFrame local_frame(const InterfaceGeometry& geom, Point2 y);

/// Same frame with the tangent reversed.
LocalFrame flipped(const LocalFrame& frame);

/// Smooth extension of the Omega0 distance (minus the signed offset) in
/// local coordinates.
LocalFunction local_distance(const InterfaceGeometry& geom, const LocalFrame& frame);

/// Jump u0 - u1 of the circle manufactured solution, smoothly extended, in
/// local coordinates.  Requires a circular interface.
LocalFunction circle_jump(const InterfaceGeometry& geom, double kappa0, double kappa1, const LocalFrame& frame);

/// Dense triangular array of Taylor coefficients a_{i,j}, i + j <= order.
class CoeffArray {
public:
    CoeffArray() = default;
    explicit CoeffArray(int order);

    int order() const { return order_; }
    double& operator()(int i, int j) { return v_[index(i, j)]; }
    double operator()(int i, int j) const { return v_[index(i, j)]; }

private:
    std::size_t index(int i, int j) const;
    int order_ = -1;
    std::vector<double> v_;
};

struct TaylorTable {
    LocalFrame frame;
    int p = 0;
    /// Characteristic length: 1 for flat interfaces, min(1, radius) otherwise.
    double length = 1.0;
    /// Coefficients D^(i,j) f(y) / (i! j!) up to order p + 1.
    CoeffArray u, d;
    /// Richardson error estimates per coefficient.
    CoeffArray u_err, d_err;
};

/// Nested central differences (symmetric stencils, steps h, h/2, h/4 with
/// h = 1e-2 * length) and two Richardson levels.
TaylorTable taylor_table(const LocalFunction& u, const LocalFunction& d, const LocalFrame& frame, int p,
                         double length = 1.0);

/// c_{m,n}, m + n < p, by the level-by-level recursion
/// c_{m,n} = u_{m+1,n} - sum_{i+j<l} c_{i,j} d_{m-i+1,n-j}.
CoeffArray eta_coefficients(const TaylorTable& table, int p);

/// eps_{i,j} = u_{i,j} - sum_{m<=i, n<=j} d_{i-m,j-n} c_{m,n} for i + j <= p.
CoeffArray residuals(const TaylorTable& table, const CoeffArray& c, int p);

/// max |eps_{i,j}| over i + j <= p.
double residual_check(const TaylorTable& table, const CoeffArray& c, int p);

struct VerifyRow {
    std::string name;
    int p = 0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass() const { return residual <= tolerance; }
};

/// Flat interface with u = d (1 + s) and the circle problem's jump
/// (kappa0 = 1, kappa1 = 20) for p = 1..p_max.
std::vector<VerifyRow> verify_lemma(int p_max = 4);

}  // namespace ufem::lemma
