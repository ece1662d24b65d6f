#include "ufem/lemma_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>

namespace ufem::lemma {

namespace {

using Real = long double;

/// Weights of the symmetric (2m+1)-point stencil for the k-th derivative at
/// 0 with unit spacing, m = ceil(k / 2).  The error expands in even powers
/// of the step.
std::vector<Real> central_weights(int k)
{
    const int m = (k + 1) / 2;
    const int n = 2 * m + 1;
    // Vandermonde system sum_j w_j x_j^q = k! delta_{qk}, q = 0..n-1
    std::vector<std::vector<Real>> A(static_cast<std::size_t>(n), std::vector<Real>(static_cast<std::size_t>(n + 1)));
    Real fact = 1;
    for (int q = 2; q <= k; ++q) fact *= q;
    for (int q = 0; q < n; ++q) {
        for (int j = 0; j < n; ++j) A[q][j] = std::pow(static_cast<Real>(j - m), q);
        A[q][n] = q == k ? fact : 0;
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r) {
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        }
        std::swap(A[c], A[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const Real f = A[r][c] / A[c][c];
            for (int j = c; j <= n; ++j) A[r][j] -= f * A[c][j];
        }
    }
    std::vector<Real> w(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) w[j] = A[j][n] / A[j][j];
    return w;
}

Real mixed_difference(const LocalFunction& f, int a, int b, Real h)
{
    const auto wa = central_weights(a), wb = central_weights(b);
    const int ma = static_cast<int>(wa.size() / 2), mb = static_cast<int>(wb.size() / 2);
    Real sum = 0;
    for (int i = -ma; i <= ma; ++i) {
        for (int j = -mb; j <= mb; ++j) {
            const Real w = wa[static_cast<std::size_t>(i + ma)] * wb[static_cast<std::size_t>(j + mb)];
            if (w != 0) sum += w * f(i * h, j * h);
        }
    }
    return sum / std::pow(h, a + b);
}

void fill(const LocalFunction& f, int order, double h0, CoeffArray& coef, CoeffArray& err)
{
    coef = CoeffArray(order);
    err = CoeffArray(order);
    for (int l = 0; l <= order; ++l) {
        for (int i = l; i >= 0; --i) {
            const int j = l - i;
            const Real h = h0;
            const Real D0 = mixed_difference(f, i, j, h);
            const Real D1 = mixed_difference(f, i, j, h / 2);
            const Real D2 = mixed_difference(f, i, j, h / 4);
            const Real R1a = (4 * D1 - D0) / 3, R1b = (4 * D2 - D1) / 3;
            const Real R2 = (16 * R1b - R1a) / 15;
            Real fact = 1;
            for (int q = 2; q <= i; ++q) fact *= q;
            for (int q = 2; q <= j; ++q) fact *= q;
            coef(i, j) = static_cast<double>(R2 / fact);
            err(i, j) = static_cast<double>(std::fabs(R2 - R1b) / fact);
        }
    }
}

}  // namespace

LocalFrame local_frame(const InterfaceGeometry& geom, Point2 y)
{
    const auto [normal, tangent] = geom.frame_at(y);
    return {y, normal * -1.0, tangent};
}

LocalFrame flipped(const LocalFrame& frame) { return {frame.y, frame.n, frame.tau * -1.0}; }

LocalFunction local_distance(const InterfaceGeometry& geom, const LocalFrame& frame)
{
    if (const auto* c = std::get_if<CircleInterface>(&geom.shape())) {
        const Real ox = static_cast<Real>(frame.y.x) - c->center.x, oy = static_cast<Real>(frame.y.y) - c->center.y;
        const Real r = c->radius;
        return [=](Real s, Real t) {
            const Real X = ox + s * frame.n.x + t * frame.tau.x;
            const Real Y = oy + s * frame.n.y + t * frame.tau.y;
            return r - std::sqrt(X * X + Y * Y);
        };
    }
    // The signed offset is affine with gradient -n and vanishes at y.
    const Real y0 = -static_cast<Real>(geom.signed_offset(frame.y));
    return [y0](Real s, Real) { return y0 + s; };
}

LocalFunction circle_jump(const InterfaceGeometry& geom, double kappa0, double kappa1, const LocalFrame& frame)
{
    const auto* c = std::get_if<CircleInterface>(&geom.shape());
    if (!c) throw std::invalid_argument("circle_jump: interface is not a circle");
    const Real r4 = std::pow(static_cast<Real>(c->radius), 4);
    const Real a0 = 2 * static_cast<Real>(kappa1) / r4;
    const Real a1 = (static_cast<Real>(kappa1) + kappa0) / r4;
    const Real b = static_cast<Real>(kappa1) - kappa0;
    const Real ox = static_cast<Real>(frame.y.x) - c->center.x, oy = static_cast<Real>(frame.y.y) - c->center.y;
    return [=](Real s, Real t) {
        const Real X = ox + s * frame.n.x + t * frame.tau.x;
        const Real Y = oy + s * frame.n.y + t * frame.tau.y;
        const Real h = X * X - Y * Y;
        const Real rho2 = X * X + Y * Y;
        return (a0 - a1) * h - b * h / (rho2 * rho2);
    };
}

CoeffArray::CoeffArray(int order)
    : order_(order), v_(static_cast<std::size_t>((order + 1) * (order + 2) / 2), 0.0)
{
}

std::size_t CoeffArray::index(int i, int j) const
{
    if (i < 0 || j < 0 || i + j > order_) throw std::out_of_range("CoeffArray: index outside the triangle");
    const int l = i + j;
    return static_cast<std::size_t>(l * (l + 1) / 2 + j);
}

TaylorTable taylor_table(const LocalFunction& u, const LocalFunction& d, const LocalFrame& frame, int p,
                         double length)
{
    if (p < 1) throw std::invalid_argument("taylor_table: p must be positive");
    TaylorTable t;
    t.frame = frame;
    t.p = p;
    t.length = length;
    const double h0 = 1e-2 * std::min(1.0, length);
    fill(u, p + 1, h0, t.u, t.u_err);
    fill(d, p + 1, h0, t.d, t.d_err);
    return t;
}

CoeffArray eta_coefficients(const TaylorTable& table, int p)
{
    CoeffArray c(p - 1);
    for (int l = 0; l < p; ++l) {
        for (int m = l; m >= 0; --m) {
            const int n = l - m;
            double v = table.u(m + 1, n);
            for (int lo = 0; lo < l; ++lo) {
                for (int i = lo; i >= 0; --i) {
                    const int j = lo - i;
                    if (i > m + 1 || j > n) continue;
                    v -= c(i, j) * table.d(m - i + 1, n - j);
                }
            }
            c(m, n) = v;
        }
    }
    return c;
}

CoeffArray residuals(const TaylorTable& table, const CoeffArray& c, int p)
{
    CoeffArray eps(p);
    for (int l = 0; l <= p; ++l) {
        for (int i = l; i >= 0; --i) {
            const int j = l - i;
            double v = table.u(i, j);
            for (int m = 0; m <= i; ++m) {
                for (int n = 0; n <= j; ++n) {
                    if (m + n > c.order()) continue;
                    v -= table.d(i - m, j - n) * c(m, n);
                }
            }
            eps(i, j) = v;
        }
    }
    return eps;
}

double residual_check(const TaylorTable& table, const CoeffArray& c, int p)
{
    const CoeffArray eps = residuals(table, c, p);
    double worst = 0.0;
    for (int l = 0; l <= p; ++l) {
        for (int i = l; i >= 0; --i) worst = std::max(worst, std::abs(eps(i, l - i)));
    }
    return worst;
}

std::vector<VerifyRow> verify_lemma(int p_max)
{
    std::vector<VerifyRow> rows;
    const auto line = InterfaceGeometry::standard_line();
    const auto circle = InterfaceGeometry::standard_circle();
    const Point2 y_line = line.closest_point({0.5, 0.5});
    const auto& c = std::get<CircleInterface>(circle.shape());
    const double theta = 0.2 * std::acos(-1.0);
    const Point2 y_circle = c.center + Vec2{std::cos(theta), std::sin(theta)} * c.radius;

    for (int p = 1; p <= p_max; ++p) {
        const LocalFrame fl = local_frame(line, y_line);
        const LocalFunction dl = local_distance(line, fl);
        const LocalFunction ul = [dl](Real s, Real t) { return dl(s, t) * (1 + s); };
        const TaylorTable tl = taylor_table(ul, dl, fl, p, 1.0);
        rows.push_back({"flat", p, residual_check(tl, eta_coefficients(tl, p), p), 1e-8});

        const LocalFrame fc = local_frame(circle, y_circle);
        const TaylorTable tc =
            taylor_table(circle_jump(circle, 1.0, 20.0, fc), local_distance(circle, fc), fc, p, std::min(1.0, c.radius));
        rows.push_back({"circle", p, residual_check(tc, eta_coefficients(tc, p), p), 1e-4});
    }
    return rows;
}

}  // namespace ufem::lemma
