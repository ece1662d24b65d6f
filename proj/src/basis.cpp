#include "ufem/basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace ufem {

namespace basis1d {

namespace {

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double ipow(double x, int e)
{
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

}  // namespace

double lagrange(int p, int i, double s)
{
    const double si = static_cast<double>(i) / p;
    double v = 1.0;
    for (int j = 0; j <= p; ++j) {
        if (j == i) continue;
        const double sj = static_cast<double>(j) / p;
        v *= (s - sj) / (si - sj);
    }
    return v;
}

double lagrange_deriv(int p, int i, double s)
{
    const double si = static_cast<double>(i) / p;
    double sum = 0.0;
    for (int m = 0; m <= p; ++m) {
        if (m == i) continue;
        const double sm = static_cast<double>(m) / p;
        double term = 1.0 / (si - sm);
        for (int j = 0; j <= p; ++j) {
            if (j == i || j == m) continue;
            const double sj = static_cast<double>(j) / p;
            term *= (s - sj) / (si - sj);
        }
        sum += term;
    }
    return sum;
}

double bernstein(int p, int i, double s)
{
    return binomial(p, i) * ipow(1.0 - s, p - i) * ipow(s, i);
}

double bernstein_deriv(int p, int i, double s)
{
    if (p == 0) return 0.0;
    const double a = (i >= 1) ? bernstein(p - 1, i - 1, s) : 0.0;
    const double b = (i <= p - 1) ? bernstein(p - 1, i, s) : 0.0;
    return p * (a - b);
}

double hermite(int i, double s)
{
    const double u = (i == 0) ? s : 1.0 - s;
    return 1.0 - 3.0 * u * u + 2.0 * u * u * u;
}

double hermite_deriv(int i, double s)
{
    const double u = (i == 0) ? s : 1.0 - s;
    const double d = -6.0 * u + 6.0 * u * u;
    return (i == 0) ? d : -d;
}

}  // namespace basis1d

ReferenceBasis::ReferenceBasis(BasisKind kind, int degree) : kind_(kind), p_(degree)
{
    if (kind == BasisKind::HermiteValue) {
        p_ = 3;
        per_dir_ = 2;
    } else {
        if (degree < 1 || degree > 5) {
            throw std::invalid_argument("ReferenceBasis: degree must be in [1, 5]");
        }
        per_dir_ = degree + 1;
    }
}

double ReferenceBasis::f1d(int i, double s) const
{
    switch (kind_) {
    case BasisKind::Lagrange: return basis1d::lagrange(p_, i, s);
    case BasisKind::Bernstein: return basis1d::bernstein(p_, i, s);
    case BasisKind::HermiteValue: return basis1d::hermite(i, s);
    }
    return 0.0;
}

double ReferenceBasis::d1d(int i, double s) const
{
    switch (kind_) {
    case BasisKind::Lagrange: return basis1d::lagrange_deriv(p_, i, s);
    case BasisKind::Bernstein: return basis1d::bernstein_deriv(p_, i, s);
    case BasisKind::HermiteValue: return basis1d::hermite_deriv(i, s);
    }
    return 0.0;
}

double ReferenceBasis::eval(int k, double s, double t) const
{
    if (k < 0 || k >= size()) throw std::out_of_range("ReferenceBasis::eval: index out of range");
    return f1d(k % per_dir_, s) * f1d(k / per_dir_, t);
}

Vec2 ReferenceBasis::grad(int k, double s, double t) const
{
    if (k < 0 || k >= size()) throw std::out_of_range("ReferenceBasis::grad: index out of range");
    const int a = k % per_dir_, b = k / per_dir_;
    return {d1d(a, s) * f1d(b, t), f1d(a, s) * d1d(b, t)};
}

void ReferenceBasis::eval_all(double s, double t, std::vector<double>& values,
                              std::vector<Vec2>* grads) const
{
    const auto m = static_cast<std::size_t>(per_dir_);
    double fs[6], ft[6], ds[6], dt[6];
    for (int i = 0; i < per_dir_; ++i) {
        fs[i] = f1d(i, s);
        ft[i] = f1d(i, t);
        if (grads) {
            ds[i] = d1d(i, s);
            dt[i] = d1d(i, t);
        }
    }
    values.resize(m * m);
    if (grads) grads->resize(m * m);
    for (int b = 0; b < per_dir_; ++b) {
        for (int a = 0; a < per_dir_; ++a) {
            const auto k = static_cast<std::size_t>(a + per_dir_ * b);
            values[k] = fs[a] * ft[b];
            if (grads) (*grads)[k] = {ds[a] * ft[b], fs[a] * dt[b]};
        }
    }
}

Point2 ReferenceBasis::node(int k) const
{
    const int a = k % per_dir_, b = k / per_dir_;
    const double step = (kind_ == BasisKind::HermiteValue) ? 1.0 : 1.0 / p_;
    return {a * step, b * step};
}

Eigen::VectorXd interpolate(const QuadMesh& mesh, const ScalarField& f)
{
    Eigen::VectorXd u(mesh.num_nodes());
    for (int g = 0; g < mesh.num_nodes(); ++g) u[g] = f(mesh.node(g));
    return u;
}

int locate_cell(const QuadMesh& mesh, Point2 x)
{
    const int n = mesh.n();
    const int i = std::clamp(static_cast<int>(x.x * n), 0, n - 1);
    const int j = std::clamp(static_cast<int>(x.y * n), 0, n - 1);
    return mesh.cell_id(i, j);
}

double eval_fe(const QuadMesh& mesh, const Eigen::VectorXd& u, Point2 x, Vec2* grad)
{
    const int c = locate_cell(mesh, x);
    const ReferenceBasis basis(BasisKind::Lagrange, mesh.degree());
    const Point2 st = mesh.to_reference(c, x);
    std::vector<double> vals;
    std::vector<Vec2> grads;
    basis.eval_all(st.x, st.y, vals, grad ? &grads : nullptr);
    const auto nodes = mesh.cell_nodes(c);
    double v = 0.0;
    Vec2 g{0.0, 0.0};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        v += u[nodes[k]] * vals[k];
        if (grad) g = g + grads[k] * u[nodes[k]];
    }
    if (grad) *grad = g * static_cast<double>(mesh.n());
    return v;
}

}  // namespace ufem
