#pragma once

#include "ufem/geometry.hpp"
#include "ufem/mesh.hpp"

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace ufem {

enum class BasisKind { Lagrange, Bernstein, HermiteValue };

namespace basis1d {

double lagrange(int p, int i, double s);
double lagrange_deriv(int p, int i, double s);
double bernstein(int p, int i, double s);
double bernstein_deriv(int p, int i, double s);
/// Cubic Hermite value function attached to end `i` (0 -> s=0, 1 -> s=1).
double hermite(int i, double s);
double hermite_deriv(int i, double s);

}  // namespace basis1d

/// Tensor-product shape functions on the reference square [0,1]^2.  Local
/// index k = a + (p+1) b for Lagrange/Bernstein, a + 2 b for HermiteValue.
class ReferenceBasis {
public:
    ReferenceBasis(BasisKind kind, int degree);

    BasisKind kind() const { return kind_; }
    int degree() const { return p_; }
    int size() const { return per_dir_ * per_dir_; }

    double eval(int k, double s, double t) const;
    Vec2 grad(int k, double s, double t) const;

    /// Values and reference gradients of every function at (s, t).
    void eval_all(double s, double t, std::vector<double>& values,
                  std::vector<Vec2>* grads = nullptr) const;

    /// Reference coordinates of the node/control point attached to k.
    Point2 node(int k) const;

private:
    double f1d(int i, double s) const;
    double d1d(int i, double s) const;

    BasisKind kind_;
    int p_;
    int per_dir_;
};

using ScalarField = std::function<double(Point2)>;

/// Nodal interpolant I_h f on the order-p Lagrange space of `mesh`.
Eigen::VectorXd interpolate(const QuadMesh& mesh, const ScalarField& f);

/// Cell containing x (ties go to the lower-index cell).
int locate_cell(const QuadMesh& mesh, Point2 x);

/// Evaluates the FE function with nodal coefficients `u` at x, optionally its gradient.
double eval_fe(const QuadMesh& mesh, const Eigen::VectorXd& u, Point2 x, Vec2* grad = nullptr);

}  // namespace ufem
