#include "ufem/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace ufem {

namespace {

using Triplet = Eigen::Triplet<double>;
using LU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

/// [A b; b^T 0] with b scaled to unit max norm.
SparseMatrix bordered(const SparseMatrix& A, const Eigen::VectorXd& b)
{
    const auto n = A.rows();
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(A.nonZeros() + 2 * n));
    for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (b[i] == 0.0) continue;
        trip.emplace_back(i, n, b[i]);
        trip.emplace_back(n, i, b[i]);
    }
    SparseMatrix M(n + 1, n + 1);
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    return M;
}

void factorize(LU& lu, const SparseMatrix& M)
{
    lu.analyzePattern(M);
    lu.factorize(M);
    if (lu.info() != Eigen::Success) {
        throw SingularSystem("sparse LU failed: " + lu.lastErrorMessage());
    }
}

struct LanczosResult {
    Eigen::VectorXd ritz;      // ascending
    Eigen::VectorXd residual;  // matching residual bounds
    bool exhausted = false;    // invariant subspace reached
};

using Operator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Lanczos with full reorthogonalization in the complement of z.  Stops once
/// the Ritz value chosen by `pick` has converged to `tol`.
LanczosResult lanczos(const Operator& op, Eigen::Index n, const Eigen::VectorXd& z, int max_it, double tol,
                      std::uint64_t seed, const std::function<Eigen::Index(const Eigen::VectorXd&)>& pick)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
    auto deflate = [&](Eigen::VectorXd& x) {
        if (z.size() == n) x -= z.dot(x) * z;
    };
    deflate(v);
    v.normalize();

    const int m_max = static_cast<int>(std::min<Eigen::Index>(max_it, n));
    Eigen::MatrixXd V(n, m_max + 1);
    std::vector<double> alpha, beta;
    V.col(0) = v;
    Eigen::VectorXd w(n);
    LanczosResult res;

    for (int j = 0; j < m_max; ++j) {
        op(V.col(j), w);
        deflate(w);
        const double a = V.col(j).dot(w);
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd h = V.leftCols(j + 1).transpose() * w;
            w -= V.leftCols(j + 1) * h;
            deflate(w);
        }
        const double b = w.norm();
        beta.push_back(b);

        const bool check = (j + 1) % 5 == 0 || j + 1 == m_max || b < 1e-14 * std::abs(a);
        if (!check) {
            if (j + 1 < m_max) V.col(j + 1) = w / b;
            continue;
        }
        const int m = j + 1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < m; ++k) {
            T(k, k) = alpha[static_cast<std::size_t>(k)];
            if (k + 1 < m) T(k, k + 1) = T(k + 1, k) = beta[static_cast<std::size_t>(k)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        res.ritz = es.eigenvalues();
        res.residual = (b * es.eigenvectors().row(m - 1).transpose()).cwiseAbs();
        res.exhausted = b < 1e-14 * std::max(1.0, res.ritz.cwiseAbs().maxCoeff());
        const Eigen::Index k = pick(res.ritz);
        if (res.exhausted || (k >= 0 && res.residual[k] <= tol * std::abs(res.ritz[k]))) return res;
        if (j + 1 < m_max) V.col(j + 1) = w / b;
    }
    return res;
}

SCNResult dense_scn(const SparseMatrix& K, double cutoff)
{
    SCNResult r;
    r.method = "dense";
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(K), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& lam = es.eigenvalues();
    r.lambda_max = lam[lam.size() - 1];
    const double thr = cutoff * r.lambda_max;
    r.lambda_min = r.lambda_max;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] > thr) {
            r.lambda_min = lam[i];
            break;
        }
    }
    r.lambda_min_lo = r.lambda_min_hi = r.lambda_min;
    r.scn = r.lambda_max / r.lambda_min;
    return r;
}

}  // namespace

/// Relative residual above which the bordered system counts as singular.
constexpr double kMaxResidual = 1e-6;

Eigen::VectorXd solve_zero_mean(const BlockLinearSystem& sys, const SolveOptions& opt)
{
    const ScaledSystem sc = jacobi_scale(sys);
    const Eigen::Index n = sys.size();
    const double mscale = sc.mean.cwiseAbs().maxCoeff();
    if (!(mscale > 0.0)) throw SingularSystem("solve_zero_mean: mean functional vanishes");
    const SparseMatrix A = bordered(sc.K, sc.mean / mscale);

    // Enriched spaces can be numerically rank deficient.  Factor the shifted
    // bordered matrix and iterate on the residual of the unshifted one; the
    // components below the shift stay near the minimum-norm solution.
    SparseMatrix shift(n + 1, n + 1);
    {
        std::vector<Triplet> d;
        for (Eigen::Index i = 0; i < n; ++i) d.emplace_back(i, i, opt.shift);
        shift.setFromTriplets(d.begin(), d.end());
    }
    LU lu;
    factorize(lu, SparseMatrix(A + shift));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs.head(n) = sc.F;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_sweeps; ++it) {
        const Eigen::VectorXd dx = lu.solve(rhs - A * x);
        x += dx;
        const double e = dx.head(n).dot(sc.K * dx.head(n));
        const double ex = x.head(n).dot(sc.K * x.head(n));
        // converged, or the corrections stopped shrinking
        if (!(e > 1e-30 * ex) || (it >= 2 && e > 0.5 * prev)) break;
        prev = e;
    }
    if (!x.allFinite()) {
        throw SingularSystem("solve_zero_mean: solution is not finite (augmented system singular)");
    }
    const double bnorm = rhs.norm();
    const double res = (rhs - A * x).norm();
    if (res > kMaxResidual * bnorm) {
        throw SingularSystem("solve_zero_mean: augmented system singular, relative residual " +
                             std::to_string(res / bnorm) + " after " + std::to_string(opt.max_sweeps) +
                             " sweeps at shift " + std::to_string(opt.shift));
    }
    return sc.D.cwiseProduct(x.head(n));
}

Eigen::VectorXd scaled_constant_kernel(const BlockLinearSystem& sys, const Eigen::VectorXd& D)
{
    Eigen::VectorXd z = Eigen::VectorXd::Zero(sys.size());
    for (int i = 0; i < sys.n_fem; ++i) z[i] = 1.0 / D[i];
    return z.normalized();
}

SCNResult scaled_condition_number(const SparseMatrix& Khat, const Eigen::VectorXd& kernel, const SCNOptions& opt)
{
    const Eigen::Index n = Khat.rows();
    if (n == 0 || Khat.cols() != n) throw std::invalid_argument("scaled_condition_number: matrix must be square and nonempty");
    if (n <= opt.dense_limit) return dense_scn(Khat, opt.cutoff);

    Eigen::VectorXd z;
    if (kernel.size() == n) z = kernel.normalized();

    SCNResult r;
    r.method = "lanczos";
    const auto top = [](const Eigen::VectorXd& ritz) { return ritz.size() - 1; };
    const LanczosResult hi = lanczos(
        [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = Khat * x; }, n, z, opt.max_iterations,
        opt.tolerance, opt.seed, top);
    r.lambda_max = hi.ritz[hi.ritz.size() - 1];
    bool ok = hi.exhausted || hi.residual[hi.ritz.size() - 1] <= opt.tolerance * r.lambda_max;

    // pseudo-inverse on the complement of z through the bordered factorization
    LU lu;
    SparseMatrix A = z.size() == n ? bordered(Khat, z) : Khat;
    try {
        factorize(lu, A);
    } catch (const SingularSystem&) {
        if (n <= opt.dense_fallback_limit) {
            auto d = dense_scn(Khat, opt.cutoff);
            d.method = "dense-fallback";
            return d;
        }
        r.converged = false;
        r.lambda_min = r.lambda_min_lo = 0.0;
        r.lambda_min_hi = r.lambda_max;
        r.scn = std::numeric_limits<double>::infinity();
        return r;
    }
    Eigen::VectorXd rhs(A.rows());
    const double theta_cap = 1.0 / (opt.cutoff * r.lambda_max);
    const auto pick = [theta_cap](const Eigen::VectorXd& ritz) {
        for (Eigen::Index i = ritz.size() - 1; i >= 0; --i) {
            if (ritz[i] <= theta_cap && ritz[i] > 0.0) return i;
        }
        return Eigen::Index{-1};
    };
    const LanczosResult lo = lanczos(
        [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
            rhs.setZero();
            rhs.head(n) = x;
            y = lu.solve(rhs).head(n);
        },
        n, z, opt.max_iterations, opt.tolerance, opt.seed + 1, pick);
    const Eigen::Index k = pick(lo.ritz);
    if (k < 0) {
        r.converged = false;
    } else {
        const double theta = lo.ritz[k], res = lo.residual[k];
        r.lambda_min = 1.0 / theta;
        r.lambda_min_lo = 1.0 / (theta + res);
        r.lambda_min_hi = theta > res ? 1.0 / (theta - res) : r.lambda_max;
        ok = ok && (lo.exhausted || res <= opt.tolerance * theta);
    }
    r.converged = ok && k >= 0;
    if (!r.converged && n <= opt.dense_fallback_limit) {
        auto d = dense_scn(Khat, opt.cutoff);
        d.method = "dense-fallback";
        return d;
    }
    r.scn = r.lambda_min > 0.0 ? r.lambda_max / r.lambda_min : std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace ufem
