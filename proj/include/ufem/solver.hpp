#pragma once

#include "ufem/assembly.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ufem {

class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    /// Diagonal shift of the factored scaled matrix; near the accuracy of
    /// the assembled entries.
    double shift = 1e-14;
    int max_sweeps = 30;
};

/// Solution of K U = F with the side condition m^T U = 0, through the
/// Jacobi-scaled system augmented by one Lagrange multiplier.
Eigen::VectorXd solve_zero_mean(const BlockLinearSystem& sys, const SolveOptions& opt = {});

struct SCNOptions {
    /// Eigenvalues below cutoff * lambda_max count as kernel.
    double cutoff = 1e-12;
    /// Dense eigensolve up to this dimension.
    int dense_limit = 1500;
    /// Dense fallback when the iteration fails, up to this dimension.
    int dense_fallback_limit = 4000;
    int max_iterations = 400;
    double tolerance = 1e-6;
    std::uint64_t seed = 20240601;
};

struct SCNResult {
    double scn = 0.0;
    double lambda_max = 0.0;
    double lambda_min = 0.0;  // smallest eigenvalue above the cutoff
    bool converged = true;
    std::string method;       // "dense" or "lanczos"
    /// Bracket for lambda_min when the iteration did not converge.
    double lambda_min_lo = 0.0, lambda_min_hi = 0.0;
};

/// lambda_max / lambda_min^+ of a symmetric positive semidefinite matrix.
/// `kernel` (may be empty) spans known null vectors that are deflated.
SCNResult scaled_condition_number(const SparseMatrix& Khat, const Eigen::VectorXd& kernel = {},
                                  const SCNOptions& opt = {});

/// Kernel direction of D K D coming from the constant function: D^{-1} applied
/// to the all-ones FEM vector, normalized.
Eigen::VectorXd scaled_constant_kernel(const BlockLinearSystem& sys, const Eigen::VectorXd& D);

}  // namespace ufem
