#pragma once

#include "ufem/enrichment.hpp"
#include "ufem/problems.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <stdexcept>

namespace ufem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Unknowns are ordered FEM nodes first, then enrichment DOFs.
struct BlockLinearSystem {
    SparseMatrix K;
    Eigen::VectorXd F;
    /// Mean functional m_i = integral of the i-th basis function.
    Eigen::VectorXd mean;
    int n_fem = 0;
    int n_enr = 0;

    int size() const { return n_fem + n_enr; }
    SparseMatrix K11() const { return K.topLeftCorner(n_fem, n_fem); }
    SparseMatrix K12() const { return K.topRightCorner(n_fem, n_enr); }
    SparseMatrix K22() const { return K.bottomRightCorner(n_enr, n_enr); }
};

struct QuadratureConfig {
    /// Extra Gauss points per direction on every cell, edge and interface piece.
    int bump = 0;
};

class NonFiniteEntry : public std::runtime_error {
public:
    NonFiniteEntry(int cell, const std::string& what);
    int cell() const { return cell_; }

private:
    int cell_;
};

BlockLinearSystem assemble(const EnrichmentSpace& space, const ManufacturedProblem& prob,
                           const QuadratureConfig& quad = {});

struct ScaledSystem {
    SparseMatrix K;        // D K D
    Eigen::VectorXd F;     // D F
    Eigen::VectorXd mean;  // D m
    Eigen::VectorXd D;
};

/// D_ii = K_ii^{-1/2}.  Throws std::domain_error naming the first DOF with
/// a nonpositive diagonal.
ScaledSystem jacobi_scale(const BlockLinearSystem& sys);

/// K' = T^T K T, F' = T^T F, m' = T^T m with T acting on the enrichment
/// DOFs only (FEM part is the identity).
BlockLinearSystem transform_enrichment(const BlockLinearSystem& sys, const SparseMatrix& T_enr);

/// Block-diagonal map built from the retained LPCA components of every
/// enrichment block; `dropped` receives the number of removed components.
SparseMatrix lpca_transform(const BlockLinearSystem& sys, const EnrichmentSpace& space, double xi,
                            int* dropped = nullptr);

/// Coordinate text dump, one "row col value" line per stored entry.
void dump_matrix(const SparseMatrix& K, std::ostream& os);

}  // namespace ufem
