#pragma once

#include "ufem/basis.hpp"
#include "ufem/geometry.hpp"
#include "ufem/mesh.hpp"

#include <Eigen/Core>
#include <string>
#include <vector>

namespace ufem {

enum class SchemeKind { FEM, GFEM, CGFEM, SGFEM, HoSGFEM };
enum class Orthogonalize { Auto, On, Off };
enum class DistanceFlavor { OneSided, TwoSided };

std::string scheme_name(SchemeKind kind);
/// Accepts the lower-case names "fem", "gfem", "cgfem", "sgfem", "hosgfem".
SchemeKind parse_scheme(const std::string& name);

struct Scheme {
    SchemeKind kind = SchemeKind::HoSGFEM;
    /// LPCA threshold (SGFEM only).
    double lpca_xi = 1e-15;
    /// Local Gram-Schmidt (HoSGFEM only); Auto means p >= 2.
    Orthogonalize orthogonalize = Orthogonalize::Auto;
    /// Distance used by HoSGFEM.
    DistanceFlavor distance = DistanceFlavor::OneSided;

    bool uses_gram_schmidt(int p) const;
};

/// Element PU function attached to cut cell k.  Coefficients live on the
/// global Bernstein control grid, which coincides with the Lagrange node grid.
struct PUFunction {
    int cell = -1;
    std::vector<int> support;  // k and its vertex neighbours
    /// (p+1)^2 coefficients in cell k's own Bernstein basis, local index a + (p+1) b.
    std::vector<double> coeffs;

    /// Coefficients of phi_k restricted to cell e, in e's local Bernstein basis.
    std::vector<double> coefficients_on(const QuadMesh& mesh, int e) const;
};

std::vector<PUFunction> build_pu(const QuadMesh& mesh, const CellClassification& cls, int p);

/// max |sum_k phi_k - 1| over the quadrature points of every cut cell.
double pu_defect(const QuadMesh& mesh, const CellClassification& cls, const InterfaceGeometry& geom,
                 const std::vector<PUFunction>& pus);

/// R = sum of the bilinear hats of the vertices of cut cells.
class RampFunction {
public:
    RampFunction(const QuadMesh& mesh, const CellClassification& cls);

    double eval(Point2 x, Vec2* grad = nullptr) const;
    /// Value and reference gradient on cell c at reference point (s, t).
    double on_cell(int c, double s, double t, Vec2* grad_ref = nullptr) const;

private:
    QuadMesh mesh_;
    std::vector<char> enriched_;
};

RampFunction build_ramp(const QuadMesh& mesh, const CellClassification& cls);

enum class PUKind { Hat, Hermite, Bernstein };

struct EnrichedBasisFn {
    SchemeKind scheme = SchemeKind::FEM;
    PUKind pu = PUKind::Hat;
    int carrier = -1;  // vertex id, or cut-cell id for HoSGFEM
    int i = 0, j = 0;
    DistanceFlavor distance = DistanceFlavor::TwoSided;
    Point2 shift{0.0, 0.0};
    bool subtract_interpolant = false;
    bool ramp = false;
    int block = -1;
};

/// Functions sharing a carrier.  Final DOFs of the block are the columns of
/// `combo` applied to the raw functions.
struct EnrichmentBlock {
    int carrier = -1;
    std::vector<int> raw;      // indices into EnrichmentSpace::functions()
    std::vector<int> support;  // cells where the carrier PU is nonzero
    Eigen::MatrixXd combo;     // raw.size() x n_out
    int first_dof = 0;         // offset within the enrichment DOFs
    int n_out() const { return static_cast<int>(combo.cols()); }
};

/// Values and physical gradients of all enrichment DOFs active on one cell.
struct CellValues {
    std::vector<int> dofs;
    std::vector<double> values;
    std::vector<Vec2> grads;
};

class EnrichmentSpace {
public:
    EnrichmentSpace(const QuadMesh& mesh, const CellClassification& cls,
                    const InterfaceGeometry& geom, const Scheme& scheme);

    const Scheme& scheme() const { return scheme_; }
    const QuadMesh& mesh() const { return mesh_; }
    const InterfaceGeometry& geometry() const { return geom_; }
    const CellClassification& classification() const { return cls_; }

    int size() const { return n_dofs_; }
    int dropped() const { return dropped_; }
    const std::vector<EnrichedBasisFn>& functions() const { return fns_; }
    const std::vector<EnrichmentBlock>& blocks() const { return blocks_; }
    const std::vector<PUFunction>& pu_functions() const { return pus_; }

    /// Blocks whose support contains cell c.
    std::vector<int> active_blocks(int c) const;

    void eval_cell(int c, Point2 x, Side side, CellValues& out) const;
    /// Raw (uncombined) functions of one block at x in cell c.
    void eval_raw(int block, int c, Point2 x, Side side, std::vector<double>& values,
                  std::vector<Vec2>* grads = nullptr) const;
    /// Single final DOF at an arbitrary point, side taken from the geometry.
    double eval_dof(int dof, Point2 x, Vec2* grad = nullptr) const;

    /// Orthonormalize the block over its support (used for HoSGFEM).
    void orthogonalize_block(int block, double drop_tol = 1e-12);

private:
    struct LocalData {
        int block = -1;
        int corner = -1;                 // hat/Hermite: local vertex of the carrier
        std::vector<double> pu_coeffs;   // Bernstein PU on this cell
        Eigen::MatrixXd interp;          // nodes x raw: nodal values of the features
    };
    struct Scratch;

    void build_blocks(const CellClassification& cls);
    void precompute_local(const CellClassification& cls);
    void renumber();
    void feature(const EnrichedBasisFn& f, Point2 x, Side side, double& v, Vec2& g) const;
    void eval_local(const LocalData& ld, int c, Point2 x, Side side, Scratch& s,
                    std::vector<double>& values, std::vector<Vec2>* grads) const;
    const LocalData* find_local(int block, int c) const;

    QuadMesh mesh_;
    InterfaceGeometry geom_;
    CellClassification cls_;
    Scheme scheme_;
    int p_;
    std::vector<EnrichedBasisFn> fns_;
    std::vector<EnrichmentBlock> blocks_;
    std::vector<PUFunction> pus_;
    std::vector<std::vector<LocalData>> local_;  // per cell
    std::vector<char> ramp_corner_;               // per vertex
    std::vector<int> dof_block_;
    int n_dofs_ = 0;
    int dropped_ = 0;
};

EnrichmentSpace build_enrichment_space(const QuadMesh& mesh, const CellClassification& cls,
                                       const InterfaceGeometry& geom, const Scheme& scheme, int p);

struct GramSchmidtResult {
    Eigen::MatrixXd combo;  // n_in x n_out, columns give the orthonormal functions
    int dropped = 0;
};

/// Modified Gram-Schmidt in the discrete L2 inner product defined by the
/// sampled values (rows = quadrature points) and weights.
GramSchmidtResult gram_schmidt_local(const Eigen::MatrixXd& values, const Eigen::VectorXd& weights,
                                     double drop_tol = 1e-12);

/// Retained eigenvectors of each symmetric block: columns with
/// lambda_j / sum(lambda) >= xi.  xi <= 0 keeps every component.
std::vector<Eigen::MatrixXd> lpca_condense(const std::vector<Eigen::MatrixXd>& blocks, double xi);

}  // namespace ufem
