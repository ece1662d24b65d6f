#include "ufem/assembly.hpp"

#include "ufem/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace ufem {

NonFiniteEntry::NonFiniteEntry(int cell, const std::string& what) : std::runtime_error(what), cell_(cell) {}

namespace {

using Triplet = Eigen::Triplet<double>;

/// Gathers basis values on one cell: FEM shape functions followed by the
/// enrichment functions active there.
class CellEvaluator {
public:
    CellEvaluator(const EnrichmentSpace& space)
        : space_(space), mesh_(space.mesh()), lag_(BasisKind::Lagrange, space.mesh().degree())
    {
    }

    void set_cell(int c)
    {
        cell_ = c;
        fem_nodes_ = mesh_.cell_nodes(c);
    }

    void eval(Point2 x, Side side)
    {
        const Point2 st = mesh_.to_reference(cell_, x);
        lag_.eval_all(st.x, st.y, fv_, &fg_);
        space_.eval_cell(cell_, x, side, enr_);
        const double scale = static_cast<double>(mesh_.n());
        const std::size_t nf = fem_nodes_.size();
        dofs.resize(nf + enr_.dofs.size());
        values.resize(dofs.size());
        grads.resize(dofs.size());
        const int n_fem = mesh_.num_nodes();
        for (std::size_t k = 0; k < nf; ++k) {
            dofs[k] = fem_nodes_[k];
            values[k] = fv_[k];
            grads[k] = fg_[k] * scale;
        }
        for (std::size_t k = 0; k < enr_.dofs.size(); ++k) {
            dofs[nf + k] = n_fem + enr_.dofs[k];
            values[nf + k] = enr_.values[k];
            grads[nf + k] = enr_.grads[k];
        }
    }

    std::vector<int> dofs;
    std::vector<double> values;
    std::vector<Vec2> grads;

private:
    const EnrichmentSpace& space_;
    const QuadMesh& mesh_;
    ReferenceBasis lag_;
    int cell_ = -1;
    std::vector<int> fem_nodes_;
    std::vector<double> fv_;
    std::vector<Vec2> fg_;
    CellValues enr_;
};

void check_finite(const Eigen::MatrixXd& Ke, const Eigen::VectorXd& Fe, int cell)
{
    if (!Ke.allFinite() || !Fe.allFinite()) {
        throw NonFiniteEntry(cell, "non-finite element contribution on cell " + std::to_string(cell));
    }
}

}  // namespace

BlockLinearSystem assemble(const EnrichmentSpace& space, const ManufacturedProblem& prob,
                           const QuadratureConfig& quad)
{
    const QuadMesh& mesh = space.mesh();
    const CellClassification& cls = space.classification();
    const InterfaceGeometry& geom = space.geometry();
    const int p = mesh.degree();

    BlockLinearSystem sys;
    sys.n_fem = mesh.num_nodes();
    sys.n_enr = space.size();
    const int n = sys.size();
    sys.F = Eigen::VectorXd::Zero(n);
    sys.mean = Eigen::VectorXd::Zero(n);

    std::vector<Triplet> trip;
    CellEvaluator ev(space);

    // Dofs on a cell are fixed, so element arrays can be sized once per cell.
    Eigen::MatrixXd Ke;
    Eigen::VectorXd Fe, Me;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        ev.set_cell(c);
        bool first = true;
        std::vector<int> dofs;
        const bool enriched = !space.active_blocks(c).empty();
        for (const auto& rule : cell_rule(mesh, cls, geom, c, p, quad.bump, enriched)) {
            const double kappa = prob.kappa(rule.side);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                ev.eval(rule.points[q], rule.side);
                if (first) {
                    dofs = ev.dofs;
                    const auto m = static_cast<Eigen::Index>(dofs.size());
                    Ke = Eigen::MatrixXd::Zero(m, m);
                    Fe = Eigen::VectorXd::Zero(m);
                    Me = Eigen::VectorXd::Zero(m);
                    first = false;
                }
                const double w = rule.weights[q];
                const double f = prob.f(rule.points[q], rule.side);
                const auto m = static_cast<Eigen::Index>(dofs.size());
                for (Eigen::Index a = 0; a < m; ++a) {
                    const auto ua = static_cast<std::size_t>(a);
                    const Vec2 ga = ev.grads[ua] * (kappa * w);
                    for (Eigen::Index b = a; b < m; ++b) {
                        Ke(a, b) += ga.dot(ev.grads[static_cast<std::size_t>(b)]);
                    }
                    Fe[a] += w * f * ev.values[ua];
                    Me[a] += w * ev.values[ua];
                }
            }
        }
        if (first) continue;

        // interface jump term
        if (cls.is_cut[static_cast<std::size_t>(c)] && cls.topology[static_cast<std::size_t>(c)]) {
            const QuadRule ir =
                interface_rule(geom, *cls.topology[static_cast<std::size_t>(c)], enriched_order(p, quad.bump));
            for (std::size_t q = 0; q < ir.size(); ++q) {
                ev.eval(ir.points[q], Side::Omega0);
                const double qv = prob.q(ir.points[q]);
                for (std::size_t a = 0; a < dofs.size(); ++a) {
                    Fe[static_cast<Eigen::Index>(a)] += ir.weights[q] * qv * ev.values[a];
                }
            }
        }

        const auto m = static_cast<Eigen::Index>(dofs.size());
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = 0; b < a; ++b) Ke(a, b) = Ke(b, a);
        }
        check_finite(Ke, Fe, c);
        for (Eigen::Index a = 0; a < m; ++a) {
            const int ga = dofs[static_cast<std::size_t>(a)];
            sys.F[ga] += Fe[a];
            sys.mean[ga] += Me[a];
            for (Eigen::Index b = 0; b < m; ++b) {
                if (Ke(a, b) != 0.0) trip.emplace_back(ga, dofs[static_cast<std::size_t>(b)], Ke(a, b));
            }
        }
    }

    // Neumann boundary term
    for (const auto& edge : boundary_edges(mesh)) {
        ev.set_cell(edge.cell);
        const int n = space.active_blocks(edge.cell).empty() ? p + 2 + quad.bump : enriched_order(p, quad.bump);
        for (const auto& rule : boundary_rule(geom, edge, n)) {
            for (std::size_t q = 0; q < rule.size(); ++q) {
                ev.eval(rule.points[q], rule.side);
                const double g = prob.g(rule.points[q], rule.side, edge.normal);
                if (!std::isfinite(g)) {
                    throw NonFiniteEntry(edge.cell, "non-finite boundary datum on cell " + std::to_string(edge.cell));
                }
                for (std::size_t a = 0; a < ev.dofs.size(); ++a) {
                    sys.F[ev.dofs[a]] += rule.weights[q] * g * ev.values[a];
                }
            }
        }
    }

    sys.K.resize(n, n);
    sys.K.setFromTriplets(trip.begin(), trip.end());
    sys.K.makeCompressed();
    return sys;
}

ScaledSystem jacobi_scale(const BlockLinearSystem& sys)
{
    ScaledSystem out;
    const Eigen::VectorXd diag = sys.K.diagonal();
    out.D.resize(diag.size());
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag[i] > 0.0)) {
            throw std::domain_error("jacobi_scale: nonpositive diagonal at DOF " + std::to_string(i));
        }
        out.D[i] = 1.0 / std::sqrt(diag[i]);
    }
    out.K = out.D.asDiagonal() * sys.K * out.D.asDiagonal();
    out.F = out.D.cwiseProduct(sys.F);
    out.mean = out.D.cwiseProduct(sys.mean);
    return out;
}

BlockLinearSystem transform_enrichment(const BlockLinearSystem& sys, const SparseMatrix& T_enr)
{
    if (T_enr.rows() != sys.n_enr) {
        throw std::invalid_argument("transform_enrichment: transform does not match the enrichment size");
    }
    const int n_new = sys.n_fem + static_cast<int>(T_enr.cols());
    std::vector<Triplet> trip;
    for (int i = 0; i < sys.n_fem; ++i) trip.emplace_back(i, i, 1.0);
    for (int k = 0; k < T_enr.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(T_enr, k); it; ++it) {
            trip.emplace_back(sys.n_fem + static_cast<int>(it.row()), sys.n_fem + static_cast<int>(it.col()),
                              it.value());
        }
    }
    SparseMatrix T(sys.size(), n_new);
    T.setFromTriplets(trip.begin(), trip.end());

    BlockLinearSystem out;
    out.n_fem = sys.n_fem;
    out.n_enr = static_cast<int>(T_enr.cols());
    out.K = SparseMatrix(T.transpose() * sys.K * T);
    out.K.makeCompressed();
    out.F = T.transpose() * sys.F;
    out.mean = T.transpose() * sys.mean;
    return out;
}

SparseMatrix lpca_transform(const BlockLinearSystem& sys, const EnrichmentSpace& space, double xi, int* dropped)
{
    const SparseMatrix K22 = sys.K22();
    std::vector<Eigen::MatrixXd> blocks;
    for (const auto& blk : space.blocks()) {
        const Eigen::MatrixXd full = Eigen::MatrixXd(K22.block(blk.first_dof, blk.first_dof, blk.n_out(), blk.n_out()));
        blocks.push_back(full);
    }
    const auto kept = lpca_condense(blocks, xi);

    std::vector<Triplet> trip;
    int col = 0;
    int removed = 0;
    for (std::size_t b = 0; b < kept.size(); ++b) {
        const auto& V = kept[b];
        const int first = space.blocks()[b].first_dof;
        for (Eigen::Index j = 0; j < V.cols(); ++j, ++col) {
            for (Eigen::Index i = 0; i < V.rows(); ++i) {
                if (V(i, j) != 0.0) trip.emplace_back(first + static_cast<int>(i), col, V(i, j));
            }
        }
        removed += static_cast<int>(V.rows() - V.cols());
    }
    SparseMatrix T(sys.n_enr, col);
    T.setFromTriplets(trip.begin(), trip.end());
    if (dropped) *dropped = removed;
    return T;
}

void dump_matrix(const SparseMatrix& K, std::ostream& os)
{
    const auto old = os.precision(17);
    for (int k = 0; k < K.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(K, k); it; ++it) {
            os << it.row() << ' ' << it.col() << ' ' << std::setprecision(17) << it.value() << '\n';
        }
    }
    os.precision(old);
}

}  // namespace ufem
