#pragma once

#include "ufem/geometry.hpp"

#include <optional>
#include <vector>

namespace ufem {

/// Uniform N x N partition of the unit square carrying a tensor Lagrange
/// node grid of order p.  Cells, vertices and FE nodes are numbered
/// lexicographically (x fastest).
class QuadMesh {
public:
    QuadMesh(int n, int p);

    int n() const { return n_; }
    int degree() const { return p_; }
    double h() const { return 1.0 / n_; }

    int num_cells() const { return n_ * n_; }
    int num_vertices() const { return (n_ + 1) * (n_ + 1); }
    int nodes_per_side() const { return p_ * n_ + 1; }
    int num_nodes() const { return nodes_per_side() * nodes_per_side(); }
    int nodes_per_cell() const { return (p_ + 1) * (p_ + 1); }

    int cell_id(int i, int j) const { return j * n_ + i; }
    int cell_i(int c) const { return c % n_; }
    int cell_j(int c) const { return c / n_; }
    Box cell_box(int c) const;
    Point2 centroid(int c) const { return cell_box(c).centroid(); }

    int vertex_id(int i, int j) const { return j * (n_ + 1) + i; }
    Point2 vertex(int v) const;
    /// Vertices of cell c in the order (0,0), (1,0), (0,1), (1,1).
    std::array<int, 4> cell_vertices(int c) const;
    /// Cells (up to 4) sharing vertex v.
    std::vector<int> vertex_cells(int v) const;

    /// Global FE node of local tensor index (a, b), a, b in [0, p].
    int node_id(int c, int a, int b) const;
    Point2 node(int g) const;
    /// All nodes of cell c, local index a + (p+1) b.
    std::vector<int> cell_nodes(int c) const;

    /// Cells sharing at least a vertex with c (excluding c).
    std::vector<int> vertex_neighbors(int c) const;

    /// Reference coordinates of x in cell c.
    Point2 to_reference(int c, Point2 x) const;
    Point2 from_reference(int c, Point2 st) const;

private:
    int n_;
    int p_;
};

QuadMesh build_mesh(int n, int p);

struct CellClassification {
    std::vector<int> all_cells;       // I_el
    std::vector<int> cut_cells;       // I0_el
    std::vector<int> near_cells;      // I1_el (cut cells and vertex-neighbors)
    std::vector<int> cut_nodes;       // I0_n
    std::vector<int> near_nodes;      // I1_n
    std::vector<int> cut_vertices;    // I0_v
    std::vector<int> near_vertices;   // I1_v

    std::vector<char> is_cut;         // per cell
    std::vector<char> is_near;        // per cell
    std::vector<char> vertex_is_cut;  // per vertex, member of I0_v
    std::vector<std::optional<CutTopology>> topology;  // per cell

    /// Side of an uncut cell (meaningless for cut cells).
    std::vector<Side> cell_side;
};

CellClassification classify_cells(const QuadMesh& mesh, const InterfaceGeometry& geom);

}  // namespace ufem
