#pragma once

#include "ufem/geometry.hpp"
#include "ufem/mesh.hpp"

#include <array>
#include <vector>

namespace ufem {

/// Points in physical coordinates with positive weights (area or length).
struct QuadRule {
    std::vector<Point2> points;
    std::vector<double> weights;
    Side side = Side::Omega0;

    std::size_t size() const { return weights.size(); }
    bool empty() const { return weights.empty(); }
    double measure() const;
    void append(Point2 x, double w)
    {
        points.push_back(x);
        weights.push_back(w);
    }
};

struct Rule1D {
    std::vector<double> nodes;    // in (0, 1)
    std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule on [0,1], exact for degree 2n-1.
const Rule1D& gauss_rule(int n);

/// Tensor Gauss rule on a box.
QuadRule box_rule(const Box& box, int n, Side side);

/// Points per direction for integrands that carry enrichment functions.
inline int enriched_order(int p, int bump) { return 2 * p + 3 + bump; }

/// Per-side rules on one cell, indexed by side_index().  An uncut cell gets
/// (p+2+bump)^2 points in the slot of its side, or enriched_order(p, bump)
/// per direction when `enriched`.  A cut cell is integrated by splitting
/// each axis-parallel line at its interface crossings with
/// enriched_order(p, bump) points per direction and sub-interval.
std::array<QuadRule, 2> cell_rule(const QuadMesh& mesh, const CellClassification& cls,
                                  const InterfaceGeometry& geom, int cell, int p, int bump = 0,
                                  bool enriched = false);

/// Side-split rules for an arbitrary box cut by the interface, `n` points per
/// direction and sub-interval.
std::array<QuadRule, 2> cut_box_rule(const InterfaceGeometry& geom, const Box& box, int n);

/// Arc-length rule along the interface inside a cut cell (n points per piece).
QuadRule interface_rule(const InterfaceGeometry& geom, const CutTopology& topo, int n);

/// One boundary edge of the unit square carried by a cell.
struct BoundaryEdge {
    int cell = -1;
    Point2 a, b;
    Vec2 normal;  // outward unit normal of the unit square
};

std::vector<BoundaryEdge> boundary_edges(const QuadMesh& mesh);

/// Gauss rule along a boundary edge, split at interface crossings; one
/// rule per sub-segment tagged with its side.
std::vector<QuadRule> boundary_rule(const InterfaceGeometry& geom, const BoundaryEdge& edge, int n);

}  // namespace ufem
