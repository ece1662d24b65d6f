#include "ufem/mesh.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace ufem {

QuadMesh::QuadMesh(int n, int p) : n_(n), p_(p)
{
    if (n < 2) throw std::invalid_argument("build_mesh: N must be at least 2");
    if (p < 1 || p > 5) throw std::invalid_argument("build_mesh: degree must be in [1, 5]");
}

QuadMesh build_mesh(int n, int p) { return QuadMesh(n, p); }

Box QuadMesh::cell_box(int c) const
{
    const int i = cell_i(c), j = cell_j(c);
    const double hh = h();
    return {i * hh, (i + 1) * hh, j * hh, (j + 1) * hh};
}

Point2 QuadMesh::vertex(int v) const
{
    const int i = v % (n_ + 1), j = v / (n_ + 1);
    return {static_cast<double>(i) / n_, static_cast<double>(j) / n_};
}

std::array<int, 4> QuadMesh::cell_vertices(int c) const
{
    const int i = cell_i(c), j = cell_j(c);
    return {vertex_id(i, j), vertex_id(i + 1, j), vertex_id(i, j + 1), vertex_id(i + 1, j + 1)};
}

std::vector<int> QuadMesh::vertex_cells(int v) const
{
    const int vi = v % (n_ + 1), vj = v / (n_ + 1);
    std::vector<int> out;
    for (int dj = -1; dj <= 0; ++dj) {
        for (int di = -1; di <= 0; ++di) {
            const int i = vi + di, j = vj + dj;
            if (i >= 0 && i < n_ && j >= 0 && j < n_) out.push_back(cell_id(i, j));
        }
    }
    return out;
}

int QuadMesh::node_id(int c, int a, int b) const
{
    const int gi = cell_i(c) * p_ + a;
    const int gj = cell_j(c) * p_ + b;
    return gj * nodes_per_side() + gi;
}

Point2 QuadMesh::node(int g) const
{
    const int m = nodes_per_side();
    const int gi = g % m, gj = g / m;
    const double step = 1.0 / (static_cast<double>(p_) * n_);
    return {gi * step, gj * step};
}

std::vector<int> QuadMesh::cell_nodes(int c) const
{
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(nodes_per_cell()));
    for (int b = 0; b <= p_; ++b) {
        for (int a = 0; a <= p_; ++a) out.push_back(node_id(c, a, b));
    }
    return out;
}

std::vector<int> QuadMesh::vertex_neighbors(int c) const
{
    std::vector<int> out;
    const int i = cell_i(c), j = cell_j(c);
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const int ii = i + di, jj = j + dj;
            if (ii >= 0 && ii < n_ && jj >= 0 && jj < n_) out.push_back(cell_id(ii, jj));
        }
    }
    return out;
}

Point2 QuadMesh::to_reference(int c, Point2 x) const
{
    const Box b = cell_box(c);
    return {(x.x - b.x0) * n_, (x.y - b.y0) * n_};
}

Point2 QuadMesh::from_reference(int c, Point2 st) const
{
    const Box b = cell_box(c);
    return {b.x0 + st.x * h(), b.y0 + st.y * h()};
}

CellClassification classify_cells(const QuadMesh& mesh, const InterfaceGeometry& geom)
{
    CellClassification cls;
    const int nc = mesh.num_cells();
    const int samples = 2 * mesh.degree() + 2;
    cls.is_cut.assign(static_cast<std::size_t>(nc), 0);
    cls.is_near.assign(static_cast<std::size_t>(nc), 0);
    cls.topology.resize(static_cast<std::size_t>(nc));
    cls.cell_side.assign(static_cast<std::size_t>(nc), Side::Omega0);
    cls.vertex_is_cut.assign(static_cast<std::size_t>(mesh.num_vertices()), 0);

    for (int c = 0; c < nc; ++c) {
        cls.all_cells.push_back(c);
        const Box box = mesh.cell_box(c);
        auto topo = geom.intersect_cell(box, c, samples);
        if (topo) {
            cls.is_cut[static_cast<std::size_t>(c)] = 1;
            cls.cut_cells.push_back(c);
            cls.topology[static_cast<std::size_t>(c)] = std::move(topo);
        } else {
            cls.cell_side[static_cast<std::size_t>(c)] = geom.classify(box.centroid());
        }
    }

    std::set<int> near;
    for (int c : cls.cut_cells) {
        near.insert(c);
        for (int nb : mesh.vertex_neighbors(c)) near.insert(nb);
    }
    cls.near_cells.assign(near.begin(), near.end());
    for (int c : cls.near_cells) cls.is_near[static_cast<std::size_t>(c)] = 1;

    auto collect = [&](const std::vector<int>& cells, std::vector<int>& nodes,
                       std::vector<int>& verts) {
        std::set<int> ns, vs;
        for (int c : cells) {
            for (int g : mesh.cell_nodes(c)) ns.insert(g);
            for (int v : mesh.cell_vertices(c)) vs.insert(v);
        }
        nodes.assign(ns.begin(), ns.end());
        verts.assign(vs.begin(), vs.end());
    };
    collect(cls.cut_cells, cls.cut_nodes, cls.cut_vertices);
    collect(cls.near_cells, cls.near_nodes, cls.near_vertices);
    for (int v : cls.cut_vertices) cls.vertex_is_cut[static_cast<std::size_t>(v)] = 1;
    return cls;
}

}  // namespace ufem
