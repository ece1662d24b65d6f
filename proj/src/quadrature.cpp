#include "ufem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>

namespace ufem {

namespace {

constexpr int kMaxGauss = 40;

Rule1D compute_gauss(int n)
{
    Rule1D r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev guess, on [-1, 1].
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map to [0,1], ascending order
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
        r.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
    return r;
}

const std::vector<Rule1D>& gauss_table()
{
    static const std::vector<Rule1D> table = [] {
        std::vector<Rule1D> t(kMaxGauss + 1);
        for (int n = 1; n <= kMaxGauss; ++n) t[static_cast<std::size_t>(n)] = compute_gauss(n);
        return t;
    }();
    return table;
}

// Outer-interval node in [a, b]; clustering substitutions remove the square-root
// behaviour of the crossing positions next to a turning point.
struct OuterNode {
    double u;
    double w;
};

std::vector<OuterNode> outer_nodes(double a, double b, bool turn_a, bool turn_b, int n)
{
    std::vector<OuterNode> out;
    if (turn_a && turn_b) {
        const double m = 0.5 * (a + b);
        auto left = outer_nodes(a, m, true, false, n);
        auto right = outer_nodes(m, b, false, true, n);
        left.insert(left.end(), right.begin(), right.end());
        return left;
    }
    const auto& g = gauss_rule(n);
    const double len = b - a;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        const double t = g.nodes[k];
        if (turn_b) {
            out.push_back({b - len * (1.0 - t) * (1.0 - t), g.weights[k] * 2.0 * len * (1.0 - t)});
        } else if (turn_a) {
            out.push_back({a + len * t * t, g.weights[k] * 2.0 * len * t});
        } else {
            out.push_back({a + len * t, g.weights[k] * len});
        }
    }
    return out;
}

int choose_inner_axis(const InterfaceGeometry& geom, const Box& box)
{
    auto topo = geom.intersect_cell(box, -1, 1);
    Vec2 n{0.0, 1.0};
    if (topo && !topo->pieces.empty()) {
        // normal at the middle of the longest piece
        const InterfacePiece* best = &topo->pieces.front();
        double best_len = -1.0;
        for (const auto& p : topo->pieces) {
            const double len = p.is_arc ? p.theta_b - p.theta_a : (p.b - p.a).norm();
            if (len > best_len) {
                best_len = len;
                best = &p;
            }
        }
        Point2 mid;
        if (best->is_arc) {
            const auto& c = std::get<CircleInterface>(geom.shape());
            const double t = 0.5 * (best->theta_a + best->theta_b);
            mid = {c.center.x + c.radius * std::cos(t), c.center.y + c.radius * std::sin(t)};
        } else {
            mid = (best->a + best->b) * 0.5;
        }
        n = geom.offset_gradient(mid);
    }
    return std::abs(n.y) >= std::abs(n.x) ? 1 : 0;
}

/// Distance from `c` to the closed box.
double box_distance(const Box& box, Point2 c)
{
    const double dx = std::max({box.x0 - c.x, 0.0, c.x - box.x1});
    const double dy = std::max({box.y0 - c.y, 0.0, c.y - box.y1});
    return std::hypot(dx, dy);
}

/// Two collapsed (Duffy) squares covering the box [c, c + a] x [c, c + b],
/// which make |x - c| smooth in the mapped coordinates.
void append_duffy(QuadRule& r, Point2 c, Vec2 a, Vec2 b, int n)
{
    const auto& g = gauss_rule(n);
    const double jac = std::abs(a.x * b.y);
    if (jac == 0.0) return;
    for (int tri = 0; tri < 2; ++tri) {
        const Vec2 e1 = tri == 0 ? a : b, e2 = tri == 0 ? b : a;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            for (std::size_t j = 0; j < g.nodes.size(); ++j) {
                const double u = g.nodes[i], v = g.nodes[j];
                r.append(c + e1 * u + e2 * (u * v), g.weights[i] * g.weights[j] * jac * u);
            }
        }
    }
}

void append_graded(QuadRule& r, const Box& box, Point2 c, int n, int depth);

/// Quarters of `box` around the cone point `c`.  The square of each quarter
/// touching `c` gets Duffy squares; the elongated remainder is graded.
void append_cone(QuadRule& r, const Box& box, Point2 c, int n, int depth)
{
    const double xs[2] = {box.x0, box.x1}, ys[2] = {box.y0, box.y1};
    for (double qx : xs) {
        for (double qy : ys) {
            const double w = std::abs(qx - c.x), h = std::abs(qy - c.y);
            if (w == 0.0 || h == 0.0) continue;
            const double side = std::min(w, h);
            const double sx = qx > c.x ? 1.0 : -1.0, sy = qy > c.y ? 1.0 : -1.0;
            append_duffy(r, c, {sx * side, 0.0}, {0.0, sy * side}, n);
            if (w > h) {
                const double x0 = c.x + sx * side;
                append_graded(r, {std::min(x0, qx), std::max(x0, qx), std::min(c.y, qy), std::max(c.y, qy)}, c, n, depth);
            } else if (h > w) {
                const double y0 = c.y + sy * side;
                append_graded(r, {std::min(c.x, qx), std::max(c.x, qx), std::min(y0, qy), std::max(y0, qy)}, c, n, depth);
            }
        }
    }
}

/// Quadtree refinement toward a cone point at `c`: boxes at least one
/// diameter away get a tensor rule, a box holding `c` is split around it.
void append_graded(QuadRule& r, const Box& box, Point2 c, int n, int depth)
{
    const bool inside = box.x0 < c.x && c.x < box.x1 && box.y0 < c.y && c.y < box.y1;
    if (inside) {
        append_cone(r, box, c, n, depth);
        return;
    }
    if (depth == 0 || box_distance(box, c) >= box.diameter()) {
        const QuadRule q = box_rule(box, n, r.side);
        r.points.insert(r.points.end(), q.points.begin(), q.points.end());
        r.weights.insert(r.weights.end(), q.weights.begin(), q.weights.end());
        return;
    }
    const double xm = 0.5 * (box.x0 + box.x1), ym = 0.5 * (box.y0 + box.y1);
    for (const Box& child : {Box{box.x0, xm, box.y0, ym}, Box{xm, box.x1, box.y0, ym}, Box{box.x0, xm, ym, box.y1},
                             Box{xm, box.x1, ym, box.y1}}) {
        append_graded(r, child, c, n, depth - 1);
    }
}

/// Cells within this many cell diameters of a cone point are graded.
constexpr double kConeReach = 1.0;
constexpr int kConeDepth = 8;

}  // namespace

double QuadRule::measure() const
{
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

const Rule1D& gauss_rule(int n)
{
    if (n < 1 || n > kMaxGauss) throw std::invalid_argument("gauss_rule: n out of range");
    return gauss_table()[static_cast<std::size_t>(n)];
}

QuadRule box_rule(const Box& box, int n, Side side)
{
    const auto& g = gauss_rule(n);
    QuadRule r;
    r.side = side;
    r.points.reserve(static_cast<std::size_t>(n * n));
    r.weights.reserve(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto ii = static_cast<std::size_t>(i), jj = static_cast<std::size_t>(j);
            r.append({box.x0 + g.nodes[ii] * box.width(), box.y0 + g.nodes[jj] * box.height()},
                     g.weights[ii] * g.weights[jj] * box.area());
        }
    }
    return r;
}

std::array<QuadRule, 2> cut_box_rule(const InterfaceGeometry& geom, const Box& box, int n)
{
    std::array<QuadRule, 2> rules;
    rules[0].side = Side::Omega0;
    rules[1].side = Side::Omega1;

    const int inner = choose_inner_axis(geom, box);
    const int outer = 1 - inner;
    const double u0 = box.lo(outer), u1 = box.hi(outer);
    const double v0 = box.lo(inner), v1 = box.hi(inner);
    const double tiny = 1e-15 * box.diameter();

    struct Break {
        double u;
        bool turning;
    };
    std::vector<Break> breaks{{u0, false}, {u1, false}};
    for (double v : {v0, v1}) {
        for (double u : geom.crossings(outer, v, u0, u1)) breaks.push_back({u, false});
    }
    if (const auto* c = std::get_if<CircleInterface>(&geom.shape())) {
        const double cv = inner == 0 ? c->center.x : c->center.y;
        if (cv > v0 && cv < v1) {
            for (double u : geom.turning_points(outer, u0, u1)) breaks.push_back({u, true});
        }
    }
    std::sort(breaks.begin(), breaks.end(), [](const Break& a, const Break& b) { return a.u < b.u; });

    const auto& g = gauss_rule(n);
    std::vector<double> cuts;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k].u, b = breaks[k + 1].u;
        if (b - a <= tiny) continue;
        for (const auto& on : outer_nodes(a, b, breaks[k].turning, breaks[k + 1].turning, n)) {
            cuts = geom.crossings(inner, on.u, v0, v1);
            cuts.insert(cuts.begin(), v0);
            cuts.push_back(v1);
            for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
                const double va = cuts[s], vb = cuts[s + 1];
                const double len = vb - va;
                if (len <= tiny) continue;
                const double vm = 0.5 * (va + vb);
                const Point2 mid = inner == 1 ? Point2{on.u, vm} : Point2{vm, on.u};
                auto& rule = rules[static_cast<std::size_t>(side_index(geom.classify(mid)))];
                for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                    const double v = va + g.nodes[q] * len;
                    const Point2 x = inner == 1 ? Point2{on.u, v} : Point2{v, on.u};
                    rule.append(x, on.w * g.weights[q] * len);
                }
            }
        }
    }
    return rules;
}

std::array<QuadRule, 2> cell_rule(const QuadMesh& mesh, const CellClassification& cls,
                                  const InterfaceGeometry& geom, int cell, int p, int bump, bool enriched)
{
    const Box box = mesh.cell_box(cell);
    if (!cls.is_cut[static_cast<std::size_t>(cell)]) {
        std::array<QuadRule, 2> rules;
        const Side s = cls.cell_side[static_cast<std::size_t>(cell)];
        rules[0].side = Side::Omega0;
        rules[1].side = Side::Omega1;
        auto& rule = rules[static_cast<std::size_t>(side_index(s))];
        const auto* circle = std::get_if<CircleInterface>(&geom.shape());
        if (enriched && circle &&
            box_distance(box, circle->center) < kConeReach * box.diameter()) {
            rule.side = s;
            append_graded(rule, box, circle->center, enriched_order(p, bump), kConeDepth);
        } else {
            rule = box_rule(box, enriched ? enriched_order(p, bump) : p + 2 + bump, s);
        }
        return rules;
    }
    auto rules = cut_box_rule(geom, box, enriched_order(p, bump));
    const double min_measure = 1e-14 * box.area();
    for (auto& r : rules) {
        if (!r.empty() && r.measure() < min_measure) {
            r.points.clear();
            r.weights.clear();
        }
    }
    return rules;
}

QuadRule interface_rule(const InterfaceGeometry& geom, const CutTopology& topo, int n)
{
    QuadRule r;
    const auto& g = gauss_rule(n);
    for (const auto& piece : topo.pieces) {
        if (piece.is_arc) {
            const auto& c = std::get<CircleInterface>(geom.shape());
            const double dt = piece.theta_b - piece.theta_a;
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double t = piece.theta_a + g.nodes[q] * dt;
                r.append({c.center.x + c.radius * std::cos(t), c.center.y + c.radius * std::sin(t)},
                         g.weights[q] * dt * c.radius);
            }
        } else {
            const double len = (piece.b - piece.a).norm();
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                r.append(piece.a + (piece.b - piece.a) * g.nodes[q], g.weights[q] * len);
            }
        }
    }
    return r;
}

std::vector<BoundaryEdge> boundary_edges(const QuadMesh& mesh)
{
    std::vector<BoundaryEdge> edges;
    const int n = mesh.n();
    for (int i = 0; i < n; ++i) {
        const Box bottom = mesh.cell_box(mesh.cell_id(i, 0));
        edges.push_back({mesh.cell_id(i, 0), {bottom.x0, 0.0}, {bottom.x1, 0.0}, {0.0, -1.0}});
        const Box top = mesh.cell_box(mesh.cell_id(i, n - 1));
        edges.push_back({mesh.cell_id(i, n - 1), {top.x0, 1.0}, {top.x1, 1.0}, {0.0, 1.0}});
        const Box left = mesh.cell_box(mesh.cell_id(0, i));
        edges.push_back({mesh.cell_id(0, i), {0.0, left.y0}, {0.0, left.y1}, {-1.0, 0.0}});
        const Box right = mesh.cell_box(mesh.cell_id(n - 1, i));
        edges.push_back({mesh.cell_id(n - 1, i), {1.0, right.y0}, {1.0, right.y1}, {1.0, 0.0}});
    }
    return edges;
}

std::vector<QuadRule> boundary_rule(const InterfaceGeometry& geom, const BoundaryEdge& edge, int n)
{
    const int axis = (edge.a.y == edge.b.y) ? 0 : 1;
    const double fixed = axis == 0 ? edge.a.y : edge.a.x;
    const double lo = axis == 0 ? edge.a.x : edge.a.y;
    const double hi = axis == 0 ? edge.b.x : edge.b.y;
    std::vector<double> cuts = geom.crossings(axis, fixed, lo, hi);
    cuts.insert(cuts.begin(), lo);
    cuts.push_back(hi);

    const auto& g = gauss_rule(n);
    std::vector<QuadRule> rules;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        if (b - a <= 1e-15) continue;
        auto at = [&](double t) { return axis == 0 ? Point2{t, fixed} : Point2{fixed, t}; };
        QuadRule r;
        r.side = geom.classify(at(0.5 * (a + b)));
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            r.append(at(a + g.nodes[q] * (b - a)), g.weights[q] * (b - a));
        }
        rules.push_back(std::move(r));
    }
    return rules;
}

}  // namespace ufem
