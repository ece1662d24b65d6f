#include "ufem/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace ufem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool strictly_inside(const Box& b, Point2 p)
{
    return p.x > b.x0 && p.x < b.x1 && p.y > b.y0 && p.y < b.y1;
}

// Contribution of the straight segment p -> q to (1/2) * closed integral of (x dy - y dx).
double green_segment(Point2 p, Point2 q) { return 0.5 * (p.x * q.y - p.y * q.x); }

double green_arc(const CircleInterface& c, double ta, double tb)
{
    const double r = c.radius;
    return 0.5 * (r * r * (tb - ta) + r * c.center.x * (std::sin(tb) - std::sin(ta))
                  - r * c.center.y * (std::cos(tb) - std::cos(ta)));
}

Point2 arc_point(const CircleInterface& c, double t)
{
    return {c.center.x + c.radius * std::cos(t), c.center.y + c.radius * std::sin(t)};
}

// Chebyshev points on (0,1), never the endpoints.
std::vector<double> sample_params(int n)
{
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        t[static_cast<std::size_t>(i)] =
            0.5 * (1.0 - std::cos(std::numbers::pi * (i + 0.5) / n));
    }
    return t;
}

}  // namespace

InterfaceGeometry::InterfaceGeometry(Shape shape) : shape_(std::move(shape))
{
    if (const auto* l = std::get_if<LineInterface>(&shape_)) {
        if (!(l->theta0 > -std::numbers::pi / 2 && l->theta0 < std::numbers::pi / 2)) {
            throw std::invalid_argument("line interface: theta0 must lie in (-pi/2, pi/2)");
        }
        anchor_ = {1.0 + l->beta, 1.0};
        dir_ = {std::cos(l->theta0), std::sin(l->theta0)};
    } else if (const auto* h = std::get_if<HLineInterface>(&shape_)) {
        anchor_ = {0.0, 0.5 + h->delta};
        dir_ = {1.0, 0.0};
    } else {
        const auto& c = std::get<CircleInterface>(shape_);
        if (!(c.radius > 0.0)) {
            throw std::invalid_argument("circle interface: radius must be positive");
        }
    }
    normal_ = {-dir_.y, dir_.x};
}

InterfaceGeometry InterfaceGeometry::line(double theta0, double beta)
{
    return InterfaceGeometry(LineInterface{theta0, beta});
}

InterfaceGeometry InterfaceGeometry::circle(Point2 center, double radius)
{
    return InterfaceGeometry(CircleInterface{center, radius});
}

InterfaceGeometry InterfaceGeometry::hline(double delta)
{
    return InterfaceGeometry(HLineInterface{delta});
}

InterfaceGeometry InterfaceGeometry::standard_line()
{
    return line(std::numbers::pi / 6.0, 1.0 / std::numbers::pi);
}

InterfaceGeometry InterfaceGeometry::standard_circle()
{
    return circle({1.0 / std::sqrt(5.0), 1.0 / std::sqrt(3.0)}, 1.0 / std::sqrt(10.0));
}

std::string InterfaceGeometry::tag() const
{
    if (std::holds_alternative<LineInterface>(shape_)) return "line";
    if (std::holds_alternative<HLineInterface>(shape_)) return "hline";
    return "circle";
}

double InterfaceGeometry::signed_offset(Point2 x) const
{
    if (const auto* c = std::get_if<CircleInterface>(&shape_)) {
        return (x - c->center).norm() - c->radius;
    }
    return (x - anchor_).dot(normal_);
}

Vec2 InterfaceGeometry::offset_gradient(Point2 x) const
{
    if (const auto* c = std::get_if<CircleInterface>(&shape_)) {
        const Vec2 v = x - c->center;
        const double n = v.norm();
        if (n == 0.0) return {1.0, 0.0};
        return v * (1.0 / n);
    }
    return normal_;
}

Side InterfaceGeometry::classify(Point2 x) const
{
    return signed_offset(x) <= kTieTolerance ? Side::Omega0 : Side::Omega1;
}

double InterfaceGeometry::one_sided_distance(Point2 x) const
{
    return classify(x) == Side::Omega0 ? distance(x) : 0.0;
}

Point2 InterfaceGeometry::closest_point(Point2 x) const
{
    if (const auto* c = std::get_if<CircleInterface>(&shape_)) {
        const Vec2 v = x - c->center;
        const double n = v.norm();
        if (n == 0.0) return c->center + Vec2{c->radius, 0.0};
        return c->center + v * (c->radius / n);
    }
    return x - normal_ * signed_offset(x);
}

std::pair<Vec2, Vec2> InterfaceGeometry::frame_at(Point2 y) const
{
    if (distance(y) > 1e-10) {
        throw std::invalid_argument("frame_at: point is not on the interface");
    }
    const Vec2 n = offset_gradient(y);
    return {n, Vec2{-n.y, n.x}};
}

double InterfaceGeometry::curvature_radius() const
{
    if (const auto* c = std::get_if<CircleInterface>(&shape_)) return c->radius;
    return std::numeric_limits<double>::infinity();
}

std::vector<double> InterfaceGeometry::crossings(int axis, double fixed, double lo,
                                                 double hi) const
{
    std::vector<double> roots;
    const int other = 1 - axis;
    auto comp = [](Point2 p, int a) { return a == 0 ? p.x : p.y; };

    if (const auto* c = std::get_if<CircleInterface>(&shape_)) {
        const double off = fixed - comp(c->center, other);
        const double disc = c->radius * c->radius - off * off;
        if (disc <= 0.0) return roots;
        const double s = std::sqrt(disc);
        for (double t : {comp(c->center, axis) - s, comp(c->center, axis) + s}) {
            if (t > lo && t < hi) roots.push_back(t);
        }
        return roots;
    }

    const double na = comp(normal_, axis);
    if (std::abs(na) < 1e-300) return roots;
    const double t = -(comp(normal_, other) * fixed - anchor_.dot(normal_)) / na;
    if (t > lo && t < hi) roots.push_back(t);
    return roots;
}

std::vector<double> InterfaceGeometry::turning_points(int outer_axis, double lo,
                                                      double hi) const
{
    std::vector<double> out;
    if (const auto* c = std::get_if<CircleInterface>(&shape_)) {
        const double cc = outer_axis == 0 ? c->center.x : c->center.y;
        for (double t : {cc - c->radius, cc + c->radius}) {
            if (t > lo && t < hi) out.push_back(t);
        }
    }
    return out;
}

std::vector<InterfacePiece> InterfaceGeometry::pieces_in(const Box& box) const
{
    std::vector<InterfacePiece> pieces;
    const double tiny = 1e-14 * box.diameter();

    if (const auto* c = std::get_if<CircleInterface>(&shape_)) {
        std::vector<double> angles;
        const double r = c->radius;
        auto add_vertical = [&](double xe) {
            const double dx = xe - c->center.x;
            if (std::abs(dx) >= r) return;
            const double dy = std::sqrt(r * r - dx * dx);
            for (double sy : {dy, -dy}) {
                const double y = c->center.y + sy;
                if (y >= box.y0 - tiny && y <= box.y1 + tiny) {
                    double t = std::atan2(sy, dx);
                    if (t < 0) t += kTwoPi;
                    angles.push_back(t);
                }
            }
        };
        auto add_horizontal = [&](double ye) {
            const double dy = ye - c->center.y;
            if (std::abs(dy) >= r) return;
            const double dx = std::sqrt(r * r - dy * dy);
            for (double sx : {dx, -dx}) {
                const double x = c->center.x + sx;
                if (x >= box.x0 - tiny && x <= box.x1 + tiny) {
                    double t = std::atan2(dy, sx);
                    if (t < 0) t += kTwoPi;
                    angles.push_back(t);
                }
            }
        };
        add_vertical(box.x0);
        add_vertical(box.x1);
        add_horizontal(box.y0);
        add_horizontal(box.y1);
        std::sort(angles.begin(), angles.end());
        angles.erase(std::unique(angles.begin(), angles.end(),
                                 [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                     angles.end());

        if (angles.empty()) {
            if (strictly_inside(box, arc_point(*c, 0.0))) {
                InterfacePiece p;
                p.is_arc = true;
                p.theta_a = 0.0;
                p.theta_b = kTwoPi;
                p.a = p.b = arc_point(*c, 0.0);
                pieces.push_back(p);
            }
            return pieces;
        }

        const double min_dtheta = tiny / r;
        const std::size_t n = angles.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double ta = angles[i];
            const double tb = (i + 1 < n) ? angles[i + 1] : angles[0] + kTwoPi;
            if (tb - ta <= min_dtheta) continue;
            if (!strictly_inside(box, arc_point(*c, 0.5 * (ta + tb)))) continue;
            // merge with the previous piece when contiguous (duplicate corner angles)
            if (!pieces.empty() && std::abs(pieces.back().theta_b - ta) < 1e-15) {
                pieces.back().theta_b = tb;
                pieces.back().b = arc_point(*c, tb);
                continue;
            }
            InterfacePiece p;
            p.is_arc = true;
            p.theta_a = ta;
            p.theta_b = tb;
            p.a = arc_point(*c, ta);
            p.b = arc_point(*c, tb);
            pieces.push_back(p);
        }
        return pieces;
    }

    // Liang-Barsky clip of anchor + t * dir against the box.
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    const double p0[2] = {anchor_.x, anchor_.y};
    const double d[2] = {dir_.x, dir_.y};
    const double lo[2] = {box.x0, box.y0};
    const double hi[2] = {box.x1, box.y1};
    for (int a = 0; a < 2; ++a) {
        if (std::abs(d[a]) < 1e-300) {
            if (p0[a] <= lo[a] || p0[a] >= hi[a]) return pieces;
            continue;
        }
        double ta = (lo[a] - p0[a]) / d[a];
        double tb = (hi[a] - p0[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t1 - t0 <= tiny) return pieces;
    InterfacePiece p;
    p.a = anchor_ + dir_ * t0;
    p.b = anchor_ + dir_ * t1;
    // a segment running exactly along a cell edge carries no interior measure
    const Point2 mid = (p.a + p.b) * 0.5;
    if (!strictly_inside(box, mid)) return pieces;
    pieces.push_back(p);
    return pieces;
}

std::optional<CutTopology> InterfaceGeometry::intersect_cell(const Box& box, int cell_id,
                                                             int samples_per_piece) const
{
    auto pieces = pieces_in(box);
    if (pieces.empty()) return std::nullopt;

    CutTopology topo;
    topo.cell = cell_id;
    topo.box = box;
    topo.pieces = pieces;

    const auto* circ = std::get_if<CircleInterface>(&shape_);
    const auto params = sample_params(std::max(samples_per_piece, 2));
    for (const auto& p : pieces) {
        if (!(p.is_arc && p.theta_b - p.theta_a >= kTwoPi)) {
            topo.boundary_points.push_back(p.a);
            topo.boundary_points.push_back(p.b);
        }
        for (double t : params) {
            if (p.is_arc) {
                topo.samples.push_back(arc_point(*circ, p.theta_a + t * (p.theta_b - p.theta_a)));
            } else {
                topo.samples.push_back(p.a + (p.b - p.a) * t);
            }
        }
    }

    // Omega0 area by Green's theorem: box edges inside Omega0 (ccw) plus the
    // interface pieces traversed with Omega0 on the left.
    double area0 = 0.0;
    const std::array<Point2, 4> corners = {
        Point2{box.x0, box.y0}, Point2{box.x1, box.y0}, Point2{box.x1, box.y1},
        Point2{box.x0, box.y1}};
    for (int e = 0; e < 4; ++e) {
        const Point2 p = corners[static_cast<std::size_t>(e)];
        const Point2 q = corners[static_cast<std::size_t>((e + 1) % 4)];
        const int axis = (p.y == q.y) ? 0 : 1;
        const double fixed = axis == 0 ? p.y : p.x;
        const double a = axis == 0 ? p.x : p.y;
        const double b = axis == 0 ? q.x : q.y;
        std::vector<double> cuts = crossings(axis, fixed, std::min(a, b), std::max(a, b));
        cuts.push_back(a);
        cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        if (a > b) std::reverse(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double ta = cuts[i], tb = cuts[i + 1];
            const Point2 pa = axis == 0 ? Point2{ta, fixed} : Point2{fixed, ta};
            const Point2 pb = axis == 0 ? Point2{tb, fixed} : Point2{fixed, tb};
            if (classify((pa + pb) * 0.5) == Side::Omega0) area0 += green_segment(pa, pb);
        }
    }
    for (const auto& p : pieces) {
        if (p.is_arc) {
            area0 += green_arc(*circ, p.theta_a, p.theta_b);
        } else {
            area0 += green_segment(p.b, p.a);
        }
    }
    area0 = std::clamp(area0, 0.0, box.area());
    topo.side_area = {area0, box.area() - area0};
    return topo;
}

}  // namespace ufem
