#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ufem {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Point2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

using Vec2 = Point2;

enum class Side { Omega0 = 0, Omega1 = 1 };

inline int side_index(Side s) { return static_cast<int>(s); }

/// Axis-aligned rectangle [x0,x1]x[y0,y1].
struct Box {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    double diameter() const { return std::hypot(width(), height()); }
    Point2 centroid() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    double lo(int axis) const { return axis == 0 ? x0 : y0; }
    double hi(int axis) const { return axis == 0 ? x1 : y1; }
};

/// Straight interface y = tan(theta0) (x - 1 - beta) + 1.
struct LineInterface {
    double theta0 = 0.0;
    double beta = 0.0;
};

struct CircleInterface {
    Point2 center;
    double radius = 1.0;
};

/// Horizontal interface y = 0.5 + delta.
struct HLineInterface {
    double delta = 0.0;
};

/// One connected piece of the interface inside a cell.  Straight pieces are
/// parametrized by arc length from `a` to `b`; arcs by polar angle.
struct InterfacePiece {
    bool is_arc = false;
    Point2 a, b;                    // endpoints (straight piece or arc ends)
    double theta_a = 0.0;           // arc only, theta_a < theta_b
    double theta_b = 0.0;

    double length(double radius) const
    {
        return is_arc ? radius * (theta_b - theta_a) : (b - a).norm();
    }
};

/// Result of intersecting the interface with a cut cell.
struct CutTopology {
    int cell = -1;
    Box box;
    std::vector<InterfacePiece> pieces;
    std::vector<Point2> boundary_points;  // entry/exit points on the cell boundary
    std::vector<Point2> samples;          // points on the interface inside the cell
    std::array<double, 2> side_area{0.0, 0.0};
};

/// Implicitly represented interface curve.  Omega0 is below the line (or
/// inside the circle); the unit normal points from Omega0 into Omega1.
class InterfaceGeometry {
public:
    using Shape = std::variant<LineInterface, CircleInterface, HLineInterface>;

    static constexpr double kTieTolerance = 1e-14;

    explicit InterfaceGeometry(Shape shape);

    static InterfaceGeometry line(double theta0, double beta);
    static InterfaceGeometry circle(Point2 center, double radius);
    static InterfaceGeometry hline(double delta);

    /// The configurations used by the manufactured problems.
    static InterfaceGeometry standard_line();
    static InterfaceGeometry standard_circle();

    const Shape& shape() const { return shape_; }
    bool is_circle() const { return std::holds_alternative<CircleInterface>(shape_); }
    std::string tag() const;

    /// Signed offset: negative in Omega0, positive in Omega1, |offset| = distance.
    double signed_offset(Point2 x) const;
    Vec2 offset_gradient(Point2 x) const;

    Side classify(Point2 x) const;
    double distance(Point2 x) const { return std::abs(signed_offset(x)); }
    double one_sided_distance(Point2 x) const;
    Point2 closest_point(Point2 x) const;

    /// Unit normal (Omega0 -> Omega1) and tangent (normal rotated +90 deg) at a
    /// point on the interface.  Throws if `y` is farther than 1e-10 from it.
    std::pair<Vec2, Vec2> frame_at(Point2 y) const;

    /// Interface curvature radius (infinity for straight interfaces).
    double curvature_radius() const;

    /// Roots of the signed offset along the axis-parallel segment
    /// {coord[axis] = t in (lo, hi), coord[1-axis] = fixed}, sorted.
    std::vector<double> crossings(int axis, double fixed, double lo, double hi) const;

    /// Positions along `outer_axis` in (lo, hi) where the interface has a
    /// tangent parallel to the other axis (sqrt-type turning points).
    std::vector<double> turning_points(int outer_axis, double lo, double hi) const;

    std::optional<CutTopology> intersect_cell(const Box& box, int cell_id = -1,
                                              int samples_per_piece = 4) const;

private:
    Point2 anchor_;  // straight interfaces: a point on the line
    Vec2 dir_;       // straight interfaces: unit direction
    Vec2 normal_;    // straight interfaces: unit normal into Omega1
    Shape shape_;

    std::vector<InterfacePiece> pieces_in(const Box& box) const;
};

}  // namespace ufem
