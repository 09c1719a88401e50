#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "carbuncle/euler.hpp"

namespace carbuncle {

enum class GridKind { Cartesian, Aspect, Distorted };

/// How the distortion angle is realised on the structured mesh.
///  - RowSawtooth: node rows are shifted in y by alternating +-(dx/2)tan(alpha) per
///    column, so the shock-transverse faces zigzag at +-alpha to the x axis.
///  - ColumnSawtooth: node columns are shifted in x by alternating +-(dy/2)tan(alpha)
///    per row. Only periodic in y for an even number of rows.
///  - RowShear: node rows are rotated uniformly by alpha (parallelogram cells).
enum class DistortionStrategy { RowSawtooth, ColumnSawtooth, RowShear };

struct GridSpec {
    GridKind kind = GridKind::Cartesian;
    int nx = 11;
    int ny = 11;
    double dx = 1.0;
    double aspect = 1.0;      // dy / dx
    double alpha_deg = 0.0;   // distortion angle, |alpha| < 45
    DistortionStrategy strategy = DistortionStrategy::RowSawtooth;

    double dy() const { return aspect * dx; }
};

struct Face {
    double length = 0.0;
    Vec2 normal;
};

/// Volume plus the four sides in (E, N, W, S) order with outward normals.
struct CellGeometry {
    double volume = 0.0;
    std::array<Face, 4> sides;
};

enum Side { East = 0, North = 1, West = 2, South = 3 };

/// Structured quadrilateral mesh with two ghost layers on every side.
///
/// Cell (i, j) has i in [-ghost, nx + ghost), j in [-ghost, ny + ghost); interior
/// cells are 0 <= i < nx, 0 <= j < ny. Node (i, j) is the lower-left corner of
/// cell (i, j). x_face(i, j) is the face on node column i between cells (i-1, j)
/// and (i, j), normal pointing to +i; y_face(i, j) lies on node row j between
/// (i, j-1) and (i, j), normal pointing to +j.
class StructuredGrid {
public:
    static constexpr int ghost = 2;

    using NodeFn = std::function<Vec2(int, int)>;

    StructuredGrid(int nx, int ny, const NodeFn& node_position)
        : nx_(nx), ny_(ny)
    {
        if (nx < 1 || ny < 1) throw std::invalid_argument("StructuredGrid: empty dimensions");
        const int nnx = nx + 1 + 2 * ghost;
        const int nny = ny + 1 + 2 * ghost;
        nodes_.resize(static_cast<size_t>(nnx) * nny);
        for (int j = -ghost; j <= ny + ghost; ++j)
            for (int i = -ghost; i <= nx + ghost; ++i)
                nodes_[node_index(i, j)] = node_position(i, j);

        const int ncx = nx + 2 * ghost;
        const int ncy = ny + 2 * ghost;
        volumes_.resize(static_cast<size_t>(ncx) * ncy);
        x_faces_.resize(static_cast<size_t>(nnx) * ncy);
        y_faces_.resize(static_cast<size_t>(ncx) * nny);

        for (int j = -ghost; j < ny + ghost; ++j)
            for (int i = -ghost; i <= nx + ghost; ++i)
                x_faces_[x_face_index(i, j)] = edge_face(node(i, j), node(i, j + 1));
        for (int j = -ghost; j <= ny + ghost; ++j)
            for (int i = -ghost; i < nx + ghost; ++i)
                y_faces_[y_face_index(i, j)] = edge_face(node(i + 1, j), node(i, j));

        for (int j = -ghost; j < ny + ghost; ++j) {
            for (int i = -ghost; i < nx + ghost; ++i) {
                const double a = shoelace(node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1));
                if (!(a > 0.0))
                    throw std::invalid_argument("StructuredGrid: non-positive cell volume at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
                volumes_[cell_index(i, j)] = a;
            }
        }
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }

    bool in_range(int i, int j) const
    {
        return i >= -ghost && i < nx_ + ghost && j >= -ghost && j < ny_ + ghost;
    }

    bool is_interior(int i, int j) const { return i >= 0 && i < nx_ && j >= 0 && j < ny_; }

    const Vec2& node(int i, int j) const { return nodes_[node_index(i, j)]; }
    double volume(int i, int j) const { return volumes_[cell_index(i, j)]; }
    const Face& x_face(int i, int j) const { return x_faces_[x_face_index(i, j)]; }
    const Face& y_face(int i, int j) const { return y_faces_[y_face_index(i, j)]; }

    Vec2 cell_center(int i, int j) const
    {
        const Vec2 &a = node(i, j), &b = node(i + 1, j), &c = node(i + 1, j + 1), &d = node(i, j + 1);
        return {0.25 * (a.x + b.x + c.x + d.x), 0.25 * (a.y + b.y + c.y + d.y)};
    }

    CellGeometry cell_geometry(int i, int j) const
    {
        if (!in_range(i, j))
            throw std::out_of_range("cell_geometry: (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") outside grid");
        CellGeometry g;
        g.volume = volume(i, j);
        g.sides[East] = x_face(i + 1, j);
        g.sides[North] = y_face(i, j + 1);
        const Face& w = x_face(i, j);
        const Face& s = y_face(i, j);
        g.sides[West] = {w.length, {-w.normal.x, -w.normal.y}};
        g.sides[South] = {s.length, {-s.normal.x, -s.normal.y}};
        return g;
    }

    /// Node table (i, j, x, y) over the interior nodes.
    void write_nodes_csv(std::ostream& os) const
    {
        os << "i,j,x,y\n";
        os.precision(17);
        for (int j = 0; j <= ny_; ++j)
            for (int i = 0; i <= nx_; ++i)
                os << i << ',' << j << ',' << node(i, j).x << ',' << node(i, j).y << '\n';
    }

    static double shoelace(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
    {
        return 0.5 * ((a.x * b.y - b.x * a.y) + (b.x * c.y - c.x * b.y) + (c.x * d.y - d.x * c.y) +
                      (d.x * a.y - a.x * d.y));
    }

private:
    static Face edge_face(Vec2 from, Vec2 to)
    {
        // counterclockwise traversal: outward normal is the tangent rotated by -90 degrees
        const double tx = to.x - from.x;
        const double ty = to.y - from.y;
        const double len = std::hypot(tx, ty);
        return {len, {ty / len, -tx / len}};
    }

    size_t node_index(int i, int j) const
    {
        return static_cast<size_t>(j + ghost) * (nx_ + 1 + 2 * ghost) + (i + ghost);
    }
    size_t cell_index(int i, int j) const
    {
        return static_cast<size_t>(j + ghost) * (nx_ + 2 * ghost) + (i + ghost);
    }
    size_t x_face_index(int i, int j) const
    {
        return static_cast<size_t>(j + ghost) * (nx_ + 1 + 2 * ghost) + (i + ghost);
    }
    size_t y_face_index(int i, int j) const
    {
        return static_cast<size_t>(j + ghost) * (nx_ + 2 * ghost) + (i + ghost);
    }

    int nx_;
    int ny_;
    std::vector<Vec2> nodes_;
    std::vector<double> volumes_;
    std::vector<Face> x_faces_;
    std::vector<Face> y_faces_;
};

inline void check_grid_dims(int nx, int ny)
{
    if (nx < 3 || ny < 3)
        throw std::invalid_argument("grid needs at least 3x3 cells, got " + std::to_string(nx) + "x" +
                                    std::to_string(ny));
}

inline StructuredGrid make_cartesian(int nx, int ny, double dx, double dy)
{
    check_grid_dims(nx, ny);
    if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("make_cartesian: spacing must be positive");
    return StructuredGrid(nx, ny, [=](int i, int j) { return Vec2{i * dx, j * dy}; });
}

/// Single row of cells; used for the one-dimensional pre-solve.
inline StructuredGrid make_strip(int nx, double dx, double dy)
{
    if (nx < 3) throw std::invalid_argument("make_strip: need at least 3 cells");
    return StructuredGrid(nx, 1, [=](int i, int j) { return Vec2{i * dx, j * dy}; });
}

inline StructuredGrid make_distorted(int nx, int ny, double dx, double dy, double alpha_deg,
                                     DistortionStrategy strategy = DistortionStrategy::RowSawtooth)
{
    check_grid_dims(nx, ny);
    if (!(std::abs(alpha_deg) < 45.0))
        throw std::invalid_argument("make_distorted: |alpha| must be below 45 degrees");
    const double t = std::tan(alpha_deg * std::numbers::pi / 180.0);
    switch (strategy) {
    case DistortionStrategy::RowSawtooth: {
        const double s = 0.5 * dx * t;
        return StructuredGrid(nx, ny, [=](int i, int j) {
            return Vec2{i * dx, j * dy + ((i & 1) ? -s : s)};
        });
    }
    case DistortionStrategy::ColumnSawtooth: {
        if (ny % 2 != 0 && alpha_deg != 0.0)
            throw std::invalid_argument("make_distorted: column sawtooth needs an even row count");
        const double s = 0.5 * dy * t;
        return StructuredGrid(nx, ny, [=](int i, int j) {
            return Vec2{i * dx + ((j & 1) ? -s : s), j * dy};
        });
    }
    case DistortionStrategy::RowShear:
        return StructuredGrid(nx, ny, [=](int i, int j) { return Vec2{i * dx, j * dy + i * dx * t}; });
    }
    throw std::invalid_argument("make_distorted: unknown strategy");
}

inline StructuredGrid make_grid(const GridSpec& spec)
{
    if (!(spec.aspect > 0.0)) throw std::invalid_argument("grid aspect ratio must be positive");
    switch (spec.kind) {
    case GridKind::Cartesian:
    case GridKind::Aspect:
        return make_cartesian(spec.nx, spec.ny, spec.dx, spec.dy());
    case GridKind::Distorted:
        return make_distorted(spec.nx, spec.ny, spec.dx, spec.dy(), spec.alpha_deg, spec.strategy);
    }
    throw std::invalid_argument("make_grid: unknown kind");
}

inline std::string to_string(GridKind k)
{
    switch (k) {
    case GridKind::Cartesian: return "cartesian";
    case GridKind::Aspect: return "aspect";
    case GridKind::Distorted: return "distorted";
    }
    return "?";
}

inline GridKind parse_grid_kind(const std::string& s)
{
    if (s == "cartesian") return GridKind::Cartesian;
    if (s == "aspect") return GridKind::Aspect;
    if (s == "distorted") return GridKind::Distorted;
    throw std::invalid_argument("unknown grid kind '" + s + "'");
}

inline std::string to_string(DistortionStrategy s)
{
    switch (s) {
    case DistortionStrategy::RowSawtooth: return "row-sawtooth";
    case DistortionStrategy::ColumnSawtooth: return "column-sawtooth";
    case DistortionStrategy::RowShear: return "row-shear";
    }
    return "?";
}

inline DistortionStrategy parse_distortion_strategy(const std::string& s)
{
    if (s == "row-sawtooth") return DistortionStrategy::RowSawtooth;
    if (s == "column-sawtooth") return DistortionStrategy::ColumnSawtooth;
    if (s == "row-shear") return DistortionStrategy::RowShear;
    throw std::invalid_argument("unknown distortion strategy '" + s + "'");
}

} // namespace carbuncle
