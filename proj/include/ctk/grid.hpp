#pragma once
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctk {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GridKind { Interval, Rectangle, Torus, Cylinder };

GridKind grid_kind_from_string(const std::string& s);
std::string to_string(GridKind k);

// Structured vertex grid over [0,Lx] (x [0,Ly] in dim 2). A periodic axis has
// `n` distinct vertices with spacing L/n (no duplicated seam vertex); a
// non-periodic axis has spacing L/(n-1).
struct Grid {
    int dim = 1;
    int nx = 0, ny = 1;          // vertex counts per axis
    double lx = 0.0, ly = 0.0;   // extents
    bool per_x = false, per_y = false;
    std::vector<std::uint8_t> is_boundary; // per vertex

    int nvert() const { return nx * ny; }
    int ncx() const { return per_x ? nx : nx - 1; }
    int ncy() const { return dim == 1 ? 1 : (per_y ? ny : ny - 1); }
    int ncell() const { return ncx() * ncy(); }
    double hx() const { return per_x ? lx / nx : lx / (nx - 1); }
    double hy() const { return dim == 1 ? 0.0 : (per_y ? ly / ny : ly / (ny - 1)); }

    int vid(int ix, int iy) const { return iy * nx + ix; }
    int cid(int cx, int cy) const { return cy * ncx() + cx; }
    double xcoord(int ix) const { return ix * hx(); }
    double ycoord(int iy) const { return iy * hy(); }

    // Vertex ids at the corners of cell (cx,cy): v00, v10, v01, v11 (periodic wrap).
    std::array<int, 4> cell_verts(int cx, int cy) const;

    // Edge-adjacent neighbours of a vertex (2 in dim 1, up to 4 in dim 2),
    // respecting periodic wrap; returns count, fills out[].
    int neighbors(int v, int out[4]) const;
};

// Per-cell symmetric metric tensor; g12/g22 unused in dim 1.
struct MetricField {
    std::vector<double> g11, g12, g22;
    double det(int c, int dim) const {
        return dim == 1 ? g11[c] : g11[c] * g22[c] - g12[c] * g12[c];
    }
};

// Per-vertex log-density phi; the measure is dmu = e^phi dV.
struct WeightField {
    std::vector<double> phi;
};

struct WeightedGrid {
    Grid grid;
    MetricField metric;
    WeightField weight;
};

// Build a grid of the given kind with Euclidean metric and phi sampled from an
// analytic expression in x[,y] (empty string means phi = 0).
// resolution/extent: {nx[,ny]}, {lx[,ly]}. Throws ConfigError on bad input.
WeightedGrid build_grid(GridKind kind, const std::vector<int>& resolution,
                        const std::vector<double>& extent,
                        const std::string& phi_spec = "");

// Euclidean metric field for a grid.
MetricField euclidean_metric(const Grid& g);

// mu-measure of a vertex region: per cell, cell volume * sqrt(det g) * mean
// e^phi over the cell's vertices * (fraction of cell vertices in the region).
// Exactly additive over disjoint regions. Throws ConfigError on empty subset.
double measure_of_vertex_region(const Grid& g, const MetricField& metric,
                                const WeightField& weight,
                                const std::vector<int>& vertex_subset);

} // namespace ctk
