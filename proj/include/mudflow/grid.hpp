#pragma once

#include "mudflow/profile.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace mudflow {

/// Reference rectangles: water = S^1 x (0,1), mud = S^1 x (-1,0).
enum class DomainTag { Water, Mud };

enum class Edge { Top, Bottom, Interface };

/// Fixed collocation grid: Fourier nodes in x (nx even), Chebyshev-
/// Gauss-Lobatto nodes in y mapped onto the domain, stored ascending so
/// that both endpoints are included. Differentiation matrices:
///  - dx1 built column-by-column from the modal derivative (so the matrix
///    and the modal path agree exactly), dx2 = dx1*dx1;
///  - dy1 from barycentric weights (exact on polynomials of degree < ny),
///    dy2 = dy1*dy1.
/// Grids are immutable; share them via make_grid.
class Grid {
public:
    Grid(int nx, int ny, DomainTag tag);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    DomainTag domain() const { return tag_; }

    double x(int ix) const;
    double y(int iy) const { return ys_[static_cast<size_t>(iy)]; }
    const std::vector<double>& ys() const { return ys_; }

    const Eigen::MatrixXd& dx1() const { return dx1_; }
    const Eigen::MatrixXd& dx2() const { return dx2_; }
    const Eigen::MatrixXd& dy1() const { return dy1_; }
    const Eigen::MatrixXd& dy2() const { return dy2_; }

    /// y index of the interface row (y = 0).
    int interface_index() const { return tag_ == DomainTag::Water ? 0 : ny_ - 1; }
    /// y index of the outer boundary (y = 1 water top, y = -1 mud bottom).
    int outer_index() const { return tag_ == DomainTag::Water ? ny_ - 1 : 0; }
    bool is_boundary_row(int iy) const { return iy == 0 || iy == ny_ - 1; }

    /// x-major flattening used by fields and assembled systems.
    int index(int ix, int iy) const { return ix * ny_ + iy; }
    int size() const { return nx_ * ny_; }

private:
    int nx_, ny_;
    DomainTag tag_;
    std::vector<double> ys_;
    Eigen::MatrixXd dx1_, dx2_, dy1_, dy2_;
};

std::shared_ptr<const Grid> make_grid(int nx, int ny, DomainTag tag);

/// Scalar field on a grid, x-major storage.
class Field2D {
public:
    explicit Field2D(std::shared_ptr<const Grid> grid);

    static Field2D sample(std::shared_ptr<const Grid> grid,
                          const std::function<double(double, double)>& fn);

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }

    double& at(int ix, int iy) { return data_[static_cast<size_t>(grid_->index(ix, iy))]; }
    double at(int ix, int iy) const { return data_[static_cast<size_t>(grid_->index(ix, iy))]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    double sup_norm() const;
    bool all_finite() const;

private:
    std::shared_ptr<const Grid> grid_;
    std::vector<double> data_;
};

/// Restriction of a field to an edge as a periodic profile.
/// Top exists only on water grids, Bottom only on mud grids.
PeriodicProfile trace(const Field2D& field, Edge edge);

} // namespace mudflow
