#pragma once

#include "segkit/image.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace segkit {

/// per_side x per_side prompt points at cell centers, row-major.
class PointGrid {
  public:
    PointGrid(int per_side, int width, int height);

    int per_side() const { return per_side_; }
    int width() const { return width_; }
    int height() const { return height_; }
    Canvas canvas() const { return {width_, height_}; }
    std::span<Point const> points() const { return points_; }
    Point const& at(std::size_t index) const { return points_.at(index); }
    std::size_t size() const { return points_.size(); }

    /// Half the cell diagonal: the largest possible nearest-point distance.
    double max_assignment_distance() const;

  private:
    int per_side_;
    int width_;
    int height_;
    std::vector<Point> points_;
};

PointGrid build_grid(int per_side, int width, int height);

struct Assignment {
    std::string instance_id;
    Point prior;
    std::size_t grid_index = 0;
    Point grid_point;

    friend bool operator==(Assignment const&, Assignment const&) = default;
};

/// Snaps `prior` to the Euclidean-nearest grid point; ties go to the lowest
/// row-major index. Throws ArgumentError when the prior is off-canvas.
Assignment nearest_neighbour_assign(Point prior, PointGrid const& grid);

std::string assignments_to_json(std::span<Assignment const> assignments);
std::vector<Assignment> assignments_from_json(std::string const& text);

} // namespace segkit
