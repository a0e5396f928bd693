#include "segkit/grid.hpp"

#include "segkit/error.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace segkit {

PointGrid::PointGrid(int per_side, int width, int height)
    : per_side_(per_side), width_(width), height_(height) {
    if (per_side < 1) {
        throw ArgumentError("grid per_side must be at least 1");
    }
    if (width < per_side || height < per_side) {
        throw ArgumentError(fmt::format("a {}x{} canvas cannot hold {} points per side", width,
                                        height, per_side));
    }
    points_.reserve(static_cast<std::size_t>(per_side) * per_side);
    double const dx = static_cast<double>(width) / per_side;
    double const dy = static_cast<double>(height) / per_side;
    for (int i = 0; i < per_side; ++i) {
        for (int j = 0; j < per_side; ++j) {
            points_.push_back({(j + 0.5) * dx, (i + 0.5) * dy});
        }
    }
}

double PointGrid::max_assignment_distance() const {
    double const cw = static_cast<double>(width_) / per_side_;
    double const ch = static_cast<double>(height_) / per_side_;
    return std::sqrt(cw * cw + ch * ch) / 2.0;
}

PointGrid build_grid(int per_side, int width, int height) {
    return PointGrid(per_side, width, height);
}

Assignment nearest_neighbour_assign(Point prior, PointGrid const& grid) {
    if (!grid.canvas().contains(prior)) {
        throw ArgumentError(fmt::format("prior ({}, {}) is outside the {}x{} canvas", prior.x,
                                        prior.y, grid.width(), grid.height()));
    }
    int const k = grid.per_side();
    // The nearest center lies in the containing cell or one of its neighbours.
    int const col = std::min(k - 1, static_cast<int>(prior.x * k / grid.width()));
    int const row = std::min(k - 1, static_cast<int>(prior.y * k / grid.height()));

    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int i = std::max(0, row - 1); i <= std::min(k - 1, row + 1); ++i) {
        for (int j = std::max(0, col - 1); j <= std::min(k - 1, col + 1); ++j) {
            auto const idx = static_cast<std::size_t>(i) * k + j;
            auto const& p = grid.at(idx);
            double const dx = p.x - prior.x, dy = p.y - prior.y;
            double const d2 = dx * dx + dy * dy;
            if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
                best_d2 = d2;
                best = idx;
            }
        }
    }
    return Assignment{{}, prior, best, grid.at(best)};
}

std::string assignments_to_json(std::span<Assignment const> assignments) {
    auto arr = nlohmann::ordered_json::array();
    for (auto const& a : assignments) {
        arr.push_back({{"instance_id", a.instance_id},
                       {"prior", {a.prior.x, a.prior.y}},
                       {"grid_index", a.grid_index},
                       {"grid_point", {a.grid_point.x, a.grid_point.y}}});
    }
    return arr.dump(2) + "\n";
}

std::vector<Assignment> assignments_from_json(std::string const& text) {
    std::vector<Assignment> out;
    try {
        auto const arr = nlohmann::json::parse(text);
        for (auto const& j : arr) {
            Assignment a;
            a.instance_id = j.at("instance_id").get<std::string>();
            a.prior = {j.at("prior").at(0).get<double>(), j.at("prior").at(1).get<double>()};
            a.grid_index = j.at("grid_index").get<std::size_t>();
            a.grid_point = {j.at("grid_point").at(0).get<double>(),
                            j.at("grid_point").at(1).get<double>()};
            out.push_back(std::move(a));
        }
    } catch (nlohmann::json::exception const& e) {
        throw LoadError(std::string("malformed assignment file: ") + e.what());
    }
    return out;
}

} // namespace segkit
