#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace sbr {

/// Tank shape. z is depth: 0 at the top, B at the bottom.
///
/// The cross-section is either constant (cylinder) or given by a piecewise
/// linear radius profile r(z), A(z) = pi r(z)^2. Below the bottom (z > B) the
/// area is continued as A(B), which is how the underflow region is modelled.
class TankGeometry {
public:
    struct RadiusNode {
        double z;
        double r;
    };

    static TankGeometry cylinder(double area_m2, double depth_m);
    static TankGeometry truncated_cone(double r_top_m, double r_bottom_m, double depth_m);
    static TankGeometry radius_profile(std::vector<RadiusNode> nodes);

    /// Truncated cone (linear radius, wider at the top) with the given total
    /// volume and with `volume_below_m3` of mixture below depth `z_ref_m`.
    static TankGeometry cone_matching(double depth_m, double total_volume_m3, double z_ref_m,
                                      double volume_below_m3);

    bool is_cylinder() const noexcept { return nodes_.empty(); }
    double depth() const noexcept { return depth_; }
    double total_volume() const noexcept { return total_volume_; }
    const std::vector<RadiusNode>& radius_nodes() const noexcept { return nodes_; }
    /// Constant area; only meaningful for cylinders.
    double cylinder_area() const noexcept { return area_; }

    /// Cross-sectional area. Defined for z >= 0; z > B gives A(B).
    double area(double z) const;

    /// V(z) = integral of A from z to B. Throws DomainError outside [0, B].
    double volume_at(double z) const;

    /// Inverse of volume_at. Throws DomainError outside [0, V(0)].
    double depth_at_volume(double volume) const;

    /// Volume between two depths z1 <= z2, both in [0, B].
    double volume_between(double z1, double z2) const { return volume_at(z1) - volume_at(z2); }

private:
    TankGeometry() = default;
    void build_table();
    double volume_unchecked(double z) const;
    double radius(double z) const;

    double depth_ = 0.0;
    double area_ = 0.0;  // cylinder only
    std::vector<RadiusNode> nodes_;
    // node_volume_[i] = V(nodes_[i].z).
    std::vector<double> node_volume_;
    // Cached V on a uniform grid, used to bracket the inverse.
    std::vector<double> table_;
    double total_volume_ = 0.0;
};

enum class ModelKind { PDE, ODE };

std::string to_string(ModelKind kind);

/// One row of the operating schedule. Flows in m^3/s, concentrations in kg/m^3.
struct Stage {
    std::string label;
    double t_start = 0.0;
    double t_end = 0.0;
    double Q_f = 0.0;
    double Q_u = 0.0;
    double Q_e = 0.0;
    std::vector<double> C_f;
    std::vector<double> S_f;
    ModelKind model = ModelKind::PDE;

    double duration() const noexcept { return t_end - t_start; }
    bool extracting() const noexcept { return Q_e > 0.0; }
    /// Net flow through the surface: -Q_e while extracting, Q_f otherwise.
    double surface_flow() const noexcept { return extracting() ? -Q_e : Q_f; }
    /// d(mixture volume)/dt.
    double volume_rate() const noexcept { return surface_flow() - Q_u; }
};

/// Ordered stages tiling [0, T].
class StageSchedule {
public:
    StageSchedule() = default;
    /// Validates tiling, nonnegative flows, fill/extract exclusivity and feed
    /// vector lengths. Throws ScheduleError.
    StageSchedule(std::vector<Stage> stages, std::size_t k_C, std::size_t k_S);

    const std::vector<Stage>& stages() const noexcept { return stages_; }
    bool empty() const noexcept { return stages_.empty(); }
    double end_time() const noexcept { return stages_.empty() ? 0.0 : stages_.back().t_end; }

    /// Stage active at t (half-open intervals; t == T maps to the last stage).
    std::size_t index_at(double t) const;
    const Stage& at(double t) const { return stages_[index_at(t)]; }

private:
    std::vector<Stage> stages_;
};

/// The mixture surface zbar(t), computed from the flows alone before any
/// field solve. For piecewise-constant flows the volume is piecewise linear.
class SurfaceTrajectory {
public:
    /// Throws ScheduleError (with the first violating time) on overfill or
    /// empty tank.
    SurfaceTrajectory(const TankGeometry& geometry, const StageSchedule& schedule, double zbar0);

    double initial_depth() const noexcept { return zbar0_; }
    double volume(double t) const;
    double zbar(double t) const;
    /// 1 inside the mixture (zbar(t) < z < B), 0 otherwise.
    int gamma(double z, double t) const;

private:
    TankGeometry geometry_;
    StageSchedule schedule_;
    double zbar0_;
    std::vector<double> stage_start_volume_;
};

}  // namespace sbr
