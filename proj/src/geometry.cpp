#include "sbr/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sbr/error.hpp"

namespace sbr {

namespace {

constexpr std::size_t kTableIntervals = 10000;

double frustum_volume(double h, double r1, double r2) {
    return std::numbers::pi * h / 3.0 * (r1 * r1 + r1 * r2 + r2 * r2);
}

}  // namespace

TankGeometry TankGeometry::cylinder(double area_m2, double depth_m) {
    if (!(area_m2 > 0.0) || !(depth_m > 0.0))
        throw DomainError("cylinder needs positive area and depth");
    TankGeometry g;
    g.depth_ = depth_m;
    g.area_ = area_m2;
    g.total_volume_ = area_m2 * depth_m;
    g.build_table();
    return g;
}

TankGeometry TankGeometry::truncated_cone(double r_top_m, double r_bottom_m, double depth_m) {
    return radius_profile({{0.0, r_top_m}, {depth_m, r_bottom_m}});
}

TankGeometry TankGeometry::radius_profile(std::vector<RadiusNode> nodes) {
    if (nodes.size() < 2) throw DomainError("radius profile needs at least two nodes");
    if (nodes.front().z != 0.0) throw DomainError("radius profile must start at z = 0");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i].r > 0.0)) throw DomainError("radius profile must be positive");
        if (i > 0 && !(nodes[i].z > nodes[i - 1].z))
            throw DomainError("radius profile depths must be strictly increasing");
    }
    TankGeometry g;
    g.depth_ = nodes.back().z;
    g.nodes_ = std::move(nodes);
    const std::size_t n = g.nodes_.size();
    g.node_volume_.assign(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;) {
        const auto& a = g.nodes_[i];
        const auto& b = g.nodes_[i + 1];
        g.node_volume_[i] = g.node_volume_[i + 1] + frustum_volume(b.z - a.z, a.r, b.r);
    }
    g.total_volume_ = g.node_volume_.front();
    g.build_table();
    return g;
}

TankGeometry TankGeometry::cone_matching(double depth_m, double total_volume_m3, double z_ref_m,
                                         double volume_below_m3) {
    if (!(depth_m > 0.0) || !(z_ref_m > 0.0 && z_ref_m < depth_m))
        throw DomainError("cone_matching: reference depth must lie inside the tank");
    if (!(volume_below_m3 > 0.0 && volume_below_m3 < total_volume_m3))
        throw DomainError("cone_matching: reference volume must be in (0, total)");

    const double pi = std::numbers::pi;
    const double B = depth_m;
    const double h = B - z_ref_m;
    const double lambda = z_ref_m / B;
    // Unknowns: top radius a, bottom radius c.
    double a = std::sqrt(total_volume_m3 / (pi * B));
    double c = a;
    for (int it = 0; it < 100; ++it) {
        const double rm = a * (1.0 - lambda) + c * lambda;
        const double f1 = pi * B / 3.0 * (a * a + a * c + c * c) - total_volume_m3;
        const double f2 = pi * h / 3.0 * (rm * rm + rm * c + c * c) - volume_below_m3;
        const double j11 = pi * B / 3.0 * (2.0 * a + c);
        const double j12 = pi * B / 3.0 * (a + 2.0 * c);
        const double j21 = pi * h / 3.0 * (2.0 * rm + c) * (1.0 - lambda);
        const double j22 = pi * h / 3.0 * ((2.0 * rm + c) * lambda + (rm + 2.0 * c));
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) break;
        const double da = (f1 * j22 - f2 * j12) / det;
        const double dc = (j11 * f2 - j21 * f1) / det;
        a -= da;
        c -= dc;
        if (std::abs(da) + std::abs(dc) < 1e-15 * (std::abs(a) + std::abs(c))) break;
    }
    if (!(a > 0.0 && c > 0.0)) throw DomainError("cone_matching: no cone with positive radii fits");
    return truncated_cone(a, c, depth_m);
}

double TankGeometry::radius(double z) const {
    if (z >= depth_) return nodes_.back().r;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), z,
                               [](double v, const RadiusNode& n) { return v < n.z; });
    const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    const auto& a = nodes_[i];
    const auto& b = nodes_[i + 1];
    return a.r + (b.r - a.r) * (z - a.z) / (b.z - a.z);
}

double TankGeometry::area(double z) const {
    if (z < 0.0) throw DomainError("area: depth above the tank top");
    if (is_cylinder()) return area_;
    const double r = radius(z);
    return std::numbers::pi * r * r;
}

double TankGeometry::volume_unchecked(double z) const {
    if (is_cylinder()) return area_ * (depth_ - z);
    if (z >= depth_) return 0.0;
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), z,
                               [](double v, const RadiusNode& n) { return v < n.z; });
    const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    const auto& b = nodes_[i + 1];
    return node_volume_[i + 1] + frustum_volume(b.z - z, radius(z), b.r);
}

double TankGeometry::volume_at(double z) const {
    if (!(z >= 0.0 && z <= depth_)) throw DomainError("volume_at: depth outside [0, B]");
    return volume_unchecked(z);
}

void TankGeometry::build_table() {
    table_.resize(kTableIntervals + 1);
    for (std::size_t k = 0; k <= kTableIntervals; ++k)
        table_[k] = volume_unchecked(depth_ * static_cast<double>(k) / kTableIntervals);
    table_.back() = 0.0;
}

double TankGeometry::depth_at_volume(double volume) const {
    if (!(volume >= 0.0 && volume <= total_volume_ * (1.0 + 1e-14)))
        throw DomainError("depth_at_volume: volume outside [0, V(0)]");
    if (is_cylinder()) return std::clamp(depth_ - volume / area_, 0.0, depth_);
    if (volume >= total_volume_) return 0.0;
    if (volume <= 0.0) return depth_;

    // Table is decreasing; find k with table_[k] >= volume > table_[k+1].
    auto it = std::lower_bound(table_.rbegin(), table_.rend(), volume);
    std::size_t k = static_cast<std::size_t>(table_.rend() - it) - 1;
    k = std::min(k, kTableIntervals - 1);
    const double h = depth_ / kTableIntervals;
    double lo = h * static_cast<double>(k);
    double hi = std::min(depth_, lo + h);

    // Safeguarded Newton on V(z) - volume with V' = -A.
    double z = 0.5 * (lo + hi);
    for (int it2 = 0; it2 < 60; ++it2) {
        const double f = volume_unchecked(z) - volume;
        if (f == 0.0) break;
        if (f > 0.0)
            lo = z;
        else
            hi = z;
        double next = z + f / area(z);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - z) <= 1e-16 * depth_) {
            z = next;
            break;
        }
        z = next;
    }
    return z;
}

std::string to_string(ModelKind kind) { return kind == ModelKind::PDE ? "PDE" : "ODE"; }

StageSchedule::StageSchedule(std::vector<Stage> stages, std::size_t k_C, std::size_t k_S)
    : stages_(std::move(stages)) {
    double expected_start = 0.0;
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        const Stage& s = stages_[i];
        const std::string tag = "stage " + std::to_string(i) + (s.label.empty() ? "" : " (" + s.label + ")");
        if (s.t_start != expected_start)
            throw ScheduleError(tag + ": stages must tile [0, T] without gaps or overlaps", s.t_start);
        if (!(s.t_end >= s.t_start)) throw ScheduleError(tag + ": end before start", s.t_start);
        if (!(s.Q_f >= 0.0 && s.Q_u >= 0.0 && s.Q_e >= 0.0))
            throw ScheduleError(tag + ": flows must be nonnegative", s.t_start);
        if (s.Q_f > 0.0 && s.Q_e > 0.0)
            throw ScheduleError(tag + ": cannot fill and extract simultaneously", s.t_start);
        if (s.C_f.size() != k_C || s.S_f.size() != k_S)
            throw ScheduleError(tag + ": feed vector length does not match the component registry", s.t_start);
        for (double v : s.C_f)
            if (!(v >= 0.0)) throw ScheduleError(tag + ": negative feed concentration", s.t_start);
        for (double v : s.S_f)
            if (!(v >= 0.0)) throw ScheduleError(tag + ": negative feed concentration", s.t_start);
        expected_start = s.t_end;
    }
}

std::size_t StageSchedule::index_at(double t) const {
    if (stages_.empty()) throw ScheduleError("empty schedule", t);
    auto it = std::upper_bound(stages_.begin(), stages_.end(), t,
                               [](double v, const Stage& s) { return v < s.t_end; });
    if (it == stages_.end()) return stages_.size() - 1;
    return static_cast<std::size_t>(it - stages_.begin());
}

SurfaceTrajectory::SurfaceTrajectory(const TankGeometry& geometry, const StageSchedule& schedule,
                                     double zbar0)
    : geometry_(geometry), schedule_(schedule), zbar0_(zbar0) {
    if (!(zbar0 >= 0.0 && zbar0 <= geometry.depth()))
        throw ScheduleError("initial surface outside [0, B]", 0.0);
    const double vmax = geometry.total_volume();
    const double slack = 1e-12 * vmax;
    double v = geometry.volume_at(zbar0);
    for (const Stage& s : schedule.stages()) {
        stage_start_volume_.push_back(v);
        const double rate = s.volume_rate();
        const double v_end = v + rate * s.duration();
        if (v_end > vmax + slack)
            throw ScheduleError("schedule overfills the tank", s.t_start + (vmax - v) / rate);
        if (v_end < -slack) throw ScheduleError("schedule empties the tank", s.t_start + (0.0 - v) / rate);
        v = std::clamp(v_end, 0.0, vmax);
    }
}

double SurfaceTrajectory::volume(double t) const {
    if (schedule_.empty()) return geometry_.volume_at(zbar0_);
    const std::size_t i = schedule_.index_at(t);
    const Stage& s = schedule_.stages()[i];
    const double tt = std::min(t, s.t_end);
    const double v = stage_start_volume_[i] + s.volume_rate() * (tt - s.t_start);
    return std::clamp(v, 0.0, geometry_.total_volume());
}

double SurfaceTrajectory::zbar(double t) const { return geometry_.depth_at_volume(volume(t)); }

int SurfaceTrajectory::gamma(double z, double t) const {
    return (zbar(t) < z && z < geometry_.depth()) ? 1 : 0;
}

}  // namespace sbr
