#include <doctest.h>

#include <cmath>

#include "sbr/error.hpp"
#include "sbr/geometry.hpp"

using namespace sbr;

namespace {

Stage pde_stage(double t0_h, double t1_h, double qf, double qu, double qe) {
    return Stage{"s", t0_h * 3600.0, t1_h * 3600.0, qf / 3600.0, qu / 3600.0, qe / 3600.0, {0.0}, {0.0}, ModelKind::PDE};
}

StageSchedule example1_schedule() {
    return StageSchedule({pde_stage(0, 1, 790, 0, 0), pde_stage(1, 3, 0, 0, 0), pde_stage(3, 5, 0, 0, 0),
                          pde_stage(5, 5.5, 0, 0, 1570), pde_stage(5.5, 6, 0, 10, 0)},
                         1, 1);
}

StageSchedule example2_schedule() {
    return StageSchedule({pde_stage(0, 1, 790, 0, 0), pde_stage(1, 2, 0, 100, 0), pde_stage(2, 3, 0, 100, 0),
                          pde_stage(3, 5, 100, 0, 0), pde_stage(5, 6, 0, 0, 790)},
                         1, 1);
}

}  // namespace

TEST_CASE("cylinder volume and inverse") {
    const auto tank = TankGeometry::cylinder(400.0, 3.0);
    CHECK(tank.total_volume() == doctest::Approx(1200.0));
    CHECK(tank.volume_at(2.0) == doctest::Approx(400.0));
    CHECK(tank.depth_at_volume(1190.0) == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(tank.area(1.3) == 400.0);
}

TEST_CASE("matched cone reproduces both volume constraints") {
    const auto cone = TankGeometry::cone_matching(3.0, 1200.0, 1.8429, 400.0);
    CHECK(std::fabs(cone.total_volume() - 1200.0) / 1200.0 < 1e-10);
    CHECK(std::fabs(cone.volume_at(1.8429) - 400.0) / 400.0 < 1e-10);
    // wider at the top
    CHECK(cone.area(0.0) > cone.area(3.0));
    for (double v : {10.0, 400.0, 777.0, 1199.0})
        CHECK(std::fabs(cone.volume_at(cone.depth_at_volume(v)) - v) <= 1e-10 * v);
}

TEST_CASE("example 1 surface trajectory") {
    const auto tank = TankGeometry::cylinder(400.0, 3.0);
    const SurfaceTrajectory traj(tank, example1_schedule(), 2.0);
    CHECK(std::fabs(traj.zbar(3600.0) - 0.025) / 0.025 < 1e-10);
    CHECK(std::fabs(traj.volume(6 * 3600.0) - 400.0) / 400.0 < 1e-10);
    CHECK(traj.zbar(1800.0) == doctest::Approx(1.0125).epsilon(1e-12));
    CHECK(traj.gamma(1.0, 1800.0) == 0);
    CHECK(traj.gamma(2.9, 1800.0) == 1);

    // monotone while filling, rising while drawing
    double prev = traj.zbar(0.0);
    for (int i = 1; i <= 36; ++i) {
        const double z = traj.zbar(i * 100.0);
        CHECK(z < prev);
        prev = z;
    }
    prev = traj.zbar(5 * 3600.0);
    for (int i = 1; i <= 18; ++i) {
        const double z = traj.zbar(5 * 3600.0 + i * 100.0);
        CHECK(z > prev);
        prev = z;
    }
}

TEST_CASE("example 2 volume checkpoints") {
    const auto cone = TankGeometry::cone_matching(3.0, 1200.0, 1.8429, 400.0);
    const SurfaceTrajectory traj(cone, example2_schedule(), 1.8429);
    const double t[] = {0, 1, 2, 3, 5, 6};
    const double v[] = {400, 1190, 1090, 990, 1190, 400};
    for (int i = 0; i < 6; ++i) CHECK(std::fabs(traj.volume(t[i] * 3600.0) - v[i]) / v[i] < 1e-10);
}

TEST_CASE("gamma on empty and full tanks") {
    const auto tank = TankGeometry::cylinder(1.0, 1.0);
    const StageSchedule idle({pde_stage(0, 1, 0, 0, 0)}, 1, 1);
    CHECK(SurfaceTrajectory(tank, idle, 1.0).gamma(0.5, 0.0) == 0);
    CHECK(SurfaceTrajectory(tank, idle, 0.0).gamma(1.0 - 1e-9, 0.0) == 1);
}

TEST_CASE("infeasible schedules are rejected") {
    const auto tank = TankGeometry::cylinder(400.0, 3.0);
    const StageSchedule overfill({pde_stage(0, 1, 1000, 0, 0)}, 1, 1);
    CHECK_THROWS_AS(SurfaceTrajectory(tank, overfill, 2.0), ScheduleError);
    const StageSchedule empty({pde_stage(0, 1, 0, 0, 500)}, 1, 1);
    CHECK_THROWS_AS(SurfaceTrajectory(tank, empty, 2.0), ScheduleError);
}
