#include <doctest.h>

#include <cmath>
#include <random>

#include "sbr/orchestrator.hpp"

using namespace sbr;

namespace {

struct Tank {
    TankGeometry tank;
    ReactionModel reactions = make_denitrification_model({});
    Stage stage{"Settle", 0.0, 3600.0, 0.0, 0.0, 0.0, {0.0, 0.0}, {0.0, 0.0, 0.0}, ModelKind::PDE};
    StageSchedule schedule{{stage}, 2, 3};
    SurfaceTrajectory trajectory;
    SettlerSolver solver;

    Tank(TankGeometry g, double zbar0, std::size_t cells = 100)
        : tank(std::move(g)),
          trajectory(tank, schedule, zbar0),
          solver(tank, SettlingModel{MaterialParams{}}, reactions, schedule, trajectory, cells) {}
};

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)); }

}  // namespace

TEST_CASE("water concentration") {
    const std::vector<double> none(3, 0.0);
    CHECK(water_concentration(0.0, none) == 998.0);
    CHECK(water_concentration(10.0, none) == doctest::Approx(998.0 * (1 - 10.0 / 1050.0)));
    CHECK(water_concentration(10.0, none) == doctest::Approx(988.5).epsilon(1e-4));
    const std::vector<double> feed{6e-3, 9e-4, 0.0};
    CHECK(water_concentration(0.0, feed) == doctest::Approx(997.9931).epsilon(1e-12));
}

TEST_CASE("PDE to ODE averages by volume") {
    const Tank t(TankGeometry::cylinder(400.0, 3.0), 1.0);
    const MixtureState two = t.solver.state_from_profile(0.0, {{1.0, 2.0, {50.0 / 7, 20.0 / 7}, {0.0, 0.0, 0.0}}});
    const MixedState m = pde_to_ode(two, t.trajectory.volume(0.0));
    CHECK(m.C[0] + m.C[1] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(m.V == doctest::Approx(800.0));

    const std::vector<double> C{3.0, 1.0}, S{1e-3, 2e-3, 3e-3};
    const MixtureState u = t.solver.uniform_state(0.0, C, S);
    const MixedState mu = pde_to_ode(u, t.trajectory.volume(0.0));
    for (int k = 0; k < 2; ++k) CHECK(mu.C[k] == doctest::Approx(C[k]).epsilon(1e-15));
    const MixtureState back = ode_to_pde(mu, t.solver);
    for (std::size_t j = 0; j < back.cells(); ++j) {
        for (std::size_t k = 0; k < 2; ++k) CHECK(back.C_at(j)[k] == doctest::Approx(u.C_at(j)[k]).epsilon(1e-14));
        for (std::size_t k = 0; k < 3; ++k) CHECK(back.S_at(j)[k] == doctest::Approx(u.S_at(j)[k]).epsilon(1e-14));
    }
}

TEST_CASE("model switches preserve mass on random profiles") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uc(0.0, 4.0), us(0.0, 1e-2), uz(0.05, 2.9);
    for (int trial = 0; trial < 20; ++trial) {
        const double zbar = uz(rng);
        const Tank t(trial % 2 ? TankGeometry::cylinder(400.0, 3.0)
                               : TankGeometry::cone_matching(3.0, 1200.0, 1.8429, 400.0),
                     zbar, 37 + trial);
        std::vector<ProfileLayer> layers;
        const int n = 5;
        for (int i = 0; i < n; ++i) {
            const double a = zbar + (3.0 - zbar) * i / n, b = zbar + (3.0 - zbar) * (i + 1) / n;
            layers.push_back({a, b, {uc(rng), uc(rng)}, {us(rng), us(rng), us(rng)}});
        }
        const MixtureState s = t.solver.state_from_profile(0.0, layers);
        const auto m0 = s.total_mass();
        const MixedState m = pde_to_ode(s, t.trajectory.volume(0.0));
        const MixtureState back = ode_to_pde(m, t.solver);
        const auto m1 = back.total_mass();
        for (std::size_t i = 0; i < m0.size(); ++i) {
            CHECK(rel(m0[i], m.V * (i < 2 ? m.C[i] : m.S[i - 2])) <= 1e-12);
            CHECK(rel(m0[i], m1[i]) <= 1e-12);
        }
        for (std::size_t j = 0; j < back.top; ++j) CHECK(back.X(j) == 0.0);
    }
}

TEST_CASE("closure report") {
    MassLedger l(1, 1);
    l.inflow = {5.0, 1.0};
    l.underflow = {1.0, 0.0};
    l.effluent = {2.0, 0.5};
    l.reacted = {-1.0, 0.25};
    const auto lines = ledger_closure(l, {10.0, 2.0}, {11.0, 2.75}, {"X", "S"});
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].residual == doctest::Approx(0.0));
    CHECK(lines[1].residual == doctest::Approx(0.0));
    const auto off = ledger_closure(l, {10.0, 2.0}, {12.0, 2.75}, {"X", "S"});
    CHECK(off[0].relative > 0.05);
}
