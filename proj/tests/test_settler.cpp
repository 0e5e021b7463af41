#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sbr/error.hpp"
#include "sbr/settler.hpp"

using namespace sbr;

namespace {

struct Batch {
    TankGeometry tank;
    SettlingModel settling{MaterialParams{}};
    ReactionModel reactions;
    Stage stage;
    StageSchedule schedule;
    SurfaceTrajectory trajectory;
    SettlerSolver solver;

    Batch(std::size_t cells, double zbar0, ReactionModel r, Stage s, double area = 400.0)
        : tank(TankGeometry::cylinder(area, 3.0)),
          reactions(std::move(r)),
          stage(std::move(s)),
          schedule({stage}, reactions.k_C(), reactions.k_S()),
          trajectory(tank, schedule, zbar0),
          solver(tank, settling, reactions, schedule, trajectory, cells) {}
};

Stage closed(double duration, std::size_t kc = 1, std::size_t ks = 1) {
    return Stage{"Settle", 0.0, duration, 0.0, 0.0, 0.0, std::vector<double>(kc, 0.0), std::vector<double>(ks, 0.0),
                 ModelKind::PDE};
}

void run_to(const SettlerSolver& solver, MixtureState& s, double t) {
    while (s.t < t) solver.advance_to(s, std::min(t, s.t + solver.cfl_dt(s)));
}

double total_X(const MixtureState& s) {
    double m = 0.0;
    for (std::size_t j = 0; j < s.cells(); ++j) m += s.X(j) * s.volume[j];
    return m;
}

}  // namespace

TEST_CASE("grid") {
    const auto tank = TankGeometry::cylinder(400.0, 3.0);
    const Grid g(tank, 100);
    CHECK(g.dz() * 100 == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(g.face_z(100) == 3.0);
    CHECK(g.cell_volume(7) == doctest::Approx(12.0));
    CHECK(g.top_cell(0.0) == 0);
    CHECK_THROWS(Grid(tank, 9));
}

TEST_CASE("zero state is a fixed point") {
    Batch b(50, 0.0, make_denitrification_model({}), closed(100.0, 2, 3));
    const std::vector<double> C(2, 0.0), S(3, 0.0);
    MixtureState s = b.solver.uniform_state(0.0, C, S);
    run_to(b.solver, s, 100.0);
    for (double c : s.C) CHECK(c == 0.0);
    for (double x : s.S) CHECK(x == 0.0);
}

TEST_CASE("closed cylinder conserves solids per step") {
    Batch b(100, 0.0, make_inert_model({"X"}, {"S"}), closed(3600.0));
    const std::vector<double> C{3.0}, S{1e-3};
    MixtureState s = b.solver.uniform_state(0.0, C, S);
    const double m0 = total_X(s);
    for (int i = 0; i < 200; ++i) {
        const double before = total_X(s);
        b.solver.step(s, b.solver.cfl_dt(s));
        CHECK(std::fabs(total_X(s) - before) <= 1e-12 * before);
    }
    CHECK(std::fabs(total_X(s) - m0) <= 1e-12 * m0);
    // a clear zone forms at the top
    CHECK(s.X(0) < 3.0);
    CHECK(s.X(99) > 3.0);
}

TEST_CASE("step rejects oversized time steps") {
    Batch b(40, 0.0, make_inert_model({"X"}, {"S"}), closed(3600.0));
    const std::vector<double> C{8.0}, S{0.0};
    MixtureState s = b.solver.uniform_state(0.0, C, S);
    CHECK_THROWS_AS(b.solver.step(s, 1.5 * b.solver.cfl_dt(s)), StepSizeError);
}

TEST_CASE("CFL step shrinks with the grid") {
    const std::vector<double> C{12.0}, S{0.0};
    Batch coarse(10, 0.0, make_inert_model({"X"}, {"S"}), closed(10.0));
    Batch fine(100, 0.0, make_inert_model({"X"}, {"S"}), closed(10.0));
    const double dt10 = coarse.solver.cfl_dt(coarse.solver.uniform_state(0.0, C, S));
    const double dt100 = fine.solver.cfl_dt(fine.solver.uniform_state(0.0, C, S));
    CHECK(dt10 >= dt100);
    // compression active, so far more than the hyperbolic factor of 10
    CHECK(dt10 / dt100 > 10.0);
    const std::vector<double> dilute{2.0};
    CHECK(coarse.solver.cfl_dt(coarse.solver.uniform_state(0.0, dilute, S)) >= dt10);
}

TEST_CASE("monotone on randomized batch settling") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t N = 10 + rng() % 31;
        Batch b(N, 0.0, make_inert_model({"X"}, {"S"}), closed(1e6));
        std::uniform_real_distribution<double> u(0.0, 15.0), gap(0.0, 4.0);
        std::vector<ProfileLayer> lo, hi;
        const double dz = 3.0 / static_cast<double>(N);
        for (std::size_t j = 0; j < N; ++j) {
            const double x = u(rng);
            const double y = std::min(29.0, x + (j % 3 == 0 ? 0.0 : gap(rng)));
            lo.push_back({j * dz, (j + 1) * dz, {x}, {0.0}});
            hi.push_back({j * dz, (j + 1) * dz, {y}, {0.0}});
        }
        MixtureState a = b.solver.state_from_profile(0.0, lo);
        MixtureState c = b.solver.state_from_profile(0.0, hi);
        for (int n = 0; n < 100; ++n) {
            const double dt = std::min(b.solver.cfl_dt(a), b.solver.cfl_dt(c));
            b.solver.step(a, dt);
            b.solver.step(c, dt);
        }
        for (std::size_t j = 0; j < N; ++j) CHECK(a.X(j) <= c.X(j) + 1e-12);
    }
}

TEST_CASE("cells above the surface stay empty while filling") {
    const auto reactions = make_denitrification_model({});
    Stage fill{"Fill", 0.0, 1800.0, 790.0 / 3600.0, 0.0, 0.0, {0.0, 0.0}, {6e-3, 9e-4, 0.0}, ModelKind::PDE};
    Batch b(60, 2.0, reactions, fill);
    MixtureState s = b.solver.state_from_profile(0.0, {{2.0, 3.0, {5.0 * 10 / 7, 2.0 * 10 / 7}, {6e-3, 9e-4, 0.0}}});
    for (double t = 60.0; t <= 1800.0; t += 60.0) {
        run_to(b.solver, s, t);
        CHECK(s.zbar == doctest::Approx(b.trajectory.zbar(t)).epsilon(1e-14));
        for (std::size_t j = 0; j < s.top; ++j) {
            CHECK(s.volume[j] == 0.0);
            for (double c : s.C_at(j)) CHECK(c == 0.0);
            for (double x : s.S_at(j)) CHECK(x == 0.0);
        }
        b.solver.check_invariants(s);
    }
    const double wet = std::accumulate(s.volume.begin(), s.volume.end(), 0.0);
    CHECK(wet == doctest::Approx(b.trajectory.volume(1800.0)).epsilon(1e-13));
}

TEST_CASE("serial and OpenMP kernels agree bitwise") {
    const auto reactions = make_denitrification_model({});
    Stage draw{"Draw", 0.0, 3600.0, 0.0, 10.0 / 3600.0, 400.0 / 3600.0, {0.0, 0.0}, {0.0, 0.0, 0.0}, ModelKind::PDE};
    Batch b(5000, 0.5, reactions, draw);
    const MixtureState s = b.solver.state_from_profile(
        0.0, {{0.5, 2.0, {2.0, 0.8}, {1e-3, 5e-4, 1e-3}}, {2.0, 3.0, {9.0, 3.6}, {1e-3, 5e-4, 1e-3}}});
    const auto in = b.solver.kernel_inputs(s, draw);
    kernels::FaceCoefficients fs, fp;
    kernels::face_coefficients_serial(in, fs);
    kernels::face_coefficients_omp(in, fp);
    CHECK(fs.a == fp.a);
    CHECK(fs.b == fp.b);
    CHECK(fs.as == fp.as);
    CHECK(fs.bs == fp.bs);
    std::vector<double> rs(in.cells), rp(in.cells);
    kernels::stability_rates_serial(in, fs, rs);
    kernels::stability_rates_omp(in, fp, rp);
    CHECK(rs == rp);
    const double dt = 0.9 / *std::max_element(rs.begin(), rs.end());
    kernels::StepOutputs os, op;
    kernels::update_masses_serial(in, fs, dt, os);
    kernels::update_masses_omp(in, fp, dt, op);
    CHECK(os.mass_C == op.mass_C);
    CHECK(os.mass_S == op.mass_S);
    CHECK(os.reacted == op.reacted);
}

TEST_CASE("zero duration stage is the identity") {
    Batch b(30, 1.0, make_inert_model({"X"}, {"S"}), closed(0.0));
    MixtureState s = b.solver.state_from_profile(0.0, {{1.0, 3.0, {7.0}, {1e-3}}});
    const MixtureState before = s;
    MassLedger ledger(1, 1);
    EffluentHistory history;
    SampleClock clock{30.0, 1};
    b.solver.run_stage(s, b.stage, clock, [](const MixtureState&) {}, ledger, history);
    CHECK(s.C == before.C);
    CHECK(s.S == before.S);
    CHECK(s.t == 0.0);
}
