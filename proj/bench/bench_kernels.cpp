// Serial vs OpenMP timing of the settling kernels on a settled-bed state.
//   sbr_bench [cells...]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "sbr/settler.hpp"

namespace {

template <class F>
double seconds_per_call(F&& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> sizes{1000, 10000, 100000};
    if (argc > 1) {
        sizes.clear();
        for (int i = 1; i < argc; ++i) sizes.push_back(std::strtoul(argv[i], nullptr, 10));
    }
    using namespace sbr;
    const TankGeometry tank = TankGeometry::cylinder(400.0, 3.0);
    const SettlingModel settling{MaterialParams{}};
    const ReactionModel reactions = make_denitrification_model({});
    Stage settle{"Settle", 0.0, 3600.0, 0.0, 0.0, 0.0, {0.0, 0.0}, {0.0, 0.0, 0.0}, ModelKind::PDE};
    const StageSchedule schedule({settle}, 2, 3);
    const SurfaceTrajectory trajectory(tank, schedule, 0.5);

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%10s %14s %14s %8s %6s\n", "cells", "serial [ms]", "openmp [ms]", "speedup", "same");
    for (std::size_t N : sizes) {
        const SettlerSolver solver(tank, settling, reactions, schedule, trajectory, N);
        // Dilute top, compressed bed below 2 m.
        const std::vector<ProfileLayer> layers{{0.5, 2.0, {2.0, 0.8}, {1e-3, 5e-4, 1e-3}},
                                               {2.0, 3.0, {9.0, 3.6}, {1e-3, 5e-4, 1e-3}}};
        const MixtureState state = solver.state_from_profile(0.0, layers);
        const auto in = solver.kernel_inputs(state, settle);
        const double dt = solver.cfl_dt(state);
        const int reps = N >= 100000 ? 20 : 200;

        kernels::FaceCoefficients fs, fp;
        kernels::StepOutputs os, op;
        const double ts = seconds_per_call(
            [&] {
                kernels::face_coefficients_serial(in, fs);
                kernels::update_masses_serial(in, fs, dt, os);
            },
            reps);
        const double tp = seconds_per_call(
            [&] {
                kernels::face_coefficients_omp(in, fp);
                kernels::update_masses_omp(in, fp, dt, op);
            },
            reps);
        const bool same = fs.a == fp.a && fs.b == fp.b && os.mass_C == op.mass_C && os.mass_S == op.mass_S;
        std::printf("%10zu %14.4f %14.4f %8.2f %6s\n", N, 1e3 * ts, 1e3 * tp, ts / tp, same ? "yes" : "NO");
        if (!same) return 1;
    }
    return 0;
}
