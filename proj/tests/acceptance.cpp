// Acceptance checks: one PASS/FAIL line per criterion, exit code 1 if any
// fails. Runs both bundled examples, so expect ~10 s in a Release build.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "sbr/mixed_ode.hpp"
#include "sbr/scenario_io.hpp"

using namespace sbr;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
    std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Scenario bundled(const std::string& name, std::size_t cells = 100) {
    for (const auto& [file, text] : bundled_scenarios())
        if (file == name) {
            Scenario s = parse_scenario(text, file);
            s.cells = cells;
            return s;
        }
    throw std::runtime_error("missing bundled scenario " + name);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool invariants_hold(const RunResult& r, double X_max) {
    const auto& st = r.ledger.invariants;
    return st.steps > 0 && st.min_C >= 0.0 && st.min_S >= 0.0 && st.max_X <= X_max && st.min_W >= 0.0;
}

const FieldSample& field_at(const RunResult& r, double t) {
    for (const auto& f : r.fields)
        if (f.t == t) return f;
    throw std::runtime_error("no field sample at t = " + std::to_string(t));
}

// Closed-form volume after each stage, independent of the trajectory code.
double volume_by_arithmetic(const Scenario& s, double V0, double t) {
    double V = V0;
    for (const auto& st : s.stages) {
        const double a = st.t_start, b = std::min(st.t_end, t);
        if (b <= a) break;
        V += (b - a) * (st.Q_f - st.Q_u - st.Q_e);
    }
    return V;
}

void trajectory_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario e1 = bundled("example1.json"), e2 = bundled("example2.json");
    const StageSchedule sch1(e1.stages, 2, 3), sch2(e2.stages, 2, 3);
    const SurfaceTrajectory tr1(e1.geometry.build(), sch1, e1.zbar0);
    const TankGeometry cone = e2.geometry.build();
    const SurfaceTrajectory tr2(cone, sch2, e2.zbar0);

    double worst = std::fabs(tr1.zbar(3600.0) - 0.025) / 0.025;
    worst = std::max(worst, std::fabs(tr1.volume(6 * 3600.0) - 400.0) / 400.0);
    const double hours[] = {0, 1, 2, 3, 5, 6};
    const double expected[] = {400, 1190, 1090, 990, 1190, 400};
    for (int i = 0; i < 6; ++i) {
        const double t = hours[i] * 3600.0;
        const double exact = volume_by_arithmetic(e2, cone.volume_at(e2.zbar0), t);
        worst = std::max(worst, std::fabs(tr2.volume(t) - exact) / exact);
        worst = std::max(worst, std::fabs(tr2.volume(t) - expected[i]) / expected[i]);
    }
    const double wall = seconds_since(t0);
    report(worst <= 1e-10 && wall < 1.0, "surface trajectory",
           fmt("zbar(1 h) = %.15g m, worst relative error %.2e, %.3f s", tr1.zbar(3600.0), worst, wall));
}

void reaction_invariants() {
    const TankGeometry tank = TankGeometry::cylinder(400.0, 3.0);
    const Stage react{"React", 0.0, 7200.0, 0.0, 0.0, 0.0, {0.0, 0.0}, {0.0, 0.0, 0.0}, ModelKind::ODE};
    const StageSchedule sch({react}, 2, 3);
    const SurfaceTrajectory tr(tank, sch, 0.025);
    const MixedOdeIntegrator ode(make_denitrification_model({}), tr, MaterialParams{});
    const double X = 10.0 * 400.0 / 1190.0;
    MixedState s{0.0, 1190.0, {X * 5 / 7, X * 2 / 7}, {6e-3, 9e-4, 0.0}};
    auto i1 = [](const MixedState& m) { return m.S[0] + m.S[2]; };
    auto i2 = [](const MixedState& m) { return m.C[0] + m.C[1] + m.S[1] - 2.86 * m.S[0]; };
    const double a = i1(s), b = i2(s);
    ode.advance(s, react, 7200.0);
    const double d1 = std::fabs(i1(s) - a) / a, d2 = std::fabs(i2(s) - b) / b;
    report(d1 <= 1e-10 && d2 <= 1e-10, "reaction invariants",
           fmt("nitrogen drift %.2e, COD drift %.2e over 2 h", d1, d2));
}

void godunov_oracle() {
    const SettlingModel m{MaterialParams{}};
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 30.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng), b = u(rng);
        const double lo = std::min(a, b), hi = std::max(a, b);
        double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
        const int n = 100000;
        for (int k = 0; k < n; ++k) {
            const double x = lo + (hi - lo) * k / (n - 1);
            const double f = x * m.v_hs(x);
            fmin = std::min(fmin, f);
            fmax = std::max(fmax, f);
        }
        worst = std::max(worst, std::fabs(m.godunov_flux(a, b) - (a <= b ? fmin : fmax)));
    }
    report(worst <= 1e-9, "Godunov oracle", fmt("max deviation %.2e on 1000 pairs", worst));
}

}  // namespace

int main() {
    try {
        trajectory_exactness();

        const Scenario e1 = bundled("example1.json"), e2 = bundled("example2.json");
        const RunResult r1 = run(e1);
        const RunResult r2 = run(e2);

        report(r1.worst_closure() <= 1e-8 && r2.worst_closure() <= 1e-8 && r1.wall_seconds < 60.0 &&
                   r2.wall_seconds < 60.0,
               "conservation",
               fmt("closure %.2e / %.2e, wall %.2f s / %.2f s (N = 100)", r1.worst_closure(), r2.worst_closure(),
                   r1.wall_seconds, r2.wall_seconds));

        const double X_max = e1.material.X_max;
        const auto& s1 = r1.ledger.invariants;
        const auto& s2 = r2.ledger.invariants;
        report(invariants_hold(r1, X_max) && invariants_hold(r2, X_max), "invariant region",
               fmt("min C %.2e, min S %.2e, max X %.3f, min W %.2f over %zu steps",
                   std::min(s1.min_C, s2.min_C), std::min(s1.min_S, s2.min_S), std::max(s1.max_X, s2.max_X),
                   std::min(s1.min_W, s2.min_W), s1.steps + s2.steps));

        reaction_invariants();

        {
            // all of the mixture at 1.5 h
            const FieldSample& f = field_at(r1, 5400.0);
            double no3 = 0.0;
            const std::size_t ks = r1.soluble_names.size();
            for (std::size_t j = 0; j < f.X.size(); ++j)
                if (r1.cell_centers[j] > f.zbar) no3 = std::max(no3, f.S[j * ks]);
            std::vector<double> ss;
            for (const auto& o : r1.outlets)
                if (o.t >= 3600.0 && o.t <= 3 * 3600.0) ss.push_back(o.S_u[1]);
            const auto low = std::min_element(ss.begin(), ss.end());
            const bool dip = low != ss.begin() && low + 1 != ss.end() && ss.front() > *low && ss.back() > *low;
            report(no3 < 1e-5 && dip, "denitrification",
                   fmt("max S_NO3(1.5 h) = %.2e; S_S %.3e -> min %.3e at %.2f h -> %.3e", no3, ss.front(), *low,
                       1.0 + 2.0 * static_cast<double>(low - ss.begin()) / static_cast<double>(ss.size() - 1),
                       ss.back()));
        }

        godunov_oracle();

        {
            const RunResult r50 = run(bundled("example1.json", 50));
            const RunResult r200 = run(bundled("example1.json", 200));
            auto l1 = [](const RunResult& coarse, const RunResult& fine) {
                const auto& a = field_at(coarse, 5 * 3600.0).X;
                const auto& b = field_at(fine, 5 * 3600.0).X;
                const double dz = 3.0 / static_cast<double>(a.size());
                double d = 0.0;
                for (std::size_t j = 0; j < a.size(); ++j) d += std::fabs(a[j] - 0.5 * (b[2 * j] + b[2 * j + 1])) * dz;
                return d;
            };
            const double d1 = l1(r50, r1), d2 = l1(r1, r200);
            bool ok = d2 < d1;
            for (const RunResult* r : {&r50, &r1, &r200}) ok = ok && invariants_hold(*r, X_max) && r->closed();
            report(ok, "grid refinement",
                   fmt("L1(50,100) = %.4f, L1(100,200) = %.4f kg/m^2; closure %.1e / %.1e / %.1e", d1, d2,
                       r50.worst_closure(), r1.worst_closure(), r200.worst_closure()));
        }

        {
            const double t0 = 5 * 3600.0, t1 = 6 * 3600.0;
            const auto& before = r2.stage_ledgers.at(3);
            const auto& after = r2.stage_ledgers.at(4);
            auto pipe = r2.history.extracted_solids(t0, t1);
            const auto sub = r2.history.extracted_substrates(t0, t1);
            pipe.insert(pipe.end(), sub.begin(), sub.end());
            double worst = 0.0;
            for (std::size_t i = 0; i < pipe.size(); ++i) {
                const double tank = after.effluent[i] - before.effluent[i];
                const double scale = std::max(std::fabs(tank), std::fabs(pipe[i]));
                if (scale > 0.0) worst = std::max(worst, std::fabs(tank - pipe[i]) / scale);
            }
            double peak_solids = 0.0;
            for (const auto& e : r2.history.entries())
                if (e.t >= t0 && e.t < t1) peak_solids = std::max(peak_solids, e.C[0] + e.C[1]);
            report(worst <= 1e-8 && peak_solids > 0.0, "effluent handshake",
                   fmt("worst relative mismatch %.2e; peak effluent solids %.3e kg/m^3", worst, peak_solids));
        }
    } catch (const std::exception& e) {
        std::printf("FAIL  aborted: %s\n", e.what());
        return 1;
    }
    std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria FAILED");
    return failures == 0 ? 0 : 1;
}
