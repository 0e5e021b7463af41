#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sbr/constitutive.hpp"
#include "sbr/geometry.hpp"
#include "sbr/reactions.hpp"
#include "sbr/settler.hpp"

namespace sbr {

/// Tank shape as written in a scenario file.
struct GeometrySpec {
    enum class Kind { Cylinder, Cone, ConeMatching };
    Kind kind = Kind::Cylinder;
    double depth_m = 3.0;
    double area_m2 = 400.0;           // cylinder
    double r_top_m = 0.0;             // cone
    double r_bottom_m = 0.0;          // cone
    double total_volume_m3 = 0.0;     // matched cone
    double reference_depth_m = 0.0;   // matched cone: V(reference_depth) = reference_volume
    double reference_volume_m3 = 0.0;

    TankGeometry build() const;
};

struct ReactionSpec {
    std::string model = "none";  // "none" or "denitrification"
    DenitrificationParams denitrification;
    std::vector<std::string> solids;
    std::vector<std::string> solubles;
    std::optional<std::vector<double>> sigma_C;  // row-major override
    std::optional<std::vector<double>> sigma_S;

    ReactionModel build() const;
};

struct OutputPaths {
    std::string outlets = "outlets.csv";
    std::string fields = "fields.csv";
    std::string ledger = "ledger.json";
};

/// Everything needed for one run, in SI units.
struct Scenario {
    std::string name;
    GeometrySpec geometry;
    MaterialParams material;
    ReactionSpec reactions;
    std::vector<Stage> stages;
    double zbar0 = 0.0;
    std::vector<ProfileLayer> initial;
    std::size_t cells = 100;
    double output_interval = 30.0;  // s
    double field_interval = 300.0;  // s, a multiple of output_interval
    double ode_dt_max = 1.0;        // s
    double cfl_safety = 0.9;
    double ledger_tolerance = 1e-8;
    OutputPaths outputs;
};

}  // namespace sbr
