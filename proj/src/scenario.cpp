#include "sbr/scenario.hpp"

#include <memory>

#include "sbr/error.hpp"

namespace sbr {

TankGeometry GeometrySpec::build() const {
    switch (kind) {
        case Kind::Cylinder:
            return TankGeometry::cylinder(area_m2, depth_m);
        case Kind::Cone:
            return TankGeometry::truncated_cone(r_top_m, r_bottom_m, depth_m);
        case Kind::ConeMatching:
            return TankGeometry::cone_matching(depth_m, total_volume_m3, reference_depth_m, reference_volume_m3);
    }
    throw DomainError("unknown geometry kind");
}

ReactionModel ReactionSpec::build() const {
    if (model == "none") return make_inert_model(solids, solubles);
    if (model != "denitrification") throw DomainError("unknown reaction model '" + model + "'");
    auto law = std::make_shared<DenitrificationRates>(denitrification);
    return ReactionModel(kDenitrificationSolids, kDenitrificationSolubles,
                         sigma_C ? *sigma_C : denitrification_sigma_C(denitrification),
                         sigma_S ? *sigma_S : denitrification_sigma_S(denitrification), std::move(law));
}

}  // namespace sbr
