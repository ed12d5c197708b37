#pragma once

#include "evolab/evo_solver.hpp"
#include "evolab/homogenize.hpp"
#include "evolab/material_law.hpp"

#include <json.hpp>

#include <iosfwd>

namespace evolab {

nlohmann::json to_json(const LawCertificate& cert);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const FMembership& check);
nlohmann::json to_json(const LinearGrowthResult& check);
nlohmann::json to_json(const MomentTable& table);
nlohmann::json to_json(const GConvergenceReport& report);
nlohmann::json to_json(const LongitudinalResult& result);
nlohmann::json to_json(const OrthogonalResult& result);
nlohmann::json to_json(const ConstantProfileCheck& check);

/// Pairing table rows: n,test_id,re,im,defect.
void write_pairing_csv(std::ostream& os, const GConvergenceReport& report);

}  // namespace evolab
