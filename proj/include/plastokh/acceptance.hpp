#pragma once

#include <ostream>
#include <string>

#include "plastokh/config.hpp"
#include "plastokh/report.hpp"

namespace plastokh {

/// Desk-scale configuration used by the acceptance gate. The model
/// parameters are chosen so the exterior gauge inequality
/// ybar >= 2 (kY + beta L) / c0 and the interior slack
/// 1 - 2 beta L ybar1 > 0 both hold with margin.
RunConfig acceptance_config();

/// Runs the ten acceptance criteria, printing one pass/fail line per
/// criterion to `log`. All tolerances are pinned here.
RunReport run_acceptance(const RunConfig& cfg, std::ostream& log);

/// Deterministic artifact bundle (CSV exports) for one configuration;
/// used by the determinism criterion and by the oracle-suite command.
void export_artifacts(const RunConfig& cfg, const std::string& dir);

} // namespace plastokh
