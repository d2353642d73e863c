#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swr/ops/gradcheck.hpp"

namespace swr::cli {

// One finite-difference target: an elementary op, a loss, or a full
// model+loss composition. run(seed) draws fresh random inputs, fills the
// analytic gradients, and hands the matching objective to finite_diff_check
// with this unit's step and tolerance.
struct GradUnit {
  std::string name;
  std::string scope;  // "ops", "losses" or "models"
  double step = 0.0;
  double tol = 0.0;
  std::function<ops::GradCheckReport(std::uint64_t seed)> run;
};

// The units of one scope; "all" concatenates ops, losses, models. Elementary
// ops and losses check at tol 1e-6, compositions at 1e-4. An unknown scope
// raises std::invalid_argument listing the valid ones.
std::vector<GradUnit> gradcheck_units(const std::string& scope);

struct GradUnitResult {
  std::string name;
  double max_rel_err = 0.0;
  std::string worst_coord;  // coordinate behind max_rel_err, "tensor[r,c]"
  double tol = 0.0;
  bool pass = false;
};

// Runs every unit on seeds 0..seeds-1 and keeps the worst coordinate per
// unit; pass means every seed stayed under the unit's tolerance.
std::vector<GradUnitResult> run_gradcheck(const std::vector<GradUnit>& units,
                                          std::size_t seeds);

}  // namespace swr::cli
