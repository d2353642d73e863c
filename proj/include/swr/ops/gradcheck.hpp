#pragma once

#include <functional>
#include <string>

#include "swr/core/params.hpp"

namespace swr::ops {

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
  std::string worst_coord;  // "name[r,c]" of the worst-matching coordinate
};

// Central-difference check of the analytic gradients stored in `params`.
// `f` evaluates the scalar objective at the current parameter values and must
// not touch the grad buffers; the caller runs its backward pass once before
// calling so that each grad buffer holds the analytic gradient at the
// unperturbed point. Each coordinate is perturbed by ±step and restored.
// Relative error per coordinate is |a−n| / max(|a|,|n|,1e-8); pass iff the
// maximum over all coordinates is < tol. A non-finite objective value raises
// an error naming the perturbed coordinate.
GradCheckReport finite_diff_check(ParamStore& params,
                                  const std::function<double()>& f,
                                  double step, double tol);

}  // namespace swr::ops
