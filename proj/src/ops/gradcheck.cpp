#include "swr/ops/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swr::ops {

namespace {

std::string coord_name(const Param& p, std::size_t flat) {
  return p.name + "[" + std::to_string(flat / p.value.cols) + "," +
         std::to_string(flat % p.value.cols) + "]";
}

}  // namespace

GradCheckReport finite_diff_check(ParamStore& params,
                                  const std::function<double()>& f,
                                  double step, double tol) {
  if (!(step > 0.0))
    throw std::invalid_argument("finite_diff_check: step must be > 0");
  GradCheckReport rep;
  for (auto& p : params.entries()) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value.data[i];
      p.value.data[i] = saved + step;
      const double fp = f();
      p.value.data[i] = saved - step;
      const double fm = f();
      p.value.data[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::runtime_error(
            "finite_diff_check: non-finite objective while perturbing " +
            coord_name(p, i));
      const double numeric = (fp - fm) / (2.0 * step);
      const double analytic = p.grad.data[i];
      const double denom =
          std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      const double rel = std::fabs(analytic - numeric) / denom;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_coord = coord_name(p, i);
      }
    }
  }
  rep.pass = rep.max_rel_err < tol;
  return rep;
}

}  // namespace swr::ops
