#include "helfrich/params.hpp"

#include <cmath>
#include <stdexcept>

namespace helfrich {

std::optional<Rejection> validate(const ParameterSet& params) {
  const std::pair<const char*, double> fields[] = {
      {"kc", params.kc},         {"kbar", params.kbar}, {"c0", params.c0},
      {"lambda", params.lambda}, {"p", params.p},
  };
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value))
      return Rejection{name, std::string(name) + " must be finite"};
  }
  if (!(params.kc > 0.0)) return Rejection{"kc", "k_c must be > 0"};
  return std::nullopt;
}

std::optional<Rejection> validate(const Tolerances& tol) {
  if (!(tol.geom_eps > 0.0)) return Rejection{"geom_eps", "geom_eps must be > 0"};
  if (!(tol.root_eps > 0.0)) return Rejection{"root_eps", "root_eps must be > 0"};
  if (!(tol.grad_tol > 0.0)) return Rejection{"grad_tol", "grad_tol must be > 0"};
  return std::nullopt;
}

ParameterSet scale_params(const ParameterSet& params, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::domain_error("scale_params: rho must be a positive finite number");
  ParameterSet out = params;
  out.c0 = params.c0 / rho;
  out.lambda = params.lambda / (rho * rho);
  out.p = params.p / (rho * rho * rho);
  return out;
}

} // namespace helfrich
