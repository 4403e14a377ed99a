#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sis/common.hpp"

namespace sis {

enum class IncidenceFamily {
  mass_action,             // 1 - u
  london_yorke,            // (1 - u)(1 - a u)
  power,                   // (1 - u)^alpha
  saturation,              // (1 - u)/(1 + c u)
  exponential_saturation,  // (1 - u)(1 - exp(-c u))/(c u)
  log_saturation,          // (1 - u) log(1 + c u)/(c u)
  custom,
};

// Scalar incidence nonlinearity multiplying the infection pressure.
// Built-in families are the classical catalog; custom wraps any callable.
class IncidenceFunction {
 public:
  static IncidenceFunction mass_action() { return {IncidenceFamily::mass_action, 0.0, "mass_action"}; }
  static IncidenceFunction london_yorke(double a) { return {IncidenceFamily::london_yorke, check(a), "london_yorke(" + num(a) + ")"}; }
  static IncidenceFunction power(double alpha) { return {IncidenceFamily::power, check(alpha), "power(" + num(alpha) + ")"}; }
  static IncidenceFunction saturation(double c) { return {IncidenceFamily::saturation, check(c), "saturation(" + num(c) + ")"}; }
  static IncidenceFunction exponential_saturation(double c) { return {IncidenceFamily::exponential_saturation, check(c), "exponential_saturation(" + num(c) + ")"}; }
  static IncidenceFunction log_saturation(double c) { return {IncidenceFamily::log_saturation, check(c), "log_saturation(" + num(c) + ")"}; }
  static IncidenceFunction custom(std::function<double(double)> f, std::string name = "custom") {
    IncidenceFunction phi{IncidenceFamily::custom, 0.0, std::move(name)};
    phi.fn_ = std::move(f);
    return phi;
  }

  double operator()(double r) const {
    switch (family_) {
      case IncidenceFamily::mass_action:
        return 1.0 - r;
      case IncidenceFamily::london_yorke:
        return (1.0 - r) * (1.0 - param_ * r);
      case IncidenceFamily::power:
        return std::pow(1.0 - r, param_);
      case IncidenceFamily::saturation:
        return (1.0 - r) / (1.0 + param_ * r);
      case IncidenceFamily::exponential_saturation: {
        const double cu = param_ * r;
        // removable singularity at r = 0: limit is 1
        if (std::abs(cu) < 1e-8) return (1.0 - r) * (1.0 - cu / 2.0 + cu * cu / 6.0);
        return (1.0 - r) * (1.0 - std::exp(-cu)) / cu;
      }
      case IncidenceFamily::log_saturation: {
        const double cu = param_ * r;
        if (std::abs(cu) < 1e-8) return (1.0 - r) * (1.0 - cu / 2.0 + cu * cu / 3.0);
        return (1.0 - r) * std::log1p(cu) / cu;
      }
      case IncidenceFamily::custom:
        return fn_(r);
    }
    return 0.0;  // unreachable
  }

  IncidenceFamily family() const { return family_; }
  double parameter() const { return param_; }
  const std::string& name() const { return name_; }

 private:
  IncidenceFunction(IncidenceFamily f, double p, std::string n)
      : family_(f), param_(p), name_(std::move(n)) {}

  static double check(double p) {
    if (!std::isfinite(p)) throw std::invalid_argument("incidence parameter must be finite");
    return p;
  }
  static std::string num(double p) {
    std::ostringstream os;
    os << p;
    return os.str();
  }

  IncidenceFamily family_;
  double param_;
  std::string name_;
  std::function<double(double)> fn_;
};

struct ConformityReport {
  bool phi0_is_one = false;       // phi(0) = 1 within 1e-12
  bool phi1_is_zero = false;      // phi(1) = 0 within 1e-12
  bool decreasing = false;        // strictly decreasing between grid points
  bool nonnegative = false;       // on [0,1]
  double lipschitz_estimate = 0;  // max |slope| between adjacent grid points
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool conforming() const { return violations.empty(); }
};

// Grid check of the regularity condition: phi decreasing on [0,1],
// phi(0) = 1, phi(1) = 0, nonnegative.
inline ConformityReport check_conformity(const IncidenceFunction& phi, int grid_size = 4096) {
  if (grid_size < 16) throw std::invalid_argument("grid_size must be >= 16");
  ConformityReport rep;
  const double v0 = phi(0.0);
  const double v1 = phi(1.0);
  rep.phi0_is_one = std::abs(v0 - 1.0) <= 1e-12;
  rep.phi1_is_zero = std::abs(v1) <= 1e-12;
  if (!rep.phi0_is_one) rep.violations.push_back("phi(0) must equal 1, got " + std::to_string(v0));
  if (!rep.phi1_is_zero) rep.violations.push_back("phi(1) must equal 0, got " + std::to_string(v1));

  rep.decreasing = true;
  rep.nonnegative = true;
  double prev = v0;
  for (int i = 1; i <= grid_size; ++i) {
    const double r = static_cast<double>(i) / grid_size;
    const double v = phi(r);
    if (v < -1e-14 && rep.nonnegative) {
      rep.nonnegative = false;
      rep.violations.push_back("phi negative at r=" + std::to_string(r));
    }
    const double dv = v - prev;
    if (dv >= 0.0) {
      if (dv <= 1e-14) {
        rep.warnings.push_back("phi plateau near r=" + std::to_string(r));
      } else if (rep.decreasing) {
        rep.decreasing = false;
        rep.violations.push_back("phi not decreasing near r=" + std::to_string(r));
      }
    }
    rep.lipschitz_estimate = std::max(rep.lipschitz_estimate, std::abs(dv) * grid_size);
    prev = v;
  }
  return rep;
}

}  // namespace sis
