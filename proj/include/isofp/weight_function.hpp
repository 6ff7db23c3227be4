#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

namespace isofp {

enum class WeightProvenance {
  closed_form,
  kok_quadrature,
  p_formula,  // 1-D integral formula for P on (a, b) with drift center m
  pq_family,
  composite_wstar,
  angular,
  hybrid,
};

const char* provenance_name(WeightProvenance p);

// Evaluable rho -> w(rho) >= 0 with a record of where it came from.
class WeightFunction {
 public:
  struct Origin {
    WeightProvenance kind = WeightProvenance::closed_form;
    std::optional<double> alpha;   // pq_family
    std::optional<int> index;      // angular
    std::optional<double> radius;  // hybrid
  };

  WeightFunction() = default;
  WeightFunction(std::function<double(double)> f, Origin origin, double lo, double hi,
                 std::string description)
      : f_(std::move(f)), origin_(origin), lo_(lo), hi_(hi), description_(std::move(description)) {}

  double operator()(double rho) const { return f_(rho); }
  bool valid() const { return static_cast<bool>(f_); }

  const Origin& origin() const { return origin_; }
  WeightProvenance provenance() const { return origin_.kind; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::string& description() const { return description_; }

  // c * w, same provenance.
  WeightFunction scaled(double c) const {
    auto f = f_;
    return WeightFunction([f, c](double r) { return c * f(r); }, origin_, lo_, hi_,
                          std::to_string(c) + "*(" + description_ + ")");
  }

 private:
  std::function<double(double)> f_;
  Origin origin_;
  double lo_ = 0.0;
  double hi_ = std::numeric_limits<double>::infinity();
  std::string description_;
};

}  // namespace isofp
