#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "lqpi/linalg.hpp"

namespace lqpi {

// Vector-valued coefficient process, adapted to the observation filtration.
// Three kinds: deterministic functions of t, Markov functions of the current
// W2 level, and functionals of the whole W2 path prefix. A Markov coefficient
// may additionally carry an exponential-family structure
//     value(t, w) = profile(t) * exp(kappa*w + nu*t) * direction,
// which is what lets the ODE solvers handle it in closed form.
class CoefficientProcess {
 public:
  enum class Kind { Deterministic, MarkovOfW2, PathFunctional };

  struct ExponentialFamily {
    double kappa = 0.0;
    double nu = 0.0;
    std::function<double(double)> profile;        // scalar weight in t
    std::function<double(double)> tail_integral;  // optional: \int_t^T profile(r) dr
    Vector direction;
  };

  // (t, w2_times, w2_levels) -> value; prefixes cover [t0, t]
  using PathFn = std::function<Vector(double, const std::vector<double>&, const std::vector<double>&)>;

  CoefficientProcess() = default;

  static CoefficientProcess zero(int dim);
  static CoefficientProcess constant(Vector v);
  static CoefficientProcess deterministic(int dim, std::function<Vector(double)> f);
  static CoefficientProcess markov(int dim, std::function<Vector(double, double)> f);
  static CoefficientProcess exponential(ExponentialFamily fam);
  static CoefficientProcess path_functional(int dim, PathFn f);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_deterministic() const { return kind_ == Kind::Deterministic; }
  bool structurally_zero() const { return zero_; }

  // non-null only for the structured exponential subkind of MarkovOfW2
  const ExponentialFamily* exponential_family() const { return exp_ ? exp_.get() : nullptr; }

  // Deterministic and MarkovOfW2 kinds; throws for PathFunctional.
  Vector eval(double t, double w = 0.0) const;

  // any kind; prefixes must cover [t0, t]
  Vector eval_path(double t, const std::vector<double>& times, const std::vector<double>& levels) const;

 private:
  Kind kind_ = Kind::Deterministic;
  int dim_ = 0;
  bool zero_ = true;
  std::function<Vector(double)> det_;
  std::function<Vector(double, double)> markov_;
  PathFn path_;
  std::shared_ptr<ExponentialFamily> exp_;
};

}  // namespace lqpi
