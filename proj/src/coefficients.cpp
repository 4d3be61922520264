#include "lqpi/coefficients.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace lqpi {

CoefficientProcess CoefficientProcess::zero(int dim) {
  CoefficientProcess c;
  c.kind_ = Kind::Deterministic;
  c.dim_ = dim;
  c.zero_ = true;
  c.det_ = [dim](double) { return Vector::Zero(dim); };
  return c;
}

CoefficientProcess CoefficientProcess::constant(Vector v) {
  CoefficientProcess c;
  c.kind_ = Kind::Deterministic;
  c.dim_ = static_cast<int>(v.size());
  c.zero_ = v.isZero(0.0);
  c.det_ = [v = std::move(v)](double) { return v; };
  return c;
}

CoefficientProcess CoefficientProcess::deterministic(int dim, std::function<Vector(double)> f) {
  CoefficientProcess c;
  c.kind_ = Kind::Deterministic;
  c.dim_ = dim;
  c.zero_ = false;
  c.det_ = std::move(f);
  return c;
}

CoefficientProcess CoefficientProcess::markov(int dim, std::function<Vector(double, double)> f) {
  CoefficientProcess c;
  c.kind_ = Kind::MarkovOfW2;
  c.dim_ = dim;
  c.zero_ = false;
  c.markov_ = std::move(f);
  return c;
}

CoefficientProcess CoefficientProcess::exponential(ExponentialFamily fam) {
  CoefficientProcess c;
  c.kind_ = Kind::MarkovOfW2;
  c.dim_ = static_cast<int>(fam.direction.size());
  c.zero_ = false;
  c.exp_ = std::make_shared<ExponentialFamily>(std::move(fam));
  const auto* e = c.exp_.get();
  c.markov_ = [e](double t, double w) {
    return Vector(e->profile(t) * std::exp(e->kappa * w + e->nu * t) * e->direction);
  };
  return c;
}

CoefficientProcess CoefficientProcess::path_functional(int dim, PathFn f) {
  CoefficientProcess c;
  c.kind_ = Kind::PathFunctional;
  c.dim_ = dim;
  c.zero_ = false;
  c.path_ = std::move(f);
  return c;
}

Vector CoefficientProcess::eval(double t, double w) const {
  switch (kind_) {
    case Kind::Deterministic:
      return det_(t);
    case Kind::MarkovOfW2:
      return markov_(t, w);
    case Kind::PathFunctional:
      throw std::logic_error("CoefficientProcess: path-functional coefficient needs eval_path");
  }
  throw std::logic_error("CoefficientProcess: bad kind");
}

Vector CoefficientProcess::eval_path(double t, const std::vector<double>& times,
                                     const std::vector<double>& levels) const {
  if (kind_ == Kind::PathFunctional) return path_(t, times, levels);
  return eval(t, levels.empty() ? 0.0 : levels.back());
}

}  // namespace lqpi
