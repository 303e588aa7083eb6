#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "interp_solve/errors.hpp"
#include "interp_solve/rng.hpp"
#include "interp_solve/vec.hpp"

namespace interp_solve {

// Axis-aligned box constraint {z : lower <= z <= upper} (componentwise).
struct Box {
  Point lower;
  Point upper;

  Box(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {
    check_same_dim(lower, upper, "Box");
    for (std::size_t i = 0; i < lower.size(); ++i) {
      if (upper[i] < lower[i]) throw ParameterError("Box: upper < lower in coordinate " + std::to_string(i));
    }
  }

  // Centered cube [-half, half]^d.
  static Box centered(std::size_t dim, double half) {
    return Box(Point(dim, -half), Point(dim, half));
  }

  std::size_t dim() const { return lower.size(); }

  bool contains(const Point& z) const {
    check_same_dim(z, lower, "Box::contains");
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i] < lower[i] || z[i] > upper[i]) return false;
    }
    return true;
  }

  Point clamp(const Point& z) const {
    check_same_dim(z, lower, "Box::clamp");
    Point r(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      r[i] = z[i] < lower[i] ? lower[i] : (z[i] > upper[i] ? upper[i] : z[i]);
    }
    return r;
  }

  Point sample(Rng& rng) const {
    Point r(dim());
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = lower[i] + (upper[i] - lower[i]) * rng.uniform01();
    }
    return r;
  }
};

// Resolvent (id + gamma*A)^{-1} of the structured part A of the inclusion.
// Supported A: the zero operator (identity resolvent) and the normal cone of
// a box, whose resolvent is the coordinatewise clamp. The clamp is the metric
// projection for every gamma > 0, so the box kind does not depend on gamma.
struct ResolventMap {
  enum class Kind { Identity, BoxProjection };

  Kind kind = Kind::Identity;
  std::optional<Box> box;

  static ResolventMap identity() { return ResolventMap{}; }

  static ResolventMap box_projection(Box b) {
    ResolventMap r;
    r.kind = Kind::BoxProjection;
    r.box = std::move(b);
    return r;
  }

  Point apply(double gamma, const Point& z) const {
    if (gamma <= 0.0) throw ParameterError("resolvent: gamma must be positive");
    if (kind == Kind::Identity) return z;
    return box->clamp(z);
  }
};

inline Point resolvent_apply(const ResolventMap& map, double gamma, const Point& z) {
  return map.apply(gamma, z);
}

// The single-valued part F of the inclusion 0 in Az + Fz, with whatever
// regularity metadata is known for it.
struct VectorField {
  std::size_t dim = 0;
  std::function<Point(const Point&)> eval_fn;
  // sup of the Jacobian spectral norm over the relevant domain, when known.
  std::optional<double> lipschitz;
  // rho with <Fz - Fz', z - z'> >= rho*||Fz - Fz'||^2 (negative: cohypomonotone).
  std::optional<double> comonotonicity;

  Point eval(const Point& z) const {
    if (z.size() != dim) {
      throw DimensionError("VectorField::eval: expected dim " + std::to_string(dim) +
                           ", got " + std::to_string(z.size()));
    }
    Point v = eval_fn(z);
    if (v.size() != dim) throw DimensionError("VectorField::eval: field returned wrong dimension");
    return v;
  }
};

// Hard cap on oracle work. `used` never exceeds `max_calls`: a consumption
// that would overshoot is refused and the caller stops.
struct EvalBudget {
  std::uint64_t max_calls = 0;
  std::uint64_t used = 0;

  bool try_consume(std::uint64_t n) {
    if (used + n > max_calls) return false;
    used += n;
    return true;
  }

  std::uint64_t remaining() const { return max_calls - used; }
};

// Stochastic first-order oracle F^(z) = F(z) + zeta, zeta ~ N(0, sigma0^2 I).
//
// A batch-n call returns the minibatch mean. Because the mean of n i.i.d.
// N(0, sigma0^2) perturbations is exactly N(0, sigma0^2/n), the oracle
// evaluates F once and adds a single sigma0/sqrt(n)-scaled draw; the call
// counter still advances by n, which is what the cost accounting tracks.
// With sigma0 = 0 batching is pointless, so any batch collapses to one
// evaluation and one counted call.
class StochasticOracle {
 public:
  StochasticOracle(VectorField base, double sigma0, std::uint64_t seed)
      : base_(std::move(base)), sigma0_(sigma0), seed_(seed) {
    if (sigma0 < 0.0) throw ParameterError("StochasticOracle: sigma0 must be >= 0");
  }

  // Draws from the sub-stream owned by (outer k, inner t). Solvers always use
  // this form so that schedule changes never shift draws across slots.
  Point eval_stream(const Point& z, std::uint64_t batch, std::uint64_t k, std::uint64_t t) {
    if (batch < 1) throw ParameterError("oracle_eval: batch must be >= 1");
    Point v = base_.eval(z);
    if (sigma0_ == 0.0) {
      calls_ += 1;
      return v;
    }
    Rng rng = Rng::substream(seed_, k, t);
    const double scale = sigma0_ / std::sqrt(static_cast<double>(batch));
    for (auto& c : v) c += scale * rng.gaussian();
    calls_ += batch;
    return v;
  }

  // Standalone call: consumes the next ad-hoc slot, so a freshly constructed
  // oracle with the same seed reproduces the same sequence of outputs.
  Point eval(const Point& z, std::uint64_t batch) { return eval_stream(z, batch, kAdhocStream, adhoc_++); }

  std::uint64_t calls() const { return calls_; }
  double sigma0() const { return sigma0_; }
  std::uint64_t seed() const { return seed_; }
  const VectorField& base() const { return base_; }

 private:
  // Ad-hoc calls use a k index no solver loop reaches.
  static constexpr std::uint64_t kAdhocStream = 0xFFFFFFFFFFFFFFFFULL;

  VectorField base_;
  double sigma0_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
  std::uint64_t adhoc_ = 0;
};

inline Point oracle_eval(StochasticOracle& oracle, const Point& z, std::uint64_t batch) {
  return oracle.eval(z, batch);
}

}  // namespace interp_solve
