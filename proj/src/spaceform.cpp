#include "reflectcost/spaceform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace reflectcost {

namespace {

double minkowski(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void require_same_space(const ModelPoint& x, const ModelPoint& y) {
  if (!(x.space == y.space)) throw std::invalid_argument("points lie on different spaces");
}

Eigen::Vector3d cross3(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return Eigen::Vector3d(a[0], a[1], a[2]).cross(Eigen::Vector3d(b[0], b[1], b[2]));
}

// Unit tangent at x towards y, or nullopt if y == x.
struct Direction {
  Tangent u;
  double d = 0.0;
  bool tie_break = false;
};

Direction direction(const ModelPoint& x, const ModelPoint& y) {
  require_same_space(x, y);
  const Space& s = x.space;
  const double r = s.radius;
  Direction out;
  switch (s.kind) {
    case SpaceKind::euclidean: {
      out.u = y.coords - x.coords;
      out.d = out.u.norm();
      if (out.d > 0.0) out.u /= out.d;
      return out;
    }
    case SpaceKind::sphere: {
      out.d = distance(x, y);
      Tangent w = y.coords - (x.coords.dot(y.coords) / (r * r)) * x.coords;
      double wn = w.norm();
      if (out.d > 0.0 && (wn <= 1e-12 * r || out.d >= std::numbers::pi * r * (1.0 - 1e-12))) {
        // antipodal: project the basis vector most orthogonal to x
        Eigen::Index k = 0;
        x.coords.cwiseAbs().minCoeff(&k);
        Eigen::VectorXd e = Eigen::VectorXd::Unit(3, k);
        w = e - (x.coords.dot(e) / (r * r)) * x.coords;
        wn = w.norm();
        out.tie_break = true;
      }
      out.u = wn > 0.0 ? Tangent(w / wn) : Tangent(Tangent::Zero(3));
      return out;
    }
    case SpaceKind::hyperbolic: {
      out.d = distance(x, y);
      Tangent w = y.coords + (minkowski(x.coords, y.coords) / (r * r)) * x.coords;
      const double wn = std::sqrt(std::max(0.0, minkowski(w, w)));
      out.u = wn > 0.0 ? Tangent(w / wn) : Tangent(Tangent::Zero(3));
      return out;
    }
  }
  return out;
}

// Transport of v along the geodesic from x with unit velocity u over length d.
Tangent transport_along(const ModelPoint& x, const Tangent& u, double d, const Tangent& v) {
  const Space& s = x.space;
  if (s.kind == SpaceKind::euclidean || d == 0.0) return v;
  const double r = s.radius;
  const double a = inner(s, v, u);
  const Tangent w = v - a * u;
  Tangent end;
  if (s.kind == SpaceKind::sphere)
    end = -(x.coords / r) * std::sin(d / r) + u * std::cos(d / r);
  else
    end = (x.coords / r) * std::sinh(d / r) + u * std::cosh(d / r);
  return w + a * end;
}

}  // namespace

ModelPoint make_point(const Space& space, Eigen::VectorXd coords) {
  if (coords.size() != space.ambient_dim()) throw std::invalid_argument("point: wrong coordinate dimension");
  const double r2 = space.radius * space.radius;
  if (space.kind == SpaceKind::sphere && std::abs(coords.squaredNorm() - r2) > 1e-10 * r2)
    throw std::invalid_argument("point: not on the sphere");
  if (space.kind == SpaceKind::hyperbolic &&
      (coords[0] <= 0.0 || std::abs(minkowski(coords, coords) + r2) > 1e-10 * std::max(r2, coords[0] * coords[0])))
    throw std::invalid_argument("point: not on the upper hyperboloid");
  return {space, std::move(coords)};
}

ModelPoint sphere_point(double r, double colatitude, double longitude) {
  Eigen::VectorXd c(3);
  c << r * std::sin(colatitude) * std::cos(longitude), r * std::sin(colatitude) * std::sin(longitude),
      r * std::cos(colatitude);
  return {Space::sphere(r), c};
}

ModelPoint hyperbolic_point(double r, double rho, double angle) {
  Eigen::VectorXd c(3);
  c << r * std::cosh(rho / r), r * std::sinh(rho / r) * std::cos(angle), r * std::sinh(rho / r) * std::sin(angle);
  return {Space::hyperbolic(r), c};
}

double inner(const Space& space, const Tangent& v, const Tangent& w) {
  return space.kind == SpaceKind::hyperbolic ? minkowski(v, w) : v.dot(w);
}

double norm(const Space& space, const Tangent& v) { return std::sqrt(std::max(0.0, inner(space, v, v))); }

double distance(const ModelPoint& x, const ModelPoint& y) {
  require_same_space(x, y);
  const double r = x.space.radius;
  switch (x.space.kind) {
    case SpaceKind::euclidean:
      return (x.coords - y.coords).norm();
    case SpaceKind::sphere:
      return r * std::atan2(cross3(x.coords, y.coords).norm(), x.coords.dot(y.coords));
    case SpaceKind::hyperbolic: {
      const Eigen::VectorXd diff = x.coords - y.coords;
      const double chord = std::sqrt(std::max(0.0, minkowski(diff, diff)));
      return 2.0 * r * std::asinh(chord / (2.0 * r));
    }
  }
  return 0.0;
}

ModelPoint exp_map(const ModelPoint& x, const Tangent& v) {
  const Space& s = x.space;
  if (s.kind == SpaceKind::euclidean) return {s, x.coords + v};
  const double r = s.radius;
  const double len = norm(s, v);
  if (len == 0.0) return x;
  const double th = len / r;
  Eigen::VectorXd y;
  if (s.kind == SpaceKind::sphere) {
    y = x.coords * std::cos(th) + (r * std::sin(th) / len) * v;
    y *= r / y.norm();
  } else {
    y = x.coords * std::cosh(th) + (r * std::sinh(th) / len) * v;
    y[0] = std::sqrt(r * r + y[1] * y[1] + y[2] * y[2]);
  }
  return {s, y};
}

LogResult log_map(const ModelPoint& x, const ModelPoint& y) {
  const Direction dir = direction(x, y);
  if (x.space.kind == SpaceKind::euclidean) return {y.coords - x.coords, false};
  return {dir.u * dir.d, dir.tie_break};
}

namespace {

// Hyperboloid transport in closed form: v + <y, v> / (r^2 - <x, y>) (x + y).
Tangent hyperbolic_transport(const ModelPoint& x, const ModelPoint& y, const Tangent& v) {
  const double r = x.space.radius;
  return v + (minkowski(y.coords, v) / (r * r - minkowski(x.coords, y.coords))) * (x.coords + y.coords);
}

}  // namespace

Tangent parallel_transport(const ModelPoint& x, const ModelPoint& y, const Tangent& v) {
  if (x.space.kind == SpaceKind::hyperbolic) {
    require_same_space(x, y);
    return hyperbolic_transport(x, y, v);
  }
  const Direction dir = direction(x, y);
  return transport_along(x, dir.u, dir.d, v);
}

Tangent reflection_map(const ModelPoint& x, const ModelPoint& y, const Tangent& v,
                       const std::optional<Tangent>& hint) {
  Direction dir = direction(x, y);
  if (dir.d == 0.0) throw std::invalid_argument("reflection_map: x == y");
  if (hint && dir.tie_break) {
    const double r = x.space.radius;
    const Tangent h = *hint - (x.coords.dot(*hint) / (r * r)) * x.coords;
    if (h.norm() > 0.0) dir.u = h / h.norm();
  }
  const Tangent reflected = v - 2.0 * inner(x.space, v, dir.u) * dir.u;
  if (x.space.kind == SpaceKind::hyperbolic) return hyperbolic_transport(x, y, reflected);
  return transport_along(x, dir.u, dir.d, reflected);
}

Eigen::MatrixXd tangent_frame(const ModelPoint& x) {
  const Space& s = x.space;
  if (s.kind == SpaceKind::euclidean) return Eigen::MatrixXd::Identity(s.dim, s.dim);
  const double r = s.radius;
  Eigen::MatrixXd F(3, 2);
  if (s.kind == SpaceKind::sphere) {
    const Eigen::Vector3d n = Eigen::Vector3d(x.coords[0], x.coords[1], x.coords[2]) / r;
    const Eigen::Vector3d a = std::abs(n[2]) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d e1 = (a - a.dot(n) * n).normalized();
    F.col(0) = e1;
    F.col(1) = n.cross(e1);
    return F;
  }
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd b = Eigen::VectorXd::Unit(3, k + 1);
    b += (minkowski(b, x.coords) / (r * r)) * x.coords;
    if (k == 1) b -= minkowski(b, F.col(0)) * F.col(0);
    F.col(k) = b / std::sqrt(minkowski(b, b));
  }
  return F;
}

CoupledWalk::CoupledWalk(const ModelPoint& x1, const ModelPoint& x2, double alpha) {
  require_same_space(x1, x2);
  if (!(alpha > 0.0)) throw std::invalid_argument("coupled walk: alpha must be positive");
  state_.x1 = x1;
  state_.x2 = x2;
  state_.alpha = alpha;
  state_.coalesced = distance(x1, x2) == 0.0;
  if (state_.coalesced) state_.x2 = state_.x1;
}

double CoupledWalk::separation() const { return state_.coalesced ? 0.0 : distance(state_.x1, state_.x2); }

Tangent CoupledWalk::increment(const Eigen::VectorXd& xi) const {
  const int m = state_.x1.space.dim;
  return state_.alpha * std::sqrt(2.0 * (m + 2)) * (tangent_frame(state_.x1) * xi);
}

void CoupledWalk::step_with(const Tangent& v1) {
  auto& st = state_;
  ++st.step_index;
  if (st.coalesced) {
    st.x1 = exp_map(st.x1, v1);
    st.x2 = st.x1;
    return;
  }
  const Direction dir = direction(st.x1, st.x2);
  if (!dir.tie_break) st.last_direction = dir.u;
  const Tangent v2 = reflection_map(st.x1, st.x2, v1, st.last_direction);
  const ModelPoint from = st.x1;
  const bool in_reach = dir.d <= 2.0 * norm(from.space, v1) * (1.0 + 1e-9);
  st.x1 = exp_map(st.x1, v1);
  st.x2 = exp_map(st.x2, v2);
  const double d = distance(st.x1, st.x2);
  bool met = d <= st.alpha * st.alpha;
  // The mirrored pair passes through the diagonal when the geodesic direction reverses.
  if (!met && in_reach && !dir.tie_break) {
    const Direction now = direction(st.x1, st.x2);
    met = !now.tie_break && inner(st.x1.space, parallel_transport(from, st.x1, dir.u), now.u) < 0.0;
  }
  if (met) {
    st.coalesced = true;
    st.x2 = st.x1;
  }
}

void CoupledWalk::step(CounterRng& rng) { step_with(increment(unit_ball_sample(state_.x1.space.dim, rng))); }

Eigen::VectorXd unit_ball_sample(int m, CounterRng& rng) {
  Eigen::VectorXd xi(m);
  if (m == 2) {
    do {
      xi << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0;
    } while (xi.squaredNorm() >= 1.0);
    return xi;
  }
  for (int k = 0; k < m; ++k) xi[k] = rng.normal();
  return xi * (std::pow(rng.uniform(), 1.0 / m) / xi.norm());
}

std::vector<WalkTracePoint> coupled_walk_run(const ModelPoint& x1, const ModelPoint& x2, double alpha, double horizon,
                                             std::uint64_t seed) {
  CoupledWalk walk(x1, x2, alpha);
  CounterRng rng(seed);
  const auto steps = static_cast<std::size_t>(std::llround(horizon / (alpha * alpha)));
  std::vector<WalkTracePoint> trace;
  trace.reserve(steps + 1);
  trace.push_back({0.0, walk.separation()});
  for (std::size_t k = 0; k < steps; ++k) {
    walk.step(rng);
    trace.push_back({walk.time(), walk.separation()});
  }
  return trace;
}

Eigen::VectorXd coupled_walk_distances(const ModelPoint& x1, const ModelPoint& x2, double alpha, double horizon,
                                       std::size_t n_runs, std::uint64_t seed) {
  const auto steps = static_cast<std::size_t>(std::llround(horizon / (alpha * alpha)));
  Eigen::VectorXd out(static_cast<Eigen::Index>(n_runs));
  parallel_for(n_runs, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      CoupledWalk walk(x1, x2, alpha);
      CounterRng rng(derive_seed(seed, i));
      for (std::size_t k = 0; k < steps; ++k) walk.step(rng);
      out[static_cast<Eigen::Index>(i)] = walk.separation();
    }
  });
  return out;
}

}  // namespace reflectcost
