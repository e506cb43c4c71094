#include "derham/directions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <queue>

#include "derham/errors.hpp"
#include "derham/quadrature.hpp"

namespace derham {

namespace {

struct Patch {
  int axis;
  double plane;
  std::vector<double> lo, hi;  // over the other n-1 coordinates, in axis order
  std::vector<double> value;
  double error = 0.0;
  int depth = 0;
};

struct Cone {
  std::vector<double> dir;
  double half;  // >= pi means every direction
  int group = 0;
};

double angle_between(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
  return std::acos(std::clamp(d, -1.0, 1.0));
}

class Integrator {
 public:
  Integrator(std::span<const double> x, const Box& box, std::size_t m, const DirectionIntegrand& f,
             std::span<const DirectionTarget> targets, const DirectionRule& rule)
      : x_(x.begin(), x.end()), box_(box), m_(m), f_(f), rule_(rule), n_(static_cast<int>(x.size())) {
    const int d = n_ - 1;
    q_high_ = rule.q_high > 0 ? rule.q_high : (d <= 1 ? 10 : d == 2 ? 8 : 6);
    q_low_ = rule.q_low > 0 ? rule.q_low : (d <= 1 ? 6 : d == 2 ? 5 : 4);
    for (const auto& t : targets) {
      const double dist = distance(x_, t.ball.center);
      Cone c;
      c.dir.resize(n_);
      if (dist <= t.ball.radius) {
        c.half = 4.0;
      } else {
        for (int i = 0; i < n_; ++i) c.dir[i] = t.sign * (t.ball.center[i] - x_[i]) / dist;
        c.half = std::asin(t.ball.radius / dist);
      }
      c.group = t.group;
      groups_ = std::max(groups_, t.group + 1);
      cones_.push_back(std::move(c));
    }
    has_targets_ = !targets.empty();
  }

  std::vector<double> run(DirectionStats* stats) {
    std::vector<Patch> initial;
    const bool inside = box_.contains(x_);
    for (int axis = 0; axis < n_; ++axis) {
      for (int side = 0; side < 2; ++side) {
        const double plane = side ? box_.hi[axis] : box_.lo[axis];
        const double h = std::abs(x_[axis] - plane);
        if (!(h > 0.0)) continue;
        const bool visible = inside || (side == 0 ? x_[axis] < plane : x_[axis] > plane);
        if (!visible) continue;
        Patch p;
        p.axis = axis;
        p.plane = plane;
        for (int j = 0; j < n_; ++j)
          if (j != axis) {
            p.lo.push_back(box_.lo[j]);
            p.hi.push_back(box_.hi[j]);
          }
        seed(p, initial);
      }
    }
    std::vector<double> total(m_, 0.0);
    double err = 0.0;
    auto cmp = [](const Patch* a, const Patch* b) { return a->error < b->error; };
    std::priority_queue<Patch*, std::vector<Patch*>, decltype(cmp)> heap(cmp);
    std::vector<std::unique_ptr<Patch>> store;
    for (auto& p : initial) {
      evaluate(p);
      for (std::size_t c = 0; c < m_; ++c) total[c] += p.value[c];
      err += p.error;
      store.push_back(std::make_unique<Patch>(std::move(p)));
      heap.push(store.back().get());
    }
    int patches = static_cast<int>(store.size());
    std::vector<double> previous = total;
    while (!heap.empty()) {
      double mag = 0.0;
      for (double v : total) mag = std::max(mag, std::abs(v));
      if (err <= std::max(rule_.abs_tol, rule_.rel_tol * mag)) break;
      if (patches >= rule_.max_patches)
        throw QuadratureError("direction quadrature exceeded its patch budget", mag, norm(previous));
      Patch* p = heap.top();
      heap.pop();
      previous = total;
      for (std::size_t c = 0; c < m_; ++c) total[c] -= p->value[c];
      err -= p->error;
      for (auto& child : split(*p)) {
        if (!relevant(child)) continue;
        evaluate(child);
        for (std::size_t c = 0; c < m_; ++c) total[c] += child.value[c];
        err += child.error;
        store.push_back(std::make_unique<Patch>(std::move(child)));
        heap.push(store.back().get());
        ++patches;
      }
      err = std::max(err, 0.0);
    }
    if (stats) {
      stats->patches = patches;
      stats->evaluations = evaluations_;
      stats->error_estimate = err;
    }
    return total;
  }

 private:
  std::vector<double> point(const Patch& p, std::span<const double> uv) const {
    std::vector<double> s(n_);
    int k = 0;
    for (int j = 0; j < n_; ++j) s[j] = (j == p.axis) ? p.plane : uv[k++];
    return s;
  }

  // angular cap around the patch: centre direction and radius
  Cone cap(const Patch& p) const {
    const int d = n_ - 1;
    std::vector<double> mid(d);
    for (int k = 0; k < d; ++k) mid[k] = 0.5 * (p.lo[k] + p.hi[k]);
    auto dir = [&](std::span<const double> uv) {
      auto s = point(p, uv);
      const double r = distance(s, x_);
      for (int j = 0; j < n_; ++j) s[j] = (s[j] - x_[j]) / r;
      return s;
    };
    Cone c{dir(mid), 0.0};
    std::vector<double> corner(d);
    for (int mask = 0; mask < (1 << d); ++mask) {
      for (int k = 0; k < d; ++k) corner[k] = (mask >> k) & 1 ? p.hi[k] : p.lo[k];
      c.half = std::max(c.half, angle_between(c.dir, dir(corner)));
    }
    c.half = 1.1 * c.half + 1e-12;
    return c;
  }

  bool relevant(const Patch& p) const {
    if (!has_targets_) return true;
    const Cone c = cap(p);
    std::vector<char> hit(groups_, 0);
    for (const auto& t : cones_)
      if (t.half >= 4.0 || angle_between(c.dir, t.dir) <= c.half + t.half) hit[t.group] = 1;
    for (int g = 0; g < groups_; ++g)
      if (!hit[g]) {
        bool used = false;
        for (const auto& t : cones_) used = used || t.group == g;
        if (used) return false;
      }
    return true;
  }

  // patch is coarse relative to a cone it touches (or to a fixed ceiling)
  bool too_coarse(const Patch& p) const {
    const Cone c = cap(p);
    if (c.half > 0.6) return true;
    for (const auto& t : cones_)
      if (t.half < 4.0 && angle_between(c.dir, t.dir) <= c.half + t.half && c.half > 0.5 * t.half) return true;
    return false;
  }

  void seed(Patch p, std::vector<Patch>& out) {
    if (!relevant(p)) return;
    if (n_ > 1 && p.depth < 24 && too_coarse(p)) {
      for (auto& child : split(p)) seed(std::move(child), out);
      return;
    }
    out.push_back(std::move(p));
  }

  std::vector<Patch> split(const Patch& p) const {
    const int d = n_ - 1;
    std::vector<Patch> out;
    if (d == 0) return out;
    for (int mask = 0; mask < (1 << d); ++mask) {
      Patch c;
      c.axis = p.axis;
      c.plane = p.plane;
      c.depth = p.depth + 1;
      c.lo.resize(d);
      c.hi.resize(d);
      for (int k = 0; k < d; ++k) {
        const double mid = 0.5 * (p.lo[k] + p.hi[k]);
        c.lo[k] = (mask >> k) & 1 ? mid : p.lo[k];
        c.hi[k] = (mask >> k) & 1 ? p.hi[k] : mid;
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  std::vector<double> apply_rule(const Patch& p, int q) {
    const int d = n_ - 1;
    const GaussRule& g = gauss_legendre(q);
    std::vector<double> acc(m_, 0.0), val(m_), omega(n_), uv(d), s(n_);
    std::vector<int> idx(d, 0);
    double area = 1.0;
    for (int k = 0; k < d; ++k) area *= 0.5 * (p.hi[k] - p.lo[k]);
    const double h = std::abs(x_[p.axis] - p.plane);
    while (true) {
      double w = area;
      for (int k = 0; k < d; ++k) {
        uv[k] = 0.5 * (p.lo[k] + p.hi[k]) + 0.5 * (p.hi[k] - p.lo[k]) * g.nodes[idx[k]];
        w *= g.weights[idx[k]];
      }
      int kk = 0;
      double r2 = 0.0;
      for (int j = 0; j < n_; ++j) {
        s[j] = (j == p.axis) ? p.plane : uv[kk++];
        omega[j] = s[j] - x_[j];
        r2 += omega[j] * omega[j];
      }
      const double r = std::sqrt(r2);
      for (int j = 0; j < n_; ++j) omega[j] /= r;
      const double jac = h / std::pow(r, n_);
      std::fill(val.begin(), val.end(), 0.0);
      f_(omega, val);
      ++evaluations_;
      for (std::size_t c = 0; c < m_; ++c) acc[c] += w * jac * val[c];
      int k = 0;
      while (k < d && ++idx[k] == q) idx[k++] = 0;
      if (k == d) break;
    }
    return acc;
  }

  void evaluate(Patch& p) {
    p.value = apply_rule(p, q_high_);
    if (n_ == 1) {
      p.error = 0.0;
      return;
    }
    const auto low = apply_rule(p, q_low_);
    p.error = 0.0;
    for (std::size_t c = 0; c < m_; ++c) p.error = std::max(p.error, std::abs(p.value[c] - low[c]));
  }

  std::vector<double> x_;
  Box box_;
  std::size_t m_;
  const DirectionIntegrand& f_;
  DirectionRule rule_;
  int n_;
  int q_high_ = 8, q_low_ = 5;
  std::vector<Cone> cones_;
  bool has_targets_ = false;
  int groups_ = 0;
  long evaluations_ = 0;
};

}  // namespace

std::vector<double> integrate_directions(std::span<const double> x, const Box& box, std::size_t m,
                                         const DirectionIntegrand& f, std::span<const DirectionTarget> targets,
                                         const DirectionRule& rule, DirectionStats* stats) {
  if (static_cast<int>(x.size()) != box.dimension())
    throw ContractViolation("integrate_directions: dimension mismatch");
  Integrator it(x, box, m, f, targets, rule);
  return it.run(stats);
}

}  // namespace derham
