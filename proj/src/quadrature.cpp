#include "derham/quadrature.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>
#include <string>

#include "derham/errors.hpp"

namespace derham {

namespace {

GaussRule compute_gauss_legendre(int q) {
  GaussRule r;
  r.nodes.resize(q);
  r.weights.resize(q);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    // Tricomi initial guess, Newton on P_q
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (q == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (q == 1) p0 = 1.0;
      dp = q * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[q - 1 - i] = x;
    r.weights[i] = w;
    r.weights[q - 1 - i] = w;
  }
  if (q % 2 == 1) r.nodes[q / 2] = 0.0;
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int q) {
  if (q < 1 || q > 128) throw ContractViolation("Gauss-Legendre order " + std::to_string(q) + " outside [1, 128]");
  // rules are never freed, so readers need no lock once a slot is published
  static std::array<std::atomic<const GaussRule*>, 129> slots{};
  static std::mutex mu;
  if (const GaussRule* r = slots[q].load(std::memory_order_acquire)) return *r;
  std::lock_guard<std::mutex> lock(mu);
  if (const GaussRule* r = slots[q].load(std::memory_order_acquire)) return *r;
  const GaussRule* r = new GaussRule(compute_gauss_legendre(q));
  slots[q].store(r, std::memory_order_release);
  return *r;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int q) {
  const GaussRule& g = gauss_legendre(q);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < q; ++i) s += g.weights[i] * f(m + h * g.nodes[i]);
  return s * h;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b, int q, int panels) {
  double s = 0.0;
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) s += integrate_gl(f, a + p * w, a + (p + 1) * w, q);
  return s;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, const QuadratureRule& rule) {
  struct Panel {
    double a, b, value, error;
    int depth;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  const int q = rule.points, qlow = rule.points / 2 + 1;
  auto make = [&](double lo, double hi, int depth) {
    const double hi_est = integrate_gl(f, lo, hi, q);
    const double lo_est = integrate_gl(f, lo, hi, qlow);
    return Panel{lo, hi, hi_est, std::abs(hi_est - lo_est), depth};
  };
  std::priority_queue<Panel> heap;
  heap.push(make(a, b, 0));
  double total = heap.top().value, err = heap.top().error;
  double previous = total;
  const int budget = 4000;
  for (int iter = 0; iter < budget; ++iter) {
    if (err <= std::max(rule.abs_tol, rule.rel_tol * std::abs(total))) return total;
    Panel p = heap.top();
    heap.pop();
    if (p.depth >= rule.max_depth)
      throw QuadratureError("adaptive quadrature reached maximum depth", total, previous);
    const double mid = 0.5 * (p.a + p.b);
    Panel l = make(p.a, mid, p.depth + 1), r = make(mid, p.b, p.depth + 1);
    previous = total;
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    heap.push(l);
    heap.push(r);
  }
  throw QuadratureError("adaptive quadrature exhausted its panel budget", total, previous);
}

void integrate_box_cells(const std::function<void(std::span<const double>, std::span<double>)>& f,
                         const std::vector<std::vector<double>>& breaks, int q, std::span<double> out) {
  const int n = static_cast<int>(breaks.size());
  const GaussRule& g = gauss_legendre(q);
  std::vector<int> cell(n, 0), node(n, 0);
  std::vector<double> x(n), tmp(out.size());
  for (int i = 0; i < n; ++i)
    if (breaks[i].size() < 2) return;
  while (true) {
    double jac = 1.0;
    for (int i = 0; i < n; ++i) jac *= 0.5 * (breaks[i][cell[i] + 1] - breaks[i][cell[i]]);
    std::fill(node.begin(), node.end(), 0);
    while (true) {
      double w = jac;
      for (int i = 0; i < n; ++i) {
        const double lo = breaks[i][cell[i]], hi = breaks[i][cell[i] + 1];
        x[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * g.nodes[node[i]];
        w *= g.weights[node[i]];
      }
      std::fill(tmp.begin(), tmp.end(), 0.0);
      f(x, tmp);
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * tmp[c];
      int i = 0;
      while (i < n && ++node[i] == q) node[i++] = 0;
      if (i == n) break;
    }
    int i = 0;
    while (i < n && ++cell[i] == static_cast<int>(breaks[i].size()) - 1) cell[i++] = 0;
    if (i == n) break;
  }
}

void integrate_box(const std::function<void(std::span<const double>, std::span<double>)>& f, const Box& box,
                   int q, int panels, std::span<double> out) {
  std::vector<std::vector<double>> breaks(box.dimension());
  for (int i = 0; i < box.dimension(); ++i)
    for (int p = 0; p <= panels; ++p) breaks[i].push_back(box.lo[i] + (box.hi[i] - box.lo[i]) * p / panels);
  integrate_box_cells(f, breaks, q, out);
}

double integrate_box(const std::function<double(std::span<const double>)>& f, const Box& box, int q, int panels) {
  double r = 0.0;
  integrate_box([&](std::span<const double> x, std::span<double> o) { o[0] = f(x); }, box, q, panels,
                std::span<double>(&r, 1));
  return r;
}

}  // namespace derham
