#include "derham/sampled_form.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "derham/errors.hpp"

namespace derham {

CompiledPolyForm::CompiledPolyForm(const PolyForm& u) : n_(u.dimension()), l_(u.degree()) {
  const DenseLayout& lay = dense_layout(n_, l_);
  size_ = lay.size();
  for (const auto& [b, c] : u.terms()) {
    for (const auto& [m, q] : c.terms()) {
      for (int i = n_; i < c.nvars(); ++i)
        if (m.e[i]) throw ContractViolation("CompiledPolyForm: coefficient depends on parameters");
      terms_.push_back({lay.index_of_mask[b.mask()], q.get_d(), std::vector<std::uint8_t>(m.e.begin(), m.e.begin() + n_)});
    }
  }
}

void CompiledPolyForm::eval(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.begin() + size_, 0.0);
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < t.alpha[i]; ++k) v *= x[i];
    out[t.index] += v;
  }
}

SampledForm::SampledForm(int n, int l, Evaluator f, std::vector<Ball> support, Breaks breaks,
                         std::shared_ptr<const SampledForm> derivative, bool check_derivative)
    : n_(n), l_(l), f_(std::move(f)), support_(std::move(support)), breaks_(std::move(breaks)),
      derivative_(std::move(derivative)) {
  if (n < 1 || n > max_dimension()) throw ContractViolation("SampledForm: dimension out of range");
  if (l < 0 || l > n) throw ContractViolation("SampledForm: degree out of range");
  size_ = dense_layout(n, l).size();
  for (const auto& b : support_)
    if (b.dimension() != n || !(b.radius > 0)) throw ContractViolation("SampledForm: bad support ball");
  if (derivative_) {
    if (derivative_->dimension() != n || derivative_->degree() != l + 1)
      throw ContractViolation("SampledForm: derivative has wrong degree");
    if (check_derivative && l < n && compact()) {
      const double dev = derivative_consistency(*this);
      if (dev > 1e-6)
        throw ContractViolation("SampledForm: derivative evaluator disagrees with finite differences (rel " +
                                std::to_string(dev) + ")");
    }
  }
}

const SampledForm& SampledForm::derivative() const {
  if (!derivative_) throw ContractViolation("SampledForm has no derivative evaluator");
  return *derivative_;
}

bool SampledForm::in_support(std::span<const double> x) const {
  if (support_.empty()) return true;
  for (const auto& b : support_)
    if (b.contains(x)) return true;
  return false;
}

void SampledForm::eval(std::span<const double> x, std::span<double> out) const {
  if (!in_support(x)) {
    std::fill(out.begin(), out.begin() + size_, 0.0);
    return;
  }
  f_(x, out);
}

std::vector<double> SampledForm::eval(std::span<const double> x) const {
  std::vector<double> out(size_, 0.0);
  eval(x, out);
  return out;
}

Box SampledForm::bounding_box() const {
  if (support_.empty()) throw ContractViolation("bounding_box: form is not compactly supported");
  Box b;
  b.lo.assign(n_, 1e300);
  b.hi.assign(n_, -1e300);
  for (const auto& s : support_)
    for (int i = 0; i < n_; ++i) {
      b.lo[i] = std::min(b.lo[i], s.center[i] - s.radius);
      b.hi[i] = std::max(b.hi[i], s.center[i] + s.radius);
    }
  return b;
}

double SampledForm::sup_norm_estimate(int per_axis) const {
  const Box box = bounding_box();
  std::vector<int> idx(n_, 0);
  std::vector<double> x(n_), v(size_);
  double m = 0.0;
  while (true) {
    for (int i = 0; i < n_; ++i) x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * (idx[i] + 0.5) / per_axis;
    eval(x, v);
    for (double c : v) m = std::max(m, std::abs(c));
    int i = 0;
    while (i < n_ && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == n_) break;
  }
  return m;
}

std::vector<double> fd_exterior_derivative(int n, int l,
                                           const std::function<std::vector<double>(std::span<const double>)>& f,
                                           std::span<const double> x, double h, bool five_point) {
  const DenseLayout& lay = dense_layout(n, l);
  const DenseLayout& up = dense_layout(n, l + 1);
  std::vector<double> out(up.size(), 0.0);
  if (l >= n) return out;
  std::vector<double> y(x.begin(), x.end());
  for (int i = 0; i < n; ++i) {
    auto at = [&](double s) {
      y[i] = x[i] + s;
      auto v = f(y);
      y[i] = x[i];
      return v;
    };
    std::vector<double> partial(lay.size(), 0.0);
    const auto p1 = at(h), m1 = at(-h);
    if (five_point) {
      const auto p2 = at(2 * h), m2 = at(-2 * h);
      for (std::size_t c = 0; c < lay.size(); ++c)
        partial[c] = (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) / (12.0 * h);
    } else {
      for (std::size_t c = 0; c < lay.size(); ++c) partial[c] = (p1[c] - m1[c]) / (2.0 * h);
    }
    for (std::size_t bi = 0; bi < lay.size(); ++bi)
      for (const auto& e : lay.wedge_axis[bi])
        if (e.axis == i) out[e.target] += e.sign * partial[bi];
  }
  return out;
}

std::vector<double> line_breakpoints(const SampledForm& u, std::span<const double> x, std::span<const double> w,
                                     double lo, double hi) {
  std::vector<double> pts{lo, hi};
  auto push = [&](double s) {
    if (s > lo && s < hi) pts.push_back(s);
  };
  auto sphere = [&](const Ball& b) {
    const Interval iv = line_ball(x, w, b);
    if (!iv.empty()) {
      push(iv.lo);
      push(iv.hi);
    }
  };
  for (const auto& b : u.support()) sphere(b);
  for (const auto& b : u.breaks().spheres) sphere(b);
  for (const auto& p : u.breaks().planes)
    if (w[p.axis] != 0.0) push((p.value - x[p.axis]) / w[p.axis]);
  std::sort(pts.begin(), pts.end());
  // merge near-duplicates so that no piece is degenerate
  std::vector<double> out;
  const double eps = 1e-14 * std::max(1.0, std::abs(hi - lo));
  for (double s : pts)
    if (out.empty() || s - out.back() > eps) out.push_back(s);
  if (out.back() < hi) out.back() = hi;
  return out;
}

double derivative_consistency(const SampledForm& u, int points) {
  if (!u.has_derivative() || u.degree() >= u.dimension()) return 0.0;
  const int n = u.dimension();
  const Box box = u.bounding_box();
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, box.hi[i] - box.lo[i]);
  const double h = 1e-5 * scale;
  double worst = 0.0, ref = 0.0;
  std::vector<std::vector<double>> fd, ex;
  // low-discrepancy (Kronecker) points in the bounding box
  const double alpha[] = {0.7548776662466927, 0.5698402909980532, 0.6180339887498949, 0.4142135623730950,
                          0.7320508075688772, 0.2360679774997897, 0.6457513110645906, 0.1622776601683795};
  for (int p = 1; p <= points; ++p) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
      const double t = std::fmod(0.5 + p * alpha[i % 8] * (1 + i / 8), 1.0);
      x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * (0.1 + 0.8 * t);
    }
    fd.push_back(fd_exterior_derivative(n, u.degree(), [&](std::span<const double> y) { return u.eval(y); }, x, h,
                                        true));
    ex.push_back(u.derivative().eval(x));
    for (double v : ex.back()) ref = std::max(ref, std::abs(v));
  }
  if (ref == 0.0) ref = 1.0;
  for (std::size_t p = 0; p < fd.size(); ++p)
    for (std::size_t c = 0; c < fd[p].size(); ++c) worst = std::max(worst, std::abs(fd[p][c] - ex[p][c]) / ref);
  return worst;
}

SampledForm zero_sampled(int n, int l) {
  std::vector<double> c(n, 0.0);
  return SampledForm(
      n, l, [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); },
      {Ball{c, 1.0}});
}

SampledForm profile_form(const ScalarField& f, const PolyForm& P) {
  if (!f.support()) throw ContractViolation("profile_form: the profile must be compactly supported");
  const int n = P.dimension(), l = P.degree();
  auto cp = std::make_shared<CompiledPolyForm>(P);
  auto cdp = std::make_shared<CompiledPolyForm>(exterior_d(P));
  const std::size_t m = dense_layout(n, l).size();
  std::shared_ptr<const SampledForm> deriv;
  if (l < n) {
    auto df = [f, cp, cdp, n, l, m](std::span<const double> x, std::span<double> out) {
      std::array<double, kHardMaxDimension> g{};
      std::vector<double> pv(m);
      cp->eval(x, pv);
      cdp->eval(x, out);
      const double fv = f.value(x);
      for (auto& v : out) v *= fv;
      f.gradient(x, std::span<double>(g.data(), n));
      wedge_one_form_dense(n, l, std::span<const double>(g.data(), n), pv, out);
    };
    deriv = std::make_shared<SampledForm>(n, l + 1, df, std::vector<Ball>{*f.support()}, f.breaks());
  }
  auto fn = [f, cp](std::span<const double> x, std::span<double> out) {
    cp->eval(x, out);
    const double fv = f.value(x);
    for (auto& v : out) v *= fv;
  };
  return SampledForm(n, l, fn, {*f.support()}, f.breaks(), deriv);
}

SampledForm scaled(const ScalarField& chi, const SampledForm& u) {
  const int n = u.dimension(), l = u.degree();
  std::shared_ptr<const SampledForm> deriv;
  if (u.has_derivative() && l < n) {
    auto du = u.derivative_ptr();
    auto df = [chi, u, du, n, l](std::span<const double> x, std::span<double> out) {
      std::array<double, kHardMaxDimension> g{};
      du->eval(x, out);
      const double c = chi.value(x);
      for (auto& v : out) v *= c;
      chi.gradient(x, std::span<double>(g.data(), n));
      const auto uv = u.eval(x);
      wedge_one_form_dense(n, l, std::span<const double>(g.data(), n), uv, out);
    };
    Breaks br = du->breaks();
    br.append(chi.breaks());
    deriv = std::make_shared<SampledForm>(n, l + 1, df, du->support(), br, nullptr, false);
  }
  auto fn = [chi, u](std::span<const double> x, std::span<double> out) {
    u.eval(x, out);
    const double c = chi.value(x);
    for (auto& v : out) v *= c;
  };
  Breaks br = u.breaks();
  br.append(chi.breaks());
  return SampledForm(n, l, fn, u.support(), br, deriv, false);
}

SampledForm gradient_wedge(const ScalarField& chi, const SampledForm& u) {
  const int n = u.dimension(), l = u.degree();
  if (l >= n) return zero_sampled(n, std::min(l + 1, n));
  std::shared_ptr<const SampledForm> deriv;
  if (u.has_derivative() && l + 1 < n) {
    auto du = u.derivative_ptr();
    auto df = [chi, du, n, l](std::span<const double> x, std::span<double> out) {
      std::array<double, kHardMaxDimension> g{};
      std::fill(out.begin(), out.end(), 0.0);
      chi.gradient(x, std::span<double>(g.data(), n));
      const auto dv = du->eval(x);
      wedge_one_form_dense(n, l + 1, std::span<const double>(g.data(), n), dv, out, -1.0);
    };
    Breaks br = du->breaks();
    br.append(chi.breaks());
    deriv = std::make_shared<SampledForm>(n, l + 2, df, du->support(), br, nullptr, false);
  }
  auto fn = [chi, u, n, l](std::span<const double> x, std::span<double> out) {
    std::array<double, kHardMaxDimension> g{};
    std::fill(out.begin(), out.end(), 0.0);
    chi.gradient(x, std::span<double>(g.data(), n));
    const auto uv = u.eval(x);
    wedge_one_form_dense(n, l, std::span<const double>(g.data(), n), uv, out);
  };
  Breaks br = u.breaks();
  br.append(chi.breaks());
  return SampledForm(n, l + 1, fn, u.support(), br, deriv, false);
}

SampledForm sum(const SampledForm& a, const SampledForm& b, double wa, double wb) {
  if (a.dimension() != b.dimension() || a.degree() != b.degree()) throw ContractViolation("sum: shape mismatch");
  const int n = a.dimension(), l = a.degree();
  std::vector<Ball> sup;
  if (a.compact() && b.compact()) {
    sup = a.support();
    sup.insert(sup.end(), b.support().begin(), b.support().end());
  }
  std::shared_ptr<const SampledForm> deriv;
  if (a.has_derivative() && b.has_derivative() && l < n)
    deriv = std::make_shared<SampledForm>(sum(a.derivative(), b.derivative(), wa, wb));
  auto fn = [a, b, wa, wb](std::span<const double> x, std::span<double> out) {
    const auto va = a.eval(x), vb = b.eval(x);
    for (std::size_t i = 0; i < va.size(); ++i) out[i] = wa * va[i] + wb * vb[i];
  };
  Breaks br = a.breaks();
  br.append(b.breaks());
  return SampledForm(n, l, fn, sup, br, deriv, false);
}

SampledForm hodge(const SampledForm& u) {
  const int n = u.dimension(), l = u.degree();
  auto fn = [u, n, l](std::span<const double> x, std::span<double> out) {
    const auto v = u.eval(x);
    hodge_star_dense(n, l, v, out);
  };
  return SampledForm(n, n - l, fn, u.support(), u.breaks());
}

SampledForm volume_form(const ThetaBump& theta, double c) {
  const int n = theta.dimension();
  auto fn = [theta, c](std::span<const double> x, std::span<double> out) { out[0] = c * theta.eval(x); };
  Breaks br;
  const Box box = theta.support_box();
  if (theta.kind() == BumpKind::tensor) {
    for (int i = 0; i < n; ++i) {
      br.planes.push_back({i, box.lo[i]});
      br.planes.push_back({i, box.hi[i]});
    }
  } else {
    br.spheres.push_back(theta.support_ball());
  }
  return SampledForm(n, n, fn, {theta.support_ball()}, br);
}

}  // namespace derham
