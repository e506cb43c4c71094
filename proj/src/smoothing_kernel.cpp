#include "derham/smoothing_kernel.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "derham/errors.hpp"

namespace derham {

struct ThetaBump::MomentCache {
  std::mutex mu;
  std::vector<Rational> unit;                // centred unit-axis moments
  std::vector<std::vector<Rational>> axis;   // shifted and scaled, per axis
};

namespace {

Rational unit_constant(int k) {
  // 1 / int_{-1}^1 (1 - t^2)^k dt
  Rational c(double_factorial_odd(k), factorial(k) * (Integer(1) << (k + 1)));
  c.canonicalize();
  return c;
}

Rational unit_moment(int k, int p) {
  if (p % 2) return 0;
  Rational s = 0;
  for (int j = 0; j <= k; ++j) {
    Rational term(binomial_z(k, j) * 2, p + 2 * j + 1);
    term.canonicalize();
    if (j % 2)
      s -= term;
    else
      s += term;
  }
  return s * unit_constant(k);
}

void check_common(int n, std::span<const Rational> x0, const Rational& r, int k) {
  if (n < 1) throw ContractViolation("bump dimension must be positive");
  if (static_cast<int>(x0.size()) != n) throw ContractViolation("bump centre has wrong dimension");
  if (sgn(r) <= 0) throw ContractViolation("bump radius must be positive");
  if (k < 1) throw ContractViolation("bump exponent k must be at least 1");
}

double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// j_k(w) / w^k for w >= 0
double sph_ratio(int k, double w) {
  if (w < k + 3.0) {
    const double z2 = -0.5 * w * w;
    double term = 1.0;
    for (int j = 1; j <= 2 * k + 1; j += 2) term /= j;
    double sum = term;
    for (int m = 1; m < 200; ++m) {
      term *= z2 / (m * (2.0 * k + 2.0 * m + 1.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  const double s = std::sin(w), c = std::cos(w);
  double j0 = s / w;
  if (k == 0) return j0;
  double j1 = s / (w * w) - c / w;
  for (int m = 1; m < k; ++m) {
    const double j2 = (2.0 * m + 1.0) / w * j1 - j0;
    j0 = j1;
    j1 = j2;
  }
  return j1 / ipow(w, k);
}

}  // namespace

double bump_fourier_1d(int k, double w) {
  return double_factorial_odd(k).get_d() * sph_ratio(k, std::abs(w));
}

double bump_fourier_1d_derivative(int k, double w) {
  return -double_factorial_odd(k).get_d() * w * sph_ratio(k + 1, std::abs(w));
}

ThetaBump make_tensor_bump(int n, std::span<const Rational> x0, const Rational& r, int k) {
  check_common(n, x0, r, k);
  ThetaBump b;
  b.kind_ = BumpKind::tensor;
  b.n_ = n;
  b.k_ = k;
  b.center_.assign(x0.begin(), x0.end());
  b.r_ = r;
  for (const auto& c : x0) b.center_d_.push_back(c.get_d());
  b.r_d_ = r.get_d();
  b.norm_d_ = std::pow(Rational(unit_constant(k) / r).get_d(), n);
  b.cache_ = std::make_shared<ThetaBump::MomentCache>();
  b.cache_->axis.resize(n);
  return b;
}

ThetaBump make_radial_bump(int n, std::span<const Rational> x0, const Rational& r, int k) {
  check_common(n, x0, r, k);
  ThetaBump b;
  b.kind_ = BumpKind::radial;
  b.n_ = n;
  b.k_ = k;
  b.center_.assign(x0.begin(), x0.end());
  b.r_ = r;
  for (const auto& c : x0) b.center_d_.push_back(c.get_d());
  b.r_d_ = r.get_d();
  const double log_c = std::lgamma(0.5 * n + k + 1) - 0.5 * n * std::log(std::numbers::pi) - std::lgamma(k + 1.0) -
                       n * std::log(b.r_d_);
  b.norm_d_ = std::exp(log_c);
  b.cache_ = std::make_shared<ThetaBump::MomentCache>();
  return b;
}

ThetaBump centered_tensor_bump(int n, const Rational& r, int k) {
  std::vector<Rational> z(n, Rational(0));
  return make_tensor_bump(n, z, r, k);
}

ThetaBump inscribed_tensor_bump(const Ball& ball, int k, int denominator) {
  const int n = ball.dimension();
  std::vector<Rational> c;
  double shift2 = 0.0;
  for (double v : ball.center) {
    Rational q(static_cast<long>(std::llround(v * denominator)), denominator);
    q.canonicalize();
    shift2 += (q.get_d() - v) * (q.get_d() - v);
    c.push_back(q);
  }
  const double half = (ball.radius - std::sqrt(shift2)) / std::sqrt(double(n));
  const long num = static_cast<long>(std::floor(half * denominator * (1 - 1e-12)));
  if (num <= 0) throw ContractViolation("ball too small for an inscribed bump at this resolution");
  Rational r(num, denominator);
  r.canonicalize();
  return make_tensor_bump(n, c, r, k);
}

Rational ThetaBump::tensor_constant() const { return unit_constant(k_); }

Ball ThetaBump::support_ball() const {
  const double rad = kind_ == BumpKind::tensor ? r_d_ * std::sqrt(double(n_)) : r_d_;
  return Ball{center_d_, rad};
}

Box ThetaBump::support_box() const {
  Box b;
  for (int i = 0; i < n_; ++i) {
    b.lo.push_back(center_d_[i] - r_d_);
    b.hi.push_back(center_d_[i] + r_d_);
  }
  return b;
}

Interval ThetaBump::line_support(std::span<const double> x, std::span<const double> w) const {
  if (kind_ == BumpKind::tensor) return line_box(x, w, support_box());
  return line_ball(x, w, support_ball());
}

double ThetaBump::eval(std::span<const double> x) const {
  if (kind_ == BumpKind::tensor) {
    double p = norm_d_;
    for (int i = 0; i < n_; ++i) {
      const double t = (x[i] - center_d_[i]) / r_d_;
      const double s = 1.0 - t * t;
      if (s <= 0.0) return 0.0;
      p *= ipow(s, k_);
    }
    return p;
  }
  double d2 = 0.0;
  for (int i = 0; i < n_; ++i) d2 += (x[i] - center_d_[i]) * (x[i] - center_d_[i]);
  const double s = 1.0 - d2 / (r_d_ * r_d_);
  return s > 0.0 ? norm_d_ * ipow(s, k_) : 0.0;
}

std::vector<Rational> ThetaBump::axis_moments(int axis, int max_power) const {
  if (kind_ != BumpKind::tensor) throw ContractViolation("exact moments exist for the tensor kind only");
  if (axis < 0 || axis >= n_) throw ContractViolation("axis out of range");
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto& unit = cache_->unit;
  while (static_cast<int>(unit.size()) <= max_power) unit.push_back(unit_moment(k_, static_cast<int>(unit.size())));
  auto& ax = cache_->axis[axis];
  while (static_cast<int>(ax.size()) <= max_power) {
    const int p = static_cast<int>(ax.size());
    Rational s = 0;
    for (int q = 0; q <= p; q += 2)
      s += Rational(binomial_z(p, q)) * pow(center_[axis], p - q) * pow(r_, q) * unit[q];
    ax.push_back(s);
  }
  return std::vector<Rational>(ax.begin(), ax.begin() + max_power + 1);
}

Rational ThetaBump::moment(std::span<const int> alpha) const {
  if (static_cast<int>(alpha.size()) != n_) throw ContractViolation("moment: multi-index has wrong length");
  Rational m = 1;
  for (int i = 0; i < n_; ++i) {
    if (alpha[i] < 0) throw ContractViolation("moment: negative exponent");
    m *= axis_moments(i, alpha[i])[alpha[i]];
  }
  return m;
}

double ThetaBump::moment_d(std::span<const int> alpha) const {
  if (kind_ == BumpKind::tensor) return moment(alpha).get_d();
  if (static_cast<int>(alpha.size()) != n_) throw ContractViolation("moment: multi-index has wrong length");
  // expand (x0 + y)^alpha and use the centred closed form for y^beta
  std::vector<int> beta(n_, 0);
  double total = 0.0;
  while (true) {
    bool even = true;
    int sb = 0;
    for (int i = 0; i < n_; ++i) {
      even = even && beta[i] % 2 == 0;
      sb += beta[i];
    }
    if (even) {
      double lg = std::lgamma(0.5 * n_ + k_ + 1) - std::lgamma(0.5 * sb + 0.5 * n_ + k_ + 1) -
                  0.5 * n_ * std::log(std::numbers::pi);
      for (int i = 0; i < n_; ++i) lg += std::lgamma(0.5 * (beta[i] + 1));
      double term = std::exp(lg) * ipow(r_d_, sb);
      for (int i = 0; i < n_; ++i)
        term *= binomial_z(alpha[i], beta[i]).get_d() * ipow(center_d_[i], alpha[i] - beta[i]);
      total += term;
    }
    int i = 0;
    while (i < n_ && beta[i] == alpha[i]) beta[i++] = 0;
    if (i == n_) break;
    ++beta[i];
  }
  return total;
}

std::complex<double> ThetaBump::fourier(std::span<const double> xi) const {
  if (kind_ != BumpKind::tensor) throw ContractViolation("closed-form Fourier transform exists for the tensor kind only");
  std::complex<double> v = 1.0;
  for (int i = 0; i < n_; ++i)
    v *= std::polar(1.0, -xi[i] * center_d_[i]) * bump_fourier_1d(k_, r_d_ * xi[i]);
  return v;
}

std::complex<double> ThetaBump::fourier_gradient(std::span<const double> xi, int j) const {
  if (kind_ != BumpKind::tensor) throw ContractViolation("closed-form Fourier transform exists for the tensor kind only");
  if (j < 0 || j >= n_) throw ContractViolation("fourier_gradient: index out of range");
  std::complex<double> v = 1.0;
  for (int i = 0; i < n_; ++i) {
    const std::complex<double> phase = std::polar(1.0, -xi[i] * center_d_[i]);
    const double f = bump_fourier_1d(k_, r_d_ * xi[i]);
    if (i == j) {
      const double fp = bump_fourier_1d_derivative(k_, r_d_ * xi[i]);
      v *= phase * (std::complex<double>(0.0, -center_d_[i]) * f + r_d_ * fp);
    } else {
      v *= phase * f;
    }
  }
  return v;
}

nlohmann::json ThetaBump::to_json() const {
  std::vector<std::string> c;
  for (const auto& q : center_) c.push_back(q.get_str());
  return {{"kind", kind_ == BumpKind::tensor ? "tensor" : "radial"},
          {"n", n_},
          {"center", c},
          {"r", r_.get_str()},
          {"k", k_}};
}

std::string ThetaBump::describe() const {
  std::ostringstream os;
  os << (kind_ == BumpKind::tensor ? "tensor" : "radial") << " bump n=" << n_ << " k=" << k_ << " r=" << r_.get_str()
     << " center=(";
  for (int i = 0; i < n_; ++i) os << (i ? "," : "") << center_[i].get_str();
  os << ")";
  return os.str();
}

namespace {

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    std::string s = os.str();
    if (s.find('e') != std::string::npos || s.find('E') != std::string::npos)
      throw ConfigError("use a decimal string for bump parameters in exponent notation");
    return parse_rational(s);
  }
  throw ConfigError("expected a number or rational string");
}

}  // namespace

ThetaBump bump_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.value("kind", std::string("tensor"));
    const int n = j.at("n").get<int>();
    std::vector<Rational> c;
    if (j.contains("center")) {
      for (const auto& v : j.at("center")) c.push_back(rational_from_json(v));
    } else {
      c.assign(n, Rational(0));
    }
    const Rational r = j.contains("r") ? rational_from_json(j.at("r")) : Rational(1);
    const int k = j.value("k", 4);
    if (kind == "tensor") return make_tensor_bump(n, c, r, k);
    if (kind == "radial") return make_radial_bump(n, c, r, k);
    throw ConfigError("unknown bump kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bump JSON: ") + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("bump JSON: ") + e.what());
  }
}

}  // namespace derham
