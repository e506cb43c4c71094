#include "derham/exterior_algebra.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <memory>
#include <mutex>

namespace derham {

namespace {
std::atomic<int> g_max_dimension{kDefaultMaxDimension};
}

int max_dimension() { return g_max_dimension.load(); }

void set_max_dimension(int n) {
  if (n < 1 || n > kHardMaxDimension)
    throw ContractViolation("max dimension must lie in [1, " + std::to_string(kHardMaxDimension) + "]");
  g_max_dimension.store(n);
}

Blade Blade::from_mask(int n, std::uint32_t mask) {
  if (n < 0 || n > max_dimension())
    throw ContractViolation("blade dimension " + std::to_string(n) + " out of range");
  if (n < 32 && (mask >> n) != 0u)
    throw ContractViolation("blade index exceeds dimension " + std::to_string(n));
  Blade b;
  b.n_ = n;
  b.mask_ = mask;
  return b;
}

Blade Blade::from_indices(int n, std::span<const int> indices) {
  std::uint32_t mask = 0;
  int prev = 0;
  for (int j : indices) {
    if (j <= prev) throw ContractViolation("blade indices must be strictly increasing");
    if (j > n) throw ContractViolation("blade index " + std::to_string(j) + " exceeds n=" + std::to_string(n));
    mask |= 1u << (j - 1);
    prev = j;
  }
  return from_mask(n, mask);
}

std::vector<int> Blade::indices() const {
  std::vector<int> out;
  for (int j = 1; j <= n_; ++j)
    if (contains(j)) out.push_back(j);
  return out;
}

std::string Blade::to_string() const {
  if (mask_ == 0) return "1";
  std::string s;
  for (int j : indices()) {
    if (!s.empty()) s += "^";
    s += "dx" + std::to_string(j);
  }
  return s;
}

int wedge_sign(std::uint32_t a, std::uint32_t b) {
  if (a & b) return 0;
  // moving each index of b leftwards past the larger indices of a
  int swaps = 0;
  while (b) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    swaps += std::popcount(a >> (j + 1));
  }
  return (swaps % 2) ? -1 : 1;
}

std::vector<Blade> blades_of_degree(int n, int l) {
  std::vector<Blade> out;
  if (l < 0 || l > n) return out;
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  for (std::uint32_t m = 0;; ++m) {
    if (std::popcount(m) == l) out.push_back(Blade::from_mask(n, m));
    if (m == full) break;
  }
  return out;
}

namespace {

std::unique_ptr<DenseLayout> build_layout(int n, int l) {
  auto lay = std::make_unique<DenseLayout>();
  lay->n = n;
  lay->degree = l;
  if (l < 0 || l > n) return lay;
  lay->index_of_mask.assign(std::size_t{1} << n, -1);
  for (const Blade& b : blades_of_degree(n, l)) {
    lay->index_of_mask[b.mask()] = static_cast<int>(lay->masks.size());
    lay->masks.push_back(b.mask());
  }
  const auto lower = blades_of_degree(n, l - 1);
  const auto upper = blades_of_degree(n, l + 1);
  auto position = [](const std::vector<Blade>& list, std::uint32_t m) {
    for (std::size_t i = 0; i < list.size(); ++i)
      if (list[i].mask() == m) return static_cast<int>(i);
    return -1;
  };
  lay->contraction.resize(lay->masks.size());
  lay->wedge_axis.resize(lay->masks.size());
  for (std::size_t bi = 0; bi < lay->masks.size(); ++bi) {
    const std::uint32_t m = lay->masks[bi];
    int k = 0;
    for (int axis = 0; axis < n; ++axis) {
      const std::uint32_t bit = 1u << axis;
      if (m & bit) {
        lay->contraction[bi].push_back({axis, position(lower, m & ~bit), (k % 2) ? -1 : 1});
        ++k;
      } else {
        lay->wedge_axis[bi].push_back({axis, position(upper, m | bit), wedge_sign(bit, m)});
      }
    }
  }
  return lay;
}

}  // namespace

const DenseLayout& dense_layout(int n, int l) {
  static std::array<std::atomic<const DenseLayout*>, (kHardMaxDimension + 1) * (kHardMaxDimension + 3)> slots{};
  static std::mutex mu;
  if (n < 0 || n > max_dimension()) throw ContractViolation("dense_layout: dimension out of range");
  const int lc = std::clamp(l, -1, n + 1) + 1;
  auto& slot = slots[n * (kHardMaxDimension + 3) + lc];
  if (const DenseLayout* p = slot.load(std::memory_order_acquire)) return *p;
  std::lock_guard<std::mutex> lock(mu);
  if (const DenseLayout* p = slot.load(std::memory_order_acquire)) return *p;
  const DenseLayout* p = build_layout(n, std::clamp(l, -1, n + 1)).release();
  slot.store(p, std::memory_order_release);
  return *p;
}

void contract_dense(int n, int l, std::span<const double> a, std::span<const double> u,
                    std::span<double> out, double w) {
  if (l <= 0) return;
  const DenseLayout& lay = dense_layout(n, l);
  for (std::size_t bi = 0; bi < lay.size(); ++bi) {
    const double c = u[bi];
    if (c == 0.0) continue;
    for (const auto& e : lay.contraction[bi]) out[e.target] += w * e.sign * a[e.axis] * c;
  }
}

void wedge_one_form_dense(int n, int l, std::span<const double> a, std::span<const double> u,
                          std::span<double> out, double w) {
  if (l >= n) return;
  const DenseLayout& lay = dense_layout(n, l);
  for (std::size_t bi = 0; bi < lay.size(); ++bi) {
    const double c = u[bi];
    if (c == 0.0) continue;
    for (const auto& e : lay.wedge_axis[bi]) out[e.target] += w * e.sign * a[e.axis] * c;
  }
}

void hodge_star_dense(int n, int l, std::span<const double> u, std::span<double> out) {
  const DenseLayout& from = dense_layout(n, l);
  const DenseLayout& to = dense_layout(n, n - l);
  const std::uint32_t full = (1u << n) - 1u;
  for (std::size_t bi = 0; bi < from.size(); ++bi) {
    const std::uint32_t m = from.masks[bi];
    const std::uint32_t c = full & ~m;
    out[to.index_of_mask[c]] = wedge_sign(m, c) * u[bi];
  }
}

std::vector<double> to_dense(const ExtElement<double>& u) {
  const DenseLayout& lay = dense_layout(u.dimension(), u.degree());
  std::vector<double> out(lay.size(), 0.0);
  for (const auto& [b, c] : u.terms()) out[lay.index_of_mask[b.mask()]] = c;
  return out;
}

ExtElement<double> from_dense(int n, int l, std::span<const double> coeffs) {
  const DenseLayout& lay = dense_layout(n, l);
  if (coeffs.size() != lay.size()) throw ContractViolation("from_dense: wrong coefficient count");
  ExtElement<double> r(n, l);
  for (std::size_t i = 0; i < lay.size(); ++i) r.add(Blade::from_mask(n, lay.masks[i]), coeffs[i]);
  return r;
}

}  // namespace derham
