#pragma once

// Regularized Poincare operator on polynomial forms, exact:
//   R_l u(x) = int theta(a) (x - a) ⌟ int_0^1 t^{l-1} u(a + t(x - a)) dt da
// together with the base-point operator R_a, the endpoint extensions
// R_0 u = (theta, u), R_{n+1} = 0, and the homotopy checks built on them.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "derham/poly_forms.hpp"
#include "derham/smoothing_kernel.hpp"

namespace derham {

struct PoincareContext {
  ThetaBump theta;
  /// Ball containing supp theta (support tests use it).
  Ball base;
  /// Largest moment order the averaging may use.
  int moment_cap = 16;

  explicit PoincareContext(ThetaBump t, int cap = 16);
  int dimension() const { return theta.dimension(); }
};

/// (theta, u) for a 0-form with coefficients in the n coordinates.
Rational theta_pair(const ThetaBump& theta, const PolyForm& u);
/// R_0 u = (theta, u).
Rational extended_R0(const PoincareContext& ctx, const PolyForm& u);

/// R_l u for 1 <= l <= n (l = degree of u); closed form term by term.
PolyForm poincare_R(const PoincareContext& ctx, const PolyForm& u);

/// R_a u(x) = (x - a) ⌟ int_0^1 t^{l-1} u(a + t(x - a)) dt.
PolyForm poincare_unregularized(std::span<const Rational> a, const PolyForm& u);
/// R_a u with a symbolic: coefficients in 2n variables, a_i = variable n + i.
PolyForm poincare_unregularized_symbolic(const PolyForm& u, int degree_cap = kDefaultDegreeCap);
/// theta-average of the symbolic R_a u (moments replace a^alpha). Second route
/// to R_l, used to cross-check poincare_R.
PolyForm poincare_R_averaged(const PoincareContext& ctx, const PolyForm& u);

/// d R_l u + R_{l+1} du - u, with R_0, R_{n+1} as above. Zero iff the
/// homotopy identity holds for u.
PolyForm homotopy_defect_R(const PoincareContext& ctx, const PolyForm& u);

struct QPreservationReport {
  int n = 0, l = 0, p = 0;
  int checked = 0;
  int preserved = 0;
  bool koszul_closed = true;
  bool affine_invariant = true;
  std::vector<std::string> failures;

  bool ok() const { return preserved == checked && koszul_closed && affine_invariant; }
};

/// Maps every spanning monomial of complex[l] by R_l and tests membership in
/// complex[l-1]. Also tests x⌟ complex[l] ⊆ complex[l-1] and invariance of
/// complex[l] under a dilation and a translation.
QPreservationReport check_qspace_preservation(const PoincareContext& ctx, const std::vector<QSpaceSpec>& complex,
                                              int l);

class NotClosedError : public std::runtime_error {
 public:
  explicit NotClosedError(PolyForm residual);
  const PolyForm& residual() const { return residual_; }

 private:
  PolyForm residual_;
};

/// v = R_l u with dv = u, for closed u (l >= 1). Throws NotClosedError with du.
PolyForm starlike_solve(const PoincareContext& ctx, const PolyForm& u);

}  // namespace derham
