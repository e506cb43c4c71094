#pragma once

// Differential forms with exact polynomial coefficients.
//
// A PolyForm in dimension n may carry coefficient polynomials with more than n
// variables; variables 0..n-1 are the coordinates x_1..x_n and the extra ones
// are parameters (a base point, a dilation factor) that d treats as constants.

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "derham/exterior_algebra.hpp"
#include "derham/polynomial.hpp"

namespace derham {

using PolyForm = ExtElement<RationalPoly>;

/// Zero l-form in dimension n whose coefficients live in nvars variables.
PolyForm zero_form(int n, int l);
/// c * x^alpha dx_J with the polynomial ring fixed to nvars (default n).
PolyForm monomial_form(int n, std::span<const int> blade_indices, std::span<const int> alpha, const Rational& c,
                       int nvars = -1);
PolyForm scalar_form(int n, const RationalPoly& p);

/// Largest total degree over all coefficients (-1 for the zero form).
int total_degree(const PolyForm& u);
/// Number of variables used by the coefficients (n if the form is zero).
int coefficient_vars(const PolyForm& u);
/// Re-embeds every coefficient into a ring with nvars variables.
PolyForm widen(const PolyForm& u, int nvars);
PolyForm narrow(const PolyForm& u, int nvars);

PolyForm exterior_d(const PolyForm& u);
/// x ⌟ u with the position vector; zero for 0-forms.
PolyForm koszul(const PolyForm& u);
/// δu = *^{-1}((-1)^l d *u), so that *δ = (-1)^l d*.
PolyForm coderivative(const PolyForm& u);
PolyForm multiply(const RationalPoly& f, const PolyForm& u);

/// The 1-vector (x - a) as a form with nvars-variable coefficients, where the
/// components of a are given as polynomials (constants or symbols).
PolyForm position_minus(int n, std::span<const RationalPoly> a, int nvars);

/// t^l u(a + t(x - a)) for rational a, t.
PolyForm pullback_dilation(const PolyForm& u, std::span<const Rational> a, const Rational& t);
/// Same substitution with symbolic a and t: images[i] replaces x_i by
/// a_i + t (x_i - a_i) with a_i, t polynomials in the output ring.
PolyForm pullback_dilation(const PolyForm& u, std::span<const RationalPoly> a, const RationalPoly& t,
                           int degree_cap = kDefaultDegreeCap);
/// Pullback by x -> s .* x + b (per-axis scaling) on coefficients and basis.
PolyForm pullback_scale_shift(const PolyForm& u, std::span<const Rational> s, std::span<const Rational> b);

/// Per-blade partial-degree bounds; -1 denotes the zero space for that blade,
/// blades absent from the map are also restricted to zero.
struct QSpaceSpec {
  int n = 0;
  int degree = 0;
  std::map<Blade, std::vector<int>> bounds;

  std::string describe() const;
};

/// Tensor-product space of the polynomial de Rham complex: the coefficient of
/// dx_J has degree p-1 in the variables of J and p in the others.
QSpaceSpec q_complex_space(int n, int l, int p);
std::vector<QSpaceSpec> q_complex(int n, int p);

bool qspace_membership(const PolyForm& u, const QSpaceSpec& spec);
/// Monomial forms spanning the space.
std::vector<PolyForm> qspace_basis(const QSpaceSpec& spec);

/// Random form with rational coefficients, total degree <= max_degree. The
/// number of terms per blade is drawn in [1, max_terms].
PolyForm random_polyform(int n, int l, int max_degree, std::mt19937_64& rng, int max_terms = 4);

std::string to_string(const PolyForm& u);

nlohmann::json to_json(const PolyForm& u);
PolyForm polyform_from_json(const nlohmann::json& j);

}  // namespace derham
