#pragma once

// Homotopy operators glued over a finite cover of a union of boxes by pieces
// U_i ∩ Ω starlike with respect to balls B_i, with a partition of unity chi_i:
//   R_l u = sum chi_i R_{l,i} u,         K_l u = -sum dchi_i ^ R_{l,i} u,  K_0 u = sum (theta_i, u) chi_i,
//   T_l u = sum T_{l,i}(chi_i u),        L_l u = sum T_{l+1,i}(dchi_i ^ u), L_n u = sum (int chi_i u) *theta_i,
// so that dR + Rd = 1 - K and dT + Td = 1 - L.

#include <string>
#include <vector>

#include <json.hpp>

#include "derham/bogovskii.hpp"
#include "derham/profiles.hpp"
#include "derham/sampled_form.hpp"

namespace derham {

struct Region {
  std::vector<Box> boxes;

  int dimension() const { return boxes.empty() ? 0 : boxes[0].dimension(); }
  bool contains(std::span<const double> x, double tol = 1e-12) const;
  /// The cube of half-side m around x lies in the union (exact cell test).
  bool contains_cube(std::span<const double> x, double m) const;
  /// Euclidean distance from x to the closed union (0 inside).
  double distance(std::span<const double> x) const;
  Box bounding_box() const;
  double diameter() const;
};

struct StarlikePiece {
  std::string name;
  Region region;  // U_i ∩ Ω
  Ball base;      // B_i
  ThetaBump theta;
};

/// One 1D ramp factor of a partition function.
struct RampFactor {
  int axis = 0;
  bool up = true;
  double a = 0.0, b = 1.0;
};

struct CoverContext {
  std::string name;
  Region domain;
  std::vector<StarlikePiece> pieces;
  std::vector<ScalarField> chi;
  std::vector<BogovskiiContext> operators;  // one per piece, built from theta_i
  double margin = 0.0;                      // interior sample distance from the boundary
  std::vector<std::vector<RampFactor>> factors;  // kept for serialisation
  int ramp_k = 3;
  double margin_fraction = 0.05;

  int dimension() const { return domain.dimension(); }
};

/// chi_i = f_i prod_{k<i} (1 - f_k) for i < m and chi_m = prod_{k<m} (1 - f_k),
/// with f_i the product of the ramps in factors[i] (factors.size() == m - 1).
/// The sum is identically 1.
CoverContext make_cover(std::string name, Region domain, std::vector<StarlikePiece> pieces,
                        const std::vector<std::vector<RampFactor>>& factors, int ramp_k = 3,
                        double margin_fraction = 0.05);

/// Ω = [0,2]x[0,1] ∪ [0,1]x[0,2], two pieces.
CoverContext l_domain_cover(int theta_k = 3, int ramp_k = 3);
/// Ω = [0,3]x[0,1] ∪ [0,1]x[0,2] ∪ [2,3]x[0,2], three pieces.
CoverContext u_domain_cover(int theta_k = 3, int ramp_k = 3);
/// One piece, chi ≡ 1: the composite operators reduce to the single-theta ones.
CoverContext flat_cover(const Box& box, const Ball& base, int theta_k = 3);

/// Parses {name, domain: [box], pieces: [{name, region: [box], ball: {center, radius},
/// theta_k | theta, factor: [{axis, dir, a, b}]}], ramp_k, margin_fraction}, with
/// box = {lo: [...], hi: [...]}; the last piece carries no factor.
CoverContext cover_from_json(const nlohmann::json& j);
/// L, U (built in) or a JSON file path.
CoverContext cover_by_name(const std::string& name);

std::vector<double> composite_R(const CoverContext& c, const SampledForm& u, std::span<const double> x);
std::vector<double> composite_T(const CoverContext& c, const SampledForm& u, std::span<const double> x);
std::vector<double> remainder_K(const CoverContext& c, const SampledForm& u, std::span<const double> x);
std::vector<double> remainder_L(const CoverContext& c, const SampledForm& u, std::span<const double> x);

/// Deterministic points of Ω at cube-distance >= margin from the boundary.
std::vector<std::vector<double>> interior_points(const CoverContext& c, int count);
/// Deterministic points outside Ω̄ (distance >= gap) in an enlarged bounding box.
std::vector<std::vector<double>> exterior_points(const CoverContext& c, int count, double gap = 1e-3);

struct GlueResidual {
  int n = 0, l = 0;
  std::vector<PointResidual> points;
  double max_residual = 0.0;
  double reference = 0.0;  // sup of the input over the points (scale)
};

/// dR_l u + R_{l+1} du + K_l u - u.
GlueResidual glue_homotopy_R(const CoverContext& c, const SampledForm& u,
                             const std::vector<std::vector<double>>& points);
/// dT_l u + T_{l+1} du + L_l u - u.
GlueResidual glue_homotopy_T(const CoverContext& c, const SampledForm& u,
                             const std::vector<std::vector<double>>& points);

struct CommutationResult {
  GlueResidual K;  // dK_l u - K_{l+1} du
  GlueResidual L;  // dL_l u - L_{l+1} du
};
CommutationResult commutation_check(const CoverContext& c, const SampledForm& u,
                                    const std::vector<std::vector<double>>& points);

struct GlueSupportReport {
  int points = 0;
  double max_value = 0.0;
  double u_sup = 0.0;
};
/// |T u| at points outside Ω̄ (u supported in Ω̄).
GlueSupportReport composite_T_support(const CoverContext& c, const SampledForm& u,
                                      const std::vector<std::vector<double>>& points);
/// |R u| at points of Ω for u vanishing on Ω.
GlueSupportReport composite_R_locality(const CoverContext& c, const SampledForm& u,
                                       const std::vector<std::vector<double>>& points);

struct CoverGeometryReport {
  int starlike_segments = 0, starlike_violations = 0;
  int cover_samples = 0, uncovered = 0;
  int partition_samples = 0;
  double partition_defect = 0.0;  // max |sum chi - 1|
  int support_violations = 0;     // chi_i != 0 at points of Ω̄ outside piece i
  bool ok() const {
    return starlike_violations == 0 && uncovered == 0 && partition_defect <= 1e-12 && support_violations == 0;
  }
};
CoverGeometryReport check_cover_geometry(const CoverContext& c, int per_axis = 41);

struct DegenerationReport {
  double R = 0.0, T = 0.0, K = 0.0, L = 0.0;  // max differences from the single-theta operators
  double max() const { return std::max({R, T, K, L}); }
};
/// With a one-piece flat cover, composite operators against bogovskii_T /
/// poincare_R_numeric on the same theta, and K_l (l >= 1), L_l (l < n) against 0.
DegenerationReport degeneration_check(const CoverContext& flat, const SampledForm& u,
                                      const std::vector<std::vector<double>>& points);

nlohmann::json to_json(const CoverContext& c);

}  // namespace derham
