#pragma once

// Exterior-algebra identities checked in exact integer arithmetic. Every
// identity is (multi)linear in its arguments, so running it over all blades
// and all coordinate vectors is a complete check for a given n; random
// integer combinations are added on top.

#include <cstdint>
#include <string>
#include <vector>

namespace derham {

struct IdentityTally {
  std::string name;
  long cases = 0;
  long failures = 0;
  std::string first_failure;
};

/// **u = (-1)^{l(n-l)} u, *(a^u) = (-1)^l a⌟*u, <u,v> = *(u^*v) = <*u,*v>,
/// <w, a^u> = <u, a⌟w>, a⌟(u^v) = (a⌟u)^v + (-1)^l u^(a⌟v), b^*b = vol,
/// graded anticommutativity, for dimension n; random_trials combinations each.
std::vector<IdentityTally> exterior_identities(int n, int random_trials = 50, std::uint64_t seed = 1);

/// In R^3: a^u for 1-forms is the cross product under Λ^2 = R^3 (via *),
/// a⌟u is the dot product, and a⌟ of a 2-form is minus the cross product.
IdentityTally r3_correspondence(int trials = 200, std::uint64_t seed = 1);

}  // namespace derham
