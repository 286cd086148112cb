#ifndef HARBOR_EST_TRANSFORMS_HPP
#define HARBOR_EST_TRANSFORMS_HPP

#include <span>
#include <string>
#include <vector>

namespace harbor::est {

enum class Transform {
    Identity,
    Log,       // log(y); y must be strictly positive
    Log1p,     // log(y + 1)
    Arcsinh,   // log(y + sqrt(y^2 + 1))
    Extensive, // 1[y > 0]
    Intensive, // log(y) on the y > 0 subsample; zero cells masked out
};

Transform transform_from_name(const std::string& name);
std::string transform_name(Transform t);

struct TransformedOutcome {
    std::vector<double> values;
    /// Inclusion mask; all-true except under Intensive where zero cells drop.
    std::vector<char> include;
};

/// Applies the outcome transform. Values must be nonnegative for the
/// log-family transforms; a zero under plain Log raises NumericError.
TransformedOutcome transform_outcome(std::span<const double> values, Transform kind);

} // namespace harbor::est

#endif
