#pragma once

#include <stdexcept>
#include <string>

namespace morseb {

/// Base class for all domain errors thrown by this library.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// A point, boundary point, or geodesic was used with a space it does not
/// belong to (wrong kind, wrong instance tag, or out-of-range vertex id).
struct incompatible_space_error : error {
  using error::error;
};

/// Two arguments that must be distinct coincide (equal boundary points for a
/// bi-infinite geodesic, repeated vertices in an ideal triangle or tuple).
struct degenerate_pair_error : error {
  using error::error;
};

/// The two rays do not converge to the same boundary point.
struct not_asymptotic_error : error {
  using error::error;
};

/// A numeric or structural argument is outside its documented domain.
struct invalid_parameter_error : error {
  using error::error;
};

/// The horizon is too small for the requested computation (for example it
/// does not contain all three feet of an ideal triangle).
struct insufficient_horizon_error : error {
  using error::error;
};

/// A computed point set is empty where a nonempty set is required.
struct empty_set_error : error {
  using error::error;
};

/// No candidate triple passed the center filter at the requested radius.
/// Carries the smallest radius that would have admitted a candidate.
struct empty_candidate_error : error {
  empty_candidate_error(const std::string& what, double nearest)
      : error(what), nearest_achievable(nearest) {}
  double nearest_achievable = 0;
};

/// A statistic was requested over an empty sample.
struct insufficient_samples_error : error {
  using error::error;
};

/// The operation is not defined for this space kind (for example boundary
/// points of a finite weighted graph).
struct unsupported_space_error : error {
  using error::error;
};

/// A configuration file could not be parsed or fails validation.
struct config_error : error {
  using error::error;
};

}  // namespace morseb
