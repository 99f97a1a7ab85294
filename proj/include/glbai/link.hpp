#pragma once

#include "glbai/types.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace glbai {

enum class LinkKind { Logistic, Poisson, Identity };

inline std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::Logistic: return "logistic";
    case LinkKind::Poisson: return "poisson";
    case LinkKind::Identity: return "identity";
  }
  return "unknown";
}

inline LinkKind parse_link_kind(std::string_view name) {
  if (name == "logistic") return LinkKind::Logistic;
  if (name == "poisson") return LinkKind::Poisson;
  if (name == "identity") return LinkKind::Identity;
  throw InvalidArgument("unknown link kind '" + std::string(name) +
                        "' (expected logistic, poisson or identity)");
}

/// Inverse link of a generalized linear model together with the regularity
/// constants of the reward model: |r| <= reward_bound, ||theta|| <= param_bound,
/// ||x|| <= feature_bound, and slope_floor <= mu'(z) <= lipschitz on the
/// reachable range of the linear predictor.
template <typename Scalar>
struct LinkModel {
  LinkKind kind = LinkKind::Logistic;
  Scalar reward_bound = 1;
  Scalar lipschitz = Scalar(0.25);
  Scalar slope_floor = Scalar(0.25);
  Scalar param_bound = 1;
  Scalar feature_bound = 1;

  /// Largest |theta^T x| the constants are valid for.
  Scalar predictor_bound() const { return param_bound * feature_bound; }
};

namespace detail {
// Past this the logistic function rounds to 1 in double precision.
inline constexpr double kLogisticSaturation = 36.0;
// exp overflows a double just above 709.
inline constexpr double kExpCeiling = 700.0;
}  // namespace detail

template <typename Scalar>
Scalar mu_eval(LinkKind kind, Scalar z) {
  using std::exp;
  switch (kind) {
    case LinkKind::Logistic: {
      const Scalar sat(detail::kLogisticSaturation);
      if (z > sat) z = sat;
      if (z < -sat) z = -sat;
      return z >= 0 ? Scalar(1) / (Scalar(1) + exp(-z)) : exp(z) / (Scalar(1) + exp(z));
    }
    case LinkKind::Poisson:
      return exp(z > Scalar(detail::kExpCeiling) ? Scalar(detail::kExpCeiling) : z);
    case LinkKind::Identity:
      return z;
  }
  return z;
}

template <typename Scalar>
Scalar mu_eval(const LinkModel<Scalar>& link, Scalar z) {
  return mu_eval(link.kind, z);
}

template <typename Scalar>
Scalar mu_derivative(LinkKind kind, Scalar z) {
  switch (kind) {
    case LinkKind::Logistic: {
      const Scalar m = mu_eval(kind, z);
      return m * (Scalar(1) - m);
    }
    case LinkKind::Poisson:
      return mu_eval(kind, z);
    case LinkKind::Identity:
      return Scalar(1);
  }
  return Scalar(1);
}

template <typename Scalar>
Scalar mu_derivative(const LinkModel<Scalar>& link, Scalar z) {
  return mu_derivative(link.kind, z);
}

/// Log-partition b(z) of the canonical exponential family, b' = mu.
/// The log-likelihood of an observation r at predictor z is r z - b(z).
template <typename Scalar>
Scalar log_partition(LinkKind kind, Scalar z) {
  using std::exp;
  using std::log1p;
  switch (kind) {
    case LinkKind::Logistic:
      return z > 0 ? z + log1p(exp(-z)) : log1p(exp(z));
    case LinkKind::Poisson:
      return exp(z > Scalar(detail::kExpCeiling) ? Scalar(detail::kExpCeiling) : z);
    case LinkKind::Identity:
      return z * z / Scalar(2);
  }
  return z;
}

/// Constants of `kind` for parameters in the ball ||theta|| <= param_bound and
/// the given arm features (one arm per row). The slope floor is taken over the
/// whole interval [-S L, S L], not at the realized parameter.
///
/// reward_bound defaults to 1 for logistic, S L for identity and e^{S L} for
/// poisson when not supplied.
template <typename Scalar, typename Derived>
LinkModel<Scalar> model_constants(LinkKind kind, Scalar param_bound,
                                  const Eigen::MatrixBase<Derived>& features,
                                  std::optional<Scalar> reward_bound = std::nullopt) {
  if (!(param_bound > 0) || !std::isfinite(static_cast<double>(param_bound)))
    throw InvalidArgument("parameter bound S must be positive and finite");
  if (features.rows() == 0 || features.cols() == 0)
    throw InvalidArgument("feature set is empty");
  if (!features.allFinite()) throw InvalidArgument("feature set contains non-finite values");

  LinkModel<Scalar> link;
  link.kind = kind;
  link.param_bound = param_bound;
  link.feature_bound = features.rowwise().norm().maxCoeff();
  if (!(link.feature_bound > 0)) throw InvalidArgument("all feature rows are zero");

  const Scalar sl = link.predictor_bound();
  switch (kind) {
    case LinkKind::Logistic:
      link.lipschitz = Scalar(0.25);
      link.slope_floor = mu_derivative(kind, sl);
      link.reward_bound = reward_bound.value_or(Scalar(1));
      break;
    case LinkKind::Poisson:
      link.lipschitz = mu_derivative(kind, sl);
      link.slope_floor = mu_derivative(kind, -sl);
      link.reward_bound = reward_bound.value_or(mu_eval(kind, sl));
      break;
    case LinkKind::Identity:
      link.lipschitz = Scalar(1);
      link.slope_floor = Scalar(1);
      link.reward_bound = reward_bound.value_or(sl);
      break;
  }
  if (!(link.reward_bound > 0)) throw InvalidArgument("reward bound R must be positive");
  return link;
}

/// kappa = sqrt(3 + 2 log(1 + 2 L^2 / lambda_0)).
template <typename Scalar>
Scalar kappa_constant(Scalar lambda_0, Scalar feature_bound) {
  using std::log;
  using std::sqrt;
  if (!(lambda_0 > 0)) throw InvalidArgument("lambda_0 must be positive");
  if (!(feature_bound > 0)) throw InvalidArgument("feature bound L must be positive");
  return sqrt(Scalar(3) + Scalar(2) * log(Scalar(1) + Scalar(2) * feature_bound * feature_bound / lambda_0));
}

}  // namespace glbai
