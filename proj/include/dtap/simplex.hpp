#ifndef DTAP_SIMPLEX_HPP
#define DTAP_SIMPLEX_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace dtap {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Tolerance on the unit-sum and [0, 1] checks of a probability vector.
inline constexpr double kSimplexTolerance = 1e-9;

/// A probability vector over a fixed, ordered action set.
///
/// Construction validates membership of the probability simplex; every
/// BasicPolicy in existence therefore has entries in [0, 1] summing to 1
/// (within kSimplexTolerance) and at least one entry.
template <typename Scalar>
class BasicPolicy {
 public:
  using VectorType = Vector<Scalar>;

  explicit BasicPolicy(VectorType probs) : probs_(std::move(probs)) {
    if (probs_.size() < 1) {
      throw std::invalid_argument("policy must have at least one action");
    }
    Scalar sum = 0;
    for (Eigen::Index k = 0; k < probs_.size(); ++k) {
      const Scalar p = probs_[k];
      if (!std::isfinite(p) || p < -kSimplexTolerance ||
          p > 1 + kSimplexTolerance) {
        throw std::invalid_argument("policy entry " + std::to_string(k) +
                                    " outside [0, 1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1) > kSimplexTolerance) {
      throw std::invalid_argument("policy entries sum to " +
                                  std::to_string(sum) + ", expected 1");
    }
  }

  static BasicPolicy uniform(Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("policy must have at least one action");
    return BasicPolicy(VectorType::Constant(n, Scalar(1) / Scalar(n)));
  }

  static BasicPolicy point_mass(Eigen::Index n, Eigen::Index k) {
    if (k < 0 || k >= n) throw std::out_of_range("point mass index out of range");
    VectorType v = VectorType::Zero(n);
    v[k] = 1;
    return BasicPolicy(std::move(v));
  }

  const VectorType& probs() const noexcept { return probs_; }
  Eigen::Index size() const noexcept { return probs_.size(); }
  Scalar operator[](Eigen::Index k) const { return probs_[k]; }

  friend bool operator==(const BasicPolicy& a, const BasicPolicy& b) {
    return a.probs_ == b.probs_;
  }

 private:
  VectorType probs_;
};

using Policy = BasicPolicy<double>;

/// Euclidean projection of `raw` onto {p : sum(p) = 1, p_k >= floor}.
///
/// The floored simplex is an affine image of the standard simplex:
/// p = floor + (1 - n*floor) * q with q on the standard simplex, so the
/// problem reduces to the sort-based exact projection of
/// (raw - floor) / (1 - n*floor).
template <typename Derived>
BasicPolicy<typename Derived::Scalar> project_to_simplex(
    const Eigen::MatrixBase<Derived>& raw,
    typename Derived::Scalar floor = 0) {
  using Scalar = typename Derived::Scalar;
  static_assert(Derived::ColsAtCompileTime == 1, "expected a column vector");

  const Eigen::Index n = raw.size();
  if (n < 1) throw std::invalid_argument("cannot project an empty vector");
  if (!raw.allFinite()) throw std::invalid_argument("cannot project a non-finite vector");
  if (!(floor >= 0) || floor * Scalar(n) >= 1) {
    throw std::invalid_argument("probability floor must lie in [0, 1/n)");
  }

  const Scalar scale = 1 - Scalar(n) * floor;
  Vector<Scalar> q = (raw.derived().array() - floor) / scale;

  Vector<Scalar> sorted = q;
  std::sort(sorted.data(), sorted.data() + n, std::greater<Scalar>());

  // theta is the shift that makes the positive part of (q - theta) sum to 1.
  Scalar prefix = 0;
  Scalar theta = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    prefix += sorted[j];
    const Scalar candidate = (prefix - 1) / Scalar(j + 1);
    if (sorted[j] - candidate > 0) theta = candidate;
  }
  q = (q.array() - theta).max(Scalar(0));

  return BasicPolicy<Scalar>((floor + scale * q.array()).matrix());
}

/// Shannon entropy in bits, with 0 lg 0 = 0.
template <typename Derived>
typename Derived::Scalar entropy_bits(const Eigen::MatrixBase<Derived>& probs) {
  using Scalar = typename Derived::Scalar;
  Scalar h = 0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    const Scalar p = probs[k];
    if (p > 0) h -= p * std::log2(p);
  }
  // Rounding can push a point mass to -0 or a hair below zero.
  return std::max(h, Scalar(0));
}

template <typename Scalar>
Scalar entropy(const BasicPolicy<Scalar>& policy) {
  return entropy_bits(policy.probs());
}

/// Uniform double in [0, 1) built from exactly one 64-bit engine draw.
template <typename Rng>
double unit_draw(Rng& rng) {
  static_assert(Rng::min() == 0 &&
                    Rng::max() == std::numeric_limits<std::uint64_t>::max(),
                "unit_draw expects a full-range 64-bit engine");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Draws an action index with probability policy[k]; consumes one draw.
template <typename Scalar, typename Rng>
Eigen::Index sample(const BasicPolicy<Scalar>& policy, Rng& rng) {
  const double u = unit_draw(rng);
  Scalar cumulative = 0;
  Eigen::Index last_positive = 0;
  for (Eigen::Index k = 0; k < policy.size(); ++k) {
    if (policy[k] <= 0) continue;
    last_positive = k;
    cumulative += policy[k];
    if (u < cumulative) return k;
  }
  return last_positive;
}

}  // namespace dtap

#endif  // DTAP_SIMPLEX_HPP
