// Block-boundary function m for the parity-block process, with its inverse,
// the derived growth function g (log2 g(t) = m^{-1}(t)), and the Laplace
// transform of the Stieltjes measure dg.
//
// Two flavours: the parametric family m(x) = 2^(x/q), and tabulated values
// on integers with monotone linear interpolation in between.
#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace dynbit::parity {

class BlockScheme {
 public:
  enum class Kind { Mq, Table };

  static BlockScheme mq(double q);
  // values = m(0), m(1), ..., m(K); strictly increasing, all >= 1.
  static BlockScheme table(std::vector<double> values);

  Kind kind() const { return kind_; }
  double q() const { return q_; }

  double m(double x) const;
  double m_inverse(double t) const;
  double g(double t) const;  // 2^(m_inverse(t))

  // Usable x-range. Mq is unbounded on both sides; tables cover [0, K].
  bool unbounded() const { return kind_ == Kind::Mq; }
  double x_hi() const;

  // Grid check that 2^(-t) m(t) is strictly increasing; implies the
  // Hadamard-type gap m(k+1)/m(k) >= 2.
  bool monotone_flag() const;
  bool gap_ok() const;

  nlohmann::json to_json() const;
  static BlockScheme from_json(const nlohmann::json& j);

 private:
  BlockScheme() = default;
  Kind kind_ = Kind::Mq;
  double q_ = 1.0;
  std::vector<double> values_;
};

// (Lg)(lambda) = integral of exp(-lambda s) dg(s), evaluated by the change
// of variables s = m(x): ln2 * integral of exp(-lambda m(x)) 2^x dx over
// x >= x_start. Adaptive quadrature with the given relative tolerance; throws
// std::runtime_error when the quadrature cannot certify the tolerance or a
// tabulated range cuts off a non-negligible tail.
double laplace_g(const BlockScheme& scheme, double lambda,
                 double rel_tol = 1e-8,
                 double x_start = -1e300);

}  // namespace dynbit::parity
