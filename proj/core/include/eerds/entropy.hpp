#pragma once

#include <array>
#include <functional>
#include <limits>
#include <vector>

namespace eerds {

/// State (c, u): species concentrations and internal energy density.
struct PrimalPoint {
  std::vector<double> c;
  double u = 0.0;
};

/// Negated entropy gradient (y, v) = -DS(c, u); v < 0 on the domain.
struct DualVariables {
  std::vector<double> y;
  double v = 0.0;
};

/// Value and first/second partial derivatives of the reduced dual entropy
/// at one (mu, eta) point.
struct ReducedDualEval {
  double value = 0.0;
  double d_mu = 0.0;
  double d_eta = 0.0;
  double d_mumu = 0.0;
  double d_mueta = 0.0;
  double d_etaeta = 0.0;
};

/// Concave entropy family
///   S(c,u) = beta0 w(u) - sum_i (c_i log c_i - c_i - c_i log(beta_i (w(u)+w0)))
/// with w(u) = u^alpha / alpha. Closed forms for the gradient, the convex
/// dual H* = L(-S), and the reduced dual H*(-mu q, -eta) are provided; they
/// invert each other exactly (Fenchel equivalences).
///
/// All methods are pure functions of the immutable parameters; the model is
/// safe to share across threads.
class BoltzmannEntropyModel {
 public:
  BoltzmannEntropyModel(int species_count, double beta0,
                        std::vector<double> beta, double w0, double alpha,
                        std::vector<double> charges);

  int species_count() const { return species_count_; }
  double beta0() const { return beta0_; }
  double w0() const { return w0_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& beta() const { return beta_; }
  const std::vector<double>& charges() const { return charges_; }
  /// Growth exponent alpha/(1-alpha) of the reduced dual in 1/eta.
  double growth_exponent_p() const { return p_; }
  bool bipolar() const;

  double w(double u) const;
  double w_prime(double u) const;
  /// Equilibrium concentration of species i at internal energy u.
  double equilibrium_concentration(int i, double u) const;

  double B(const std::vector<double>& y) const;
  double b(double mu) const { return b_derivatives(mu)[0]; }

  /// S(c,u); requires strictly positive state.
  double entropy(const PrimalPoint& z) const;
  /// (y, v) = -DS(c,u); v < 0.
  DualVariables entropy_gradient(const PrimalPoint& z) const;
  /// Temperature 1/D_u S at a strictly positive state.
  double temperature(const PrimalPoint& z) const;

  /// H*(y, v). Returns +infinity for v >= 0 (tagged, not an error).
  double dual_entropy(const std::vector<double>& y, double v) const;
  /// DH*(y, v) = (c, u); throws for v >= 0.
  PrimalPoint dual_entropy_gradient(const std::vector<double>& y,
                                    double v) const;

  /// Reduced dual H*(-mu q, -eta) with its partials; delta adds the
  /// quadratic tilt (delta/2)(|q|^2 mu^2 + eta^2) of the envelope dual.
  ReducedDualEval reduced_dual(double mu, double eta, double delta = 0.0) const;

  /// Convex extension H = -S to the closed cone; +infinity outside.
  double neg_entropy_extended(const std::vector<double>& z) const;
  /// DH at an interior point of the cone (length I+1).
  std::vector<double> neg_entropy_gradient(const std::vector<double>& z) const;
  /// Dense (I+1)x(I+1) Hessian of H at an interior point, row-major.
  std::vector<double> neg_entropy_hessian(const std::vector<double>& z) const;

 private:
  std::array<double, 3> b_derivatives(double mu) const;

  int species_count_;
  double beta0_, w0_, alpha_, p_;
  std::vector<double> beta_, charges_;
  double charge_norm_sq_ = 0.0;
};

/// Boltzmann exclusion family on the constrained cone sum_i c_i <= w(u):
///   H(c,u) = -beta0 w(u) + sum_{i=0..I} w(u) b(c_i / w(u)),
/// with background c_0 = w(u) - sum_i c_i and b(s) = s log s - s + 1
/// (continuously extended by b(0) = 1). Dual closed form carries
/// B(y) = beta0 - I + log(1 + sum e^{y_i}); its reduced dual grows only
/// linearly in mu, which is why the functional-minimization route is not
/// offered for this family.
class SizeExclusionEntropyModel {
 public:
  SizeExclusionEntropyModel(int species_count, double beta0, double alpha,
                            std::vector<double> charges);

  int species_count() const { return species_count_; }
  double beta0() const { return beta0_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& charges() const { return charges_; }

  double w(double u) const;
  double w_prime(double u) const;

  /// S = -H on the open cone; throws outside the closure, finite on it.
  double entropy(const PrimalPoint& z) const;
  DualVariables entropy_gradient(const PrimalPoint& z) const;

  double B_excl(const std::vector<double>& y) const;
  double b_excl(double mu) const;

  /// Closed-form dual; +infinity for v >= 0, requires B_excl(y) > 0.
  double dual_entropy(const std::vector<double>& y, double v) const;
  ReducedDualEval reduced_dual(double mu, double eta) const;

  double neg_entropy_extended(const std::vector<double>& z) const;
  std::vector<double> neg_entropy_gradient(const std::vector<double>& z) const;
  std::vector<double> neg_entropy_hessian(const std::vector<double>& z) const;

 private:
  int species_count_;
  double beta0_, alpha_;
  std::vector<double> charges_;
};

/// s log s - s + 1, extended by continuity at s = 0.
double boltzmann_b(double s);

/// Axis-aligned search box for the brute-force conjugate.
struct OracleBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

OracleBox default_oracle_box(int dims);

/// Brute-force supremum of xi . z - H(z) over the box by grid search with
/// iterative window refinement. Monotonically nondecreasing in the number of
/// refinement levels. H is any extended-real convex function (infinite
/// values mark the outside of its domain).
double legendre_oracle(const std::function<double(const std::vector<double>&)>& neg_entropy,
                       const std::vector<double>& xi, const OracleBox& box,
                       int refinements, int points_per_dim = 33);

/// Proximal point argmin_p H(p) + |p - z|^2 / (2 delta), solved by damped
/// Newton on the strongly convex inner problem (gradient tolerance 1e-10).
template <class Model>
std::vector<double> proximal_point(const Model& model,
                                   const std::vector<double>& z, double delta);

/// Moreau envelope H_delta(z) = min_p H(p) + |z - p|^2 / (2 delta).
template <class Model>
double moreau_envelope(const Model& model, const std::vector<double>& z,
                       double delta);

/// Gradient DH_delta(z) = (z - prox(z)) / delta.
template <class Model>
std::vector<double> moreau_gradient(const Model& model,
                                    const std::vector<double>& z, double delta);

/// Constant c_delta = (1+p)(delta/p)^{p/(1+p)} of the Young-type bound
/// |mu|^q / eta^p >= c_delta |mu|^{q/(1+p)} - delta eta.
double young_lower_bound_constant(double p, double delta);

/// Worst signed margin of the Young-type bound over a (mu, eta) grid;
/// nonnegative (up to roundoff) when the bound holds.
double young_bound_min_margin(double p, double q, double delta, double mu_max,
                              double eta_max, int grid_points);

extern template std::vector<double> proximal_point(const BoltzmannEntropyModel&,
                                                   const std::vector<double>&,
                                                   double);
extern template double moreau_envelope(const BoltzmannEntropyModel&,
                                       const std::vector<double>&, double);
extern template std::vector<double> moreau_gradient(const BoltzmannEntropyModel&,
                                                    const std::vector<double>&,
                                                    double);
extern template std::vector<double> proximal_point(const SizeExclusionEntropyModel&,
                                                   const std::vector<double>&,
                                                   double);
extern template double moreau_envelope(const SizeExclusionEntropyModel&,
                                       const std::vector<double>&, double);
extern template std::vector<double> moreau_gradient(const SizeExclusionEntropyModel&,
                                                    const std::vector<double>&,
                                                    double);

}  // namespace eerds
