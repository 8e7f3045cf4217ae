#include "eerds/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eerds/linalg.hpp"

namespace eerds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx(double s) { return s > 0.0 ? s * std::log(s) : 0.0; }

void require_size(const std::vector<double>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw std::invalid_argument(std::string(what) + ": wrong vector length");
  }
}

}  // namespace

double boltzmann_b(double s) {
  if (s < 0.0) throw std::domain_error("boltzmann_b: negative argument");
  return xlogx(s) - s + 1.0;
}

BoltzmannEntropyModel::BoltzmannEntropyModel(int species_count, double beta0,
                                             std::vector<double> beta,
                                             double w0, double alpha,
                                             std::vector<double> charges)
    : species_count_(species_count),
      beta0_(beta0),
      w0_(w0),
      alpha_(alpha),
      beta_(std::move(beta)),
      charges_(std::move(charges)) {
  if (species_count_ < 1) {
    throw std::invalid_argument("BoltzmannEntropyModel: species_count >= 1");
  }
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) {
    throw std::invalid_argument("BoltzmannEntropyModel: alpha must be in (0,1)");
  }
  if (!(beta0_ > 0.0) || !(w0_ > 0.0)) {
    throw std::invalid_argument("BoltzmannEntropyModel: beta0, w0 must be positive");
  }
  require_size(beta_, species_count_, "beta");
  require_size(charges_, species_count_, "charges");
  for (double b : beta_) {
    if (!(b > 0.0)) {
      throw std::invalid_argument("BoltzmannEntropyModel: beta_i must be positive");
    }
  }
  p_ = alpha_ / (1.0 - alpha_);
  charge_norm_sq_ = 0.0;
  for (double q : charges_) charge_norm_sq_ += q * q;
}

bool BoltzmannEntropyModel::bipolar() const {
  double lo = 0.0, hi = 0.0;
  for (double q : charges_) {
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return lo < 0.0 && hi > 0.0;
}

double BoltzmannEntropyModel::w(double u) const {
  return std::pow(u, alpha_) / alpha_;
}

double BoltzmannEntropyModel::w_prime(double u) const {
  return std::pow(u, alpha_ - 1.0);
}

double BoltzmannEntropyModel::equilibrium_concentration(int i, double u) const {
  return beta_[i] * (w(u) + w0_);
}

double BoltzmannEntropyModel::B(const std::vector<double>& y) const {
  require_size(y, species_count_, "y");
  double s = beta0_;
  for (int i = 0; i < species_count_; ++i) s += beta_[i] * std::exp(y[i]);
  return s;
}

std::array<double, 3> BoltzmannEntropyModel::b_derivatives(double mu) const {
  double b = beta0_, bp = 0.0, bpp = 0.0;
  for (int i = 0; i < species_count_; ++i) {
    const double e = beta_[i] * std::exp(-mu * charges_[i]);
    b += e;
    bp -= charges_[i] * e;
    bpp += charges_[i] * charges_[i] * e;
  }
  return {b, bp, bpp};
}

double BoltzmannEntropyModel::entropy(const PrimalPoint& z) const {
  require_size(z.c, species_count_, "c");
  if (!(z.u > 0.0)) throw std::domain_error("entropy: requires u > 0");
  const double wu = w(z.u);
  double s = beta0_ * wu;
  for (int i = 0; i < species_count_; ++i) {
    const double c = z.c[i];
    if (!(c > 0.0)) throw std::domain_error("entropy: requires c > 0");
    s -= c * std::log(c) - c - c * std::log(beta_[i] * (wu + w0_));
  }
  return s;
}

DualVariables BoltzmannEntropyModel::entropy_gradient(const PrimalPoint& z) const {
  require_size(z.c, species_count_, "c");
  if (!(z.u > 0.0)) throw std::domain_error("entropy_gradient: requires u > 0");
  const double wu = w(z.u);
  DualVariables d;
  d.y.resize(species_count_);
  double big_b = beta0_;
  for (int i = 0; i < species_count_; ++i) {
    const double c = z.c[i];
    if (!(c > 0.0)) throw std::domain_error("entropy_gradient: requires c > 0");
    d.y[i] = std::log(c / (beta_[i] * (wu + w0_)));
    big_b += c / (wu + w0_);
  }
  d.v = -w_prime(z.u) * big_b;
  return d;
}

double BoltzmannEntropyModel::temperature(const PrimalPoint& z) const {
  return -1.0 / entropy_gradient(z).v;
}

double BoltzmannEntropyModel::dual_entropy(const std::vector<double>& y,
                                           double v) const {
  if (v >= 0.0) return kInf;
  const double big_b = B(y);
  const double c_alpha = (1.0 - alpha_) / alpha_;
  return c_alpha * std::pow(big_b, 1.0 + p_) * std::pow(-v, -p_) +
         (big_b - beta0_) * w0_;
}

PrimalPoint BoltzmannEntropyModel::dual_entropy_gradient(
    const std::vector<double>& y, double v) const {
  if (v >= 0.0) {
    throw std::domain_error("dual_entropy_gradient: requires v < 0");
  }
  const double big_b = B(y);
  PrimalPoint z;
  z.u = std::pow(big_b / (-v), 1.0 + p_);
  const double wu = std::pow(big_b / (-v), p_) / alpha_;
  z.c.resize(species_count_);
  for (int i = 0; i < species_count_; ++i) {
    z.c[i] = beta_[i] * std::exp(y[i]) * (wu + w0_);
  }
  return z;
}

ReducedDualEval BoltzmannEntropyModel::reduced_dual(double mu, double eta,
                                                    double delta) const {
  if (!(eta > 0.0)) throw std::domain_error("reduced_dual: requires eta > 0");
  const auto [b, bp, bpp] = b_derivatives(mu);
  const double c_alpha = (1.0 - alpha_) / alpha_;
  const double eta_mp = std::pow(eta, -p_);
  const double bp_pow = std::pow(b, p_);

  ReducedDualEval r;
  r.value = c_alpha * bp_pow * b * eta_mp + (b - beta0_) * w0_;
  r.d_mu = bp_pow * bp * eta_mp / alpha_ + bp * w0_;
  r.d_eta = -std::pow(b / eta, 1.0 + p_);
  r.d_mumu =
      (p_ * std::pow(b, p_ - 1.0) * bp * bp + bp_pow * bpp) * eta_mp / alpha_ +
      bpp * w0_;
  r.d_mueta = -p_ / alpha_ * bp_pow * bp * std::pow(eta, -p_ - 1.0);
  r.d_etaeta = (1.0 + p_) * bp_pow * b * std::pow(eta, -p_ - 2.0);

  if (delta != 0.0) {
    r.value += 0.5 * delta * (charge_norm_sq_ * mu * mu + eta * eta);
    r.d_mu += delta * charge_norm_sq_ * mu;
    r.d_eta += delta * eta;
    r.d_mumu += delta * charge_norm_sq_;
    r.d_etaeta += delta;
  }
  return r;
}

double BoltzmannEntropyModel::neg_entropy_extended(
    const std::vector<double>& z) const {
  require_size(z, species_count_ + 1, "z");
  const double u = z[species_count_];
  if (u < 0.0) return kInf;
  for (int i = 0; i < species_count_; ++i) {
    if (z[i] < 0.0) return kInf;
  }
  const double wu = u > 0.0 ? w(u) : 0.0;
  double h = -beta0_ * wu;
  for (int i = 0; i < species_count_; ++i) {
    const double c = z[i];
    h += xlogx(c) - c - c * std::log(beta_[i] * (wu + w0_));
  }
  return h;
}

std::vector<double> BoltzmannEntropyModel::neg_entropy_gradient(
    const std::vector<double>& z) const {
  require_size(z, species_count_ + 1, "z");
  const double u = z[species_count_];
  if (!(u > 0.0)) throw std::domain_error("neg_entropy_gradient: u <= 0");
  const double wu = w(u);
  std::vector<double> g(species_count_ + 1);
  double big_b = beta0_;
  for (int i = 0; i < species_count_; ++i) {
    const double c = z[i];
    if (!(c > 0.0)) throw std::domain_error("neg_entropy_gradient: c <= 0");
    g[i] = std::log(c / (beta_[i] * (wu + w0_)));
    big_b += c / (wu + w0_);
  }
  g[species_count_] = -w_prime(u) * big_b;
  return g;
}

std::vector<double> BoltzmannEntropyModel::neg_entropy_hessian(
    const std::vector<double>& z) const {
  require_size(z, species_count_ + 1, "z");
  const int n = species_count_ + 1;
  const double u = z[species_count_];
  if (!(u > 0.0)) throw std::domain_error("neg_entropy_hessian: u <= 0");
  const double wu = w(u), wp = w_prime(u);
  const double wpp = (alpha_ - 1.0) * std::pow(u, alpha_ - 2.0);
  std::vector<double> h(n * n, 0.0);
  double csum = 0.0;
  for (int i = 0; i < species_count_; ++i) {
    const double c = z[i];
    if (!(c > 0.0)) throw std::domain_error("neg_entropy_hessian: c <= 0");
    csum += c;
    h[i * n + i] = 1.0 / c;
    h[i * n + (n - 1)] = h[(n - 1) * n + i] = -wp / (wu + w0_);
  }
  const double denom = (wu + w0_) * (wu + w0_);
  h[(n - 1) * n + (n - 1)] =
      -beta0_ * wpp - csum * (wpp * (wu + w0_) - wp * wp) / denom;
  return h;
}

SizeExclusionEntropyModel::SizeExclusionEntropyModel(int species_count,
                                                     double beta0, double alpha,
                                                     std::vector<double> charges)
    : species_count_(species_count),
      beta0_(beta0),
      alpha_(alpha),
      charges_(std::move(charges)) {
  if (species_count_ < 1) {
    throw std::invalid_argument("SizeExclusionEntropyModel: species_count >= 1");
  }
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) {
    throw std::invalid_argument("SizeExclusionEntropyModel: alpha in (0,1)");
  }
  if (!(beta0_ > 0.0)) {
    throw std::invalid_argument("SizeExclusionEntropyModel: beta0 > 0");
  }
  require_size(charges_, species_count_, "charges");
}

double SizeExclusionEntropyModel::w(double u) const {
  return std::pow(u, alpha_) / alpha_;
}

double SizeExclusionEntropyModel::w_prime(double u) const {
  return std::pow(u, alpha_ - 1.0);
}

double SizeExclusionEntropyModel::entropy(const PrimalPoint& z) const {
  require_size(z.c, species_count_, "c");
  std::vector<double> ext(z.c);
  ext.push_back(z.u);
  const double h = neg_entropy_extended(ext);
  if (h == kInf) throw std::domain_error("entropy: state outside domain");
  return -h;
}

DualVariables SizeExclusionEntropyModel::entropy_gradient(
    const PrimalPoint& z) const {
  std::vector<double> ext(z.c);
  ext.push_back(z.u);
  const auto g = neg_entropy_gradient(ext);
  DualVariables d;
  d.y.assign(g.begin(), g.end() - 1);
  d.v = g.back();
  return d;
}

double SizeExclusionEntropyModel::B_excl(const std::vector<double>& y) const {
  require_size(y, species_count_, "y");
  double s = 1.0;
  for (double yi : y) s += std::exp(yi);
  return beta0_ - species_count_ + std::log(s);
}

double SizeExclusionEntropyModel::b_excl(double mu) const {
  std::vector<double> y(species_count_);
  for (int i = 0; i < species_count_; ++i) y[i] = -mu * charges_[i];
  return B_excl(y);
}

double SizeExclusionEntropyModel::dual_entropy(const std::vector<double>& y,
                                               double v) const {
  if (v >= 0.0) return kInf;
  const double big_b = B_excl(y);
  if (!(big_b > 0.0)) {
    throw std::domain_error("dual_entropy: requires B_excl(y) > 0");
  }
  const double p = alpha_ / (1.0 - alpha_);
  return (1.0 - alpha_) / alpha_ * std::pow(big_b, 1.0 + p) * std::pow(-v, -p);
}

ReducedDualEval SizeExclusionEntropyModel::reduced_dual(double mu,
                                                        double eta) const {
  if (!(eta > 0.0)) throw std::domain_error("reduced_dual: requires eta > 0");
  double s = 1.0, s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < species_count_; ++i) {
    const double e = std::exp(-mu * charges_[i]);
    s += e;
    s1 -= charges_[i] * e;
    s2 += charges_[i] * charges_[i] * e;
  }
  const double b = beta0_ - species_count_ + std::log(s);
  if (!(b > 0.0)) {
    throw std::domain_error("reduced_dual: requires b_excl(mu) > 0");
  }
  const double bp = s1 / s;
  const double bpp = s2 / s - bp * bp;
  const double p = alpha_ / (1.0 - alpha_);
  const double c_alpha = (1.0 - alpha_) / alpha_;
  const double eta_mp = std::pow(eta, -p);
  const double b_pow = std::pow(b, p);

  ReducedDualEval r;
  r.value = c_alpha * b_pow * b * eta_mp;
  r.d_mu = b_pow * bp * eta_mp / alpha_;
  r.d_eta = -std::pow(b / eta, 1.0 + p);
  r.d_mumu = (p * std::pow(b, p - 1.0) * bp * bp + b_pow * bpp) * eta_mp / alpha_;
  r.d_mueta = -p / alpha_ * b_pow * bp * std::pow(eta, -p - 1.0);
  r.d_etaeta = (1.0 + p) * b_pow * b * std::pow(eta, -p - 2.0);
  return r;
}

double SizeExclusionEntropyModel::neg_entropy_extended(
    const std::vector<double>& z) const {
  require_size(z, species_count_ + 1, "z");
  const double u = z[species_count_];
  if (u < 0.0) return kInf;
  double csum = 0.0;
  for (int i = 0; i < species_count_; ++i) {
    if (z[i] < 0.0) return kInf;
    csum += z[i];
  }
  const double wu = u > 0.0 ? w(u) : 0.0;
  if (wu == 0.0) return csum == 0.0 ? 0.0 : kInf;
  if (csum > wu) return kInf;
  const double c0 = wu - csum;
  double h = -beta0_ * wu + wu * boltzmann_b(c0 / wu);
  for (int i = 0; i < species_count_; ++i) {
    h += wu * boltzmann_b(z[i] / wu);
  }
  return h;
}

std::vector<double> SizeExclusionEntropyModel::neg_entropy_gradient(
    const std::vector<double>& z) const {
  require_size(z, species_count_ + 1, "z");
  const double u = z[species_count_];
  if (!(u > 0.0)) throw std::domain_error("neg_entropy_gradient: u <= 0");
  const double wu = w(u), wp = w_prime(u);
  double csum = 0.0;
  for (int i = 0; i < species_count_; ++i) {
    if (!(z[i] > 0.0)) throw std::domain_error("neg_entropy_gradient: c <= 0");
    csum += z[i];
  }
  const double c0 = wu - csum;
  if (!(c0 > 0.0)) {
    throw std::domain_error("neg_entropy_gradient: state on exclusion boundary");
  }
  std::vector<double> g(species_count_ + 1);
  double bsum = boltzmann_b(c0 / wu);
  double t = 0.0;
  for (int i = 0; i < species_count_; ++i) {
    g[i] = std::log(z[i] / c0);
    bsum += boltzmann_b(z[i] / wu);
    t += z[i] * std::log(z[i] / c0);
  }
  g[species_count_] = wp * (bsum - beta0_) - wp / wu * t;
  return g;
}

std::vector<double> SizeExclusionEntropyModel::neg_entropy_hessian(
    const std::vector<double>& z) const {
  require_size(z, species_count_ + 1, "z");
  const int n = species_count_ + 1;
  const double u = z[species_count_];
  const double wu = w(u), wp = w_prime(u);
  const double wpp = (alpha_ - 1.0) * std::pow(u, alpha_ - 2.0);
  double csum = 0.0;
  for (int i = 0; i < species_count_; ++i) csum += z[i];
  const double c0 = wu - csum;
  if (!(c0 > 0.0) || !(u > 0.0)) {
    throw std::domain_error("neg_entropy_hessian: interior point required");
  }
  std::vector<double> h(n * n, 0.0);
  double bsum = boltzmann_b(c0 / wu);
  double t = 0.0;
  for (int i = 0; i < species_count_; ++i) {
    bsum += boltzmann_b(z[i] / wu);
    t += z[i] * std::log(z[i] / c0);
  }
  for (int i = 0; i < species_count_; ++i) {
    for (int j = 0; j < species_count_; ++j) {
      h[i * n + j] = (i == j ? 1.0 / z[i] : 0.0) + 1.0 / c0;
    }
    h[i * n + (n - 1)] = h[(n - 1) * n + i] = -wp / c0;
  }
  // d/du of the u-gradient: chain through c0 = w(u) - sum c and the b-sum.
  const double dbsum_du = -wp / (wu * wu) * t;
  const double dt_du = -(csum / c0) * wp;
  h[(n - 1) * n + (n - 1)] = wpp * (bsum - beta0_) + wp * dbsum_du -
                             (wpp * wu - wp * wp) / (wu * wu) * t -
                             wp / wu * dt_du;
  return h;
}

OracleBox default_oracle_box(int dims) {
  OracleBox box;
  box.lo.assign(dims, 1e-3);
  box.hi.assign(dims, 50.0);
  return box;
}

double legendre_oracle(
    const std::function<double(const std::vector<double>&)>& neg_entropy,
    const std::vector<double>& xi, const OracleBox& box, int refinements,
    int points_per_dim) {
  const int dims = static_cast<int>(xi.size());
  if (static_cast<int>(box.lo.size()) != dims ||
      static_cast<int>(box.hi.size()) != dims) {
    throw std::invalid_argument("legendre_oracle: box dimension mismatch");
  }
  if (points_per_dim < 3) points_per_dim = 3;

  std::vector<double> lo(box.lo), hi(box.hi);
  std::vector<double> z(dims), best_z(dims);
  double best = -kInf;

  for (int level = 0; level <= refinements; ++level) {
    std::vector<int> idx(dims, 0);
    std::vector<double> step(dims);
    for (int d = 0; d < dims; ++d) {
      step[d] = (hi[d] - lo[d]) / (points_per_dim - 1);
    }
    bool improved = false;
    std::vector<double> level_best_z(best_z);
    while (true) {
      for (int d = 0; d < dims; ++d) z[d] = lo[d] + idx[d] * step[d];
      const double h = neg_entropy(z);
      if (std::isfinite(h)) {
        double val = -h;
        for (int d = 0; d < dims; ++d) val += xi[d] * z[d];
        if (val > best) {
          best = val;
          level_best_z = z;
          improved = true;
        }
      }
      int d = 0;
      while (d < dims && ++idx[d] == points_per_dim) idx[d++] = 0;
      if (d == dims) break;
    }
    if (improved) best_z = level_best_z;
    // Shrink to a window of a few cells around the incumbent, clipped to the
    // original box.
    for (int d = 0; d < dims; ++d) {
      const double half = 1.5 * step[d];
      lo[d] = std::max(box.lo[d], best_z[d] - half);
      hi[d] = std::min(box.hi[d], best_z[d] + half);
      if (!(lo[d] < hi[d])) {
        lo[d] = box.lo[d];
        hi[d] = box.hi[d];
      }
    }
  }
  return best;
}

namespace {

template <class Model>
std::vector<double> prox_start(const Model& model, const std::vector<double>& z);

template <>
std::vector<double> prox_start(const BoltzmannEntropyModel& model,
                               const std::vector<double>& z) {
  std::vector<double> p(z);
  (void)model;
  for (double& v : p) v = std::max(v, 0.5);
  return p;
}

template <>
std::vector<double> prox_start(const SizeExclusionEntropyModel& model,
                               const std::vector<double>& z) {
  const int n = static_cast<int>(z.size());
  std::vector<double> p(z);
  p[n - 1] = std::max(p[n - 1], 1.0);
  const double wu = model.w(p[n - 1]);
  double csum = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    p[i] = std::max(p[i], 1e-3 * wu);
    csum += p[i];
  }
  if (csum >= 0.9 * wu) {
    const double scale = 0.5 * wu / csum;
    for (int i = 0; i < n - 1; ++i) p[i] *= scale;
  }
  return p;
}

}  // namespace

template <class Model>
std::vector<double> proximal_point(const Model& model,
                                   const std::vector<double>& z, double delta) {
  if (!(delta > 0.0)) throw std::domain_error("proximal_point: delta > 0");
  const int n = static_cast<int>(z.size());
  std::vector<double> p = prox_start(model, z);

  auto objective = [&](const std::vector<double>& q) {
    const double h = model.neg_entropy_extended(q);
    if (!std::isfinite(h)) return kInf;
    double s = h;
    for (int i = 0; i < n; ++i) s += (q[i] - z[i]) * (q[i] - z[i]) / (2.0 * delta);
    return s;
  };

  double f = objective(p);
  const double gtol = 1e-10;
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> g = model.neg_entropy_gradient(p);
    double gnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] += (p[i] - z[i]) / delta;
      gnorm = std::max(gnorm, std::abs(g[i]));
    }
    if (gnorm <= gtol * std::max(1.0, 1.0 / delta)) break;

    std::vector<double> hess = model.neg_entropy_hessian(p);
    for (int i = 0; i < n; ++i) hess[i * n + i] += 1.0 / delta;
    std::vector<double> d(g);
    if (!cholesky_solve_small(n, hess, d)) {
      // Strong convexity makes this unreachable except for roundoff; fall
      // back to a scaled gradient step.
      for (int i = 0; i < n; ++i) d[i] = g[i] * delta;
    }

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      std::vector<double> trial(n);
      for (int i = 0; i < n; ++i) trial[i] = p[i] - t * d[i];
      const double ft = objective(trial);
      if (std::isfinite(ft) && ft <= f - 1e-12 * t * dot(g, d) + 1e-30) {
        bool interior = true;
        try {
          (void)model.neg_entropy_gradient(trial);
        } catch (const std::domain_error&) {
          interior = false;
        }
        if (interior) {
          p = std::move(trial);
          f = ft;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return p;
}

template <class Model>
double moreau_envelope(const Model& model, const std::vector<double>& z,
                       double delta) {
  const std::vector<double> p = proximal_point(model, z, delta);
  double s = model.neg_entropy_extended(p);
  for (std::size_t i = 0; i < z.size(); ++i) {
    s += (z[i] - p[i]) * (z[i] - p[i]) / (2.0 * delta);
  }
  return s;
}

template <class Model>
std::vector<double> moreau_gradient(const Model& model,
                                    const std::vector<double>& z, double delta) {
  const std::vector<double> p = proximal_point(model, z, delta);
  std::vector<double> g(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) g[i] = (z[i] - p[i]) / delta;
  return g;
}

double young_lower_bound_constant(double p, double delta) {
  if (!(p > 0.0) || !(delta > 0.0)) {
    throw std::domain_error("young_lower_bound_constant: p, delta > 0");
  }
  return (1.0 + p) * std::pow(delta / p, p / (1.0 + p));
}

double young_bound_min_margin(double p, double q, double delta, double mu_max,
                              double eta_max, int grid_points) {
  const double c_delta = young_lower_bound_constant(p, delta);
  double worst = kInf;
  for (int i = 0; i < grid_points; ++i) {
    const double mu = -mu_max + 2.0 * mu_max * i / (grid_points - 1);
    for (int j = 1; j <= grid_points; ++j) {
      const double eta = eta_max * j / grid_points;
      const double lhs = std::pow(std::abs(mu), q) / std::pow(eta, p);
      const double rhs = c_delta * std::pow(std::abs(mu), q / (1.0 + p)) -
                         delta * eta;
      worst = std::min(worst, lhs - rhs);
    }
  }
  return worst;
}

template std::vector<double> proximal_point(const BoltzmannEntropyModel&,
                                            const std::vector<double>&, double);
template double moreau_envelope(const BoltzmannEntropyModel&,
                                const std::vector<double>&, double);
template std::vector<double> moreau_gradient(const BoltzmannEntropyModel&,
                                             const std::vector<double>&, double);
template std::vector<double> proximal_point(const SizeExclusionEntropyModel&,
                                            const std::vector<double>&, double);
template double moreau_envelope(const SizeExclusionEntropyModel&,
                                const std::vector<double>&, double);
template std::vector<double> moreau_gradient(const SizeExclusionEntropyModel&,
                                             const std::vector<double>&, double);

}  // namespace eerds
