#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace eerds {

/// Symmetric tridiagonal matrix with its LDL^T factorization.
class SymTridiagonal {
 public:
  SymTridiagonal() = default;
  SymTridiagonal(std::vector<double> diag, std::vector<double> off)
      : diag_(std::move(diag)), off_(std::move(off)) {
    if (off_.size() + 1 != diag_.size()) {
      throw std::invalid_argument("SymTridiagonal: size mismatch");
    }
  }

  int size() const { return static_cast<int>(diag_.size()); }
  double diag(int i) const { return diag_[i]; }
  double off(int i) const { return off_[i]; }
  std::vector<double>& diag() { return diag_; }
  std::vector<double>& off() { return off_; }

  std::vector<double> multiply(const std::vector<double>& x) const {
    const int n = size();
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
      y[i] = diag_[i] * x[i];
      if (i > 0) y[i] += off_[i - 1] * x[i - 1];
      if (i + 1 < n) y[i] += off_[i] * x[i + 1];
    }
    return y;
  }

  /// LDL^T factorization; returns false on a nonpositive pivot.
  bool factor() {
    const int n = size();
    ld_.assign(n, 0.0);
    ll_.assign(n > 0 ? n - 1 : 0, 0.0);
    double prev_off = 0.0, prev_d = 1.0;
    for (int i = 0; i < n; ++i) {
      double d = diag_[i];
      if (i > 0) d -= prev_off * prev_off / prev_d;
      if (!(d > 0.0) || !std::isfinite(d)) return false;
      ld_[i] = d;
      if (i + 1 < n) {
        ll_[i] = off_[i];
        prev_off = off_[i];
      }
      prev_d = d;
    }
    factored_ = true;
    return true;
  }

  bool factored() const { return factored_; }

  std::vector<double> solve(const std::vector<double>& rhs) const {
    if (!factored_) throw std::logic_error("SymTridiagonal: not factored");
    const int n = size();
    std::vector<double> x(rhs);
    for (int i = 1; i < n; ++i) x[i] -= ll_[i - 1] / ld_[i - 1] * x[i - 1];
    for (int i = 0; i < n; ++i) x[i] /= ld_[i];
    for (int i = n - 2; i >= 0; --i) x[i] -= ll_[i] / ld_[i] * x[i + 1];
    return x;
  }

 private:
  std::vector<double> diag_, off_;
  std::vector<double> ld_, ll_;
  bool factored_ = false;
};

/// In-place Cholesky solve of a small dense SPD system (row-major A).
/// Returns false if a pivot is not strictly positive.
inline bool cholesky_solve_small(int n, std::vector<double>& a,
                                 std::vector<double>& b) {
  for (int k = 0; k < n; ++k) {
    double d = a[k * n + k];
    for (int j = 0; j < k; ++j) d -= a[k * n + j] * a[k * n + j];
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    a[k * n + k] = d;
    for (int i = k + 1; i < n; ++i) {
      double s = a[i * n + k];
      for (int j = 0; j < k; ++j) s -= a[i * n + j] * a[k * n + j];
      a[i * n + k] = s / d;
    }
  }
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int j = 0; j < i; ++j) s -= a[i * n + j] * b[j];
    b[i] = s / a[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[j * n + i] * b[j];
    b[i] = s / a[i * n + i];
  }
  return true;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace eerds
