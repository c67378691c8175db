#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace tdelay {

// 113-bit significand, used where alternating sums cancel many digits.
using Quad = boost::multiprecision::cpp_bin_float_quad;

inline constexpr int kMaxSeriesOrder = 32;

// Truncated Taylor series sum_{k <= order} c_k h^k around an expansion point.
template <class Real>
class PowerSeries {
 public:
  explicit PowerSeries(int order, Real constant = Real(0)) : c_(check(order) + 1, Real(0)) { c_[0] = constant; }
  static PowerSeries variable(int order, const Real& x0) {
    PowerSeries s(order, x0);
    if (order >= 1) s.c_[1] = 1;
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  Real& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  const Real& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  // k-th derivative at the expansion point
  Real derivative(int k) const {
    Real f = 1;
    for (int j = 2; j <= k; ++j) f *= j;
    return f * (*this)[k];
  }

  PowerSeries& operator+=(const PowerSeries& o) {
    same_order(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  PowerSeries& operator-=(const PowerSeries& o) {
    same_order(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  PowerSeries& operator*=(const Real& a) {
    for (auto& v : c_) v *= a;
    return *this;
  }
  friend PowerSeries operator+(PowerSeries a, const PowerSeries& b) { return a += b; }
  friend PowerSeries operator-(PowerSeries a, const PowerSeries& b) { return a -= b; }
  friend PowerSeries operator*(PowerSeries a, const Real& s) { return a *= s; }
  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    a.same_order(b);
    PowerSeries out(a.order());
    const int n = a.order();
    for (int i = 0; i <= n; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; i + j <= n; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }

  // f(c_0 + delta) = sum_k taylor[k] delta^k, where taylor[k] = f^{(k)}(c_0)/k!.
  PowerSeries compose(const std::vector<Real>& taylor) const {
    PowerSeries delta = *this;
    delta[0] = 0;
    const int top = std::min<int>(order(), static_cast<int>(taylor.size()) - 1);
    PowerSeries out(order(), taylor[static_cast<std::size_t>(top)]);
    for (int k = top - 1; k >= 0; --k) {
      out = out * delta;
      out[0] += taylor[static_cast<std::size_t>(k)];
    }
    return out;
  }

  PowerSeries exp() const {
    using std::exp;
    std::vector<Real> t(c_.size());
    Real e = exp(c_[0]);
    for (std::size_t k = 0; k < t.size(); ++k) {
      t[k] = e;
      e /= static_cast<int>(k + 1);
    }
    return compose(t);
  }

 private:
  static int check(int order) {
    if (order < 0 || order > kMaxSeriesOrder) throw std::out_of_range("power series order must lie in [0, 32]");
    return order;
  }
  void same_order(const PowerSeries& o) const {
    if (o.c_.size() != c_.size()) throw std::invalid_argument("power series orders differ");
  }
  std::vector<Real> c_;
};

// Bivariate truncated series sum_{i <= p, j <= q} c_ij x^i y^j (rectangular
// truncation). Products keep every retained coefficient exact.
template <class Real>
class PowerSeries2 {
 public:
  PowerSeries2(int p, int q, Real constant = Real(0)) : p_(p), q_(q), c_((p + 1) * (q + 1), Real(0)) {
    if (p < 0 || q < 0 || p > kMaxSeriesOrder || q > kMaxSeriesOrder)
      throw std::out_of_range("power series order must lie in [0, 32]");
    c_[0] = constant;
  }

  int order_x() const { return p_; }
  int order_y() const { return q_; }
  Real& operator()(int i, int j) { return c_[static_cast<std::size_t>(i * (q_ + 1) + j)]; }
  const Real& operator()(int i, int j) const { return c_[static_cast<std::size_t>(i * (q_ + 1) + j)]; }

  PowerSeries2& operator+=(const PowerSeries2& o) {
    same(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  PowerSeries2& operator*=(const Real& a) {
    for (auto& v : c_) v *= a;
    return *this;
  }
  friend PowerSeries2 operator+(PowerSeries2 a, const PowerSeries2& b) { return a += b; }
  friend PowerSeries2 operator*(PowerSeries2 a, const Real& s) { return a *= s; }
  friend PowerSeries2 operator*(const PowerSeries2& a, const PowerSeries2& b) {
    a.same(b);
    PowerSeries2 out(a.p_, a.q_);
    for (int i1 = 0; i1 <= a.p_; ++i1)
      for (int j1 = 0; j1 <= a.q_; ++j1) {
        const Real& x = a(i1, j1);
        if (x == 0) continue;
        for (int i2 = 0; i1 + i2 <= a.p_; ++i2)
          for (int j2 = 0; j1 + j2 <= a.q_; ++j2) out(i1 + i2, j1 + j2) += x * b(i2, j2);
      }
    return out;
  }

  // Highest power of a series with zero constant term that survives truncation.
  int nilpotency() const { return p_ + q_; }

  PowerSeries2 compose(const std::vector<Real>& taylor) const {
    PowerSeries2 delta = *this;
    delta(0, 0) = 0;
    const int top = std::min<int>(nilpotency(), static_cast<int>(taylor.size()) - 1);
    PowerSeries2 out(p_, q_, taylor[static_cast<std::size_t>(top)]);
    for (int k = top - 1; k >= 0; --k) {
      out = out * delta;
      out(0, 0) += taylor[static_cast<std::size_t>(k)];
    }
    return out;
  }

  PowerSeries2 exp() const {
    using std::exp;
    std::vector<Real> t(static_cast<std::size_t>(nilpotency()) + 1);
    Real e = exp((*this)(0, 0));
    for (std::size_t k = 0; k < t.size(); ++k) {
      t[k] = e;
      e /= static_cast<int>(k + 1);
    }
    return compose(t);
  }

 private:
  void same(const PowerSeries2& o) const {
    if (o.p_ != p_ || o.q_ != q_) throw std::invalid_argument("power series orders differ");
  }
  int p_, q_;
  std::vector<Real> c_;
};

}  // namespace tdelay
