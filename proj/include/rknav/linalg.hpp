#pragma once
#include <array>
#include <cmath>
#include <cstring>
#include <initializer_list>

#include "rknav/error.hpp"

// Small dense linear algebra for chart dimensions <= kMaxDim.
// Fixed capacity keeps everything on the stack; n is the live size.

namespace rknav {

constexpr int kMaxDim = 8;

struct Vec {
  int n = 0;
  std::array<double, kMaxDim> a{};

  Vec() = default;
  explicit Vec(int size) : n(size) { a.fill(0.0); }
  Vec(std::initializer_list<double> xs) : n(static_cast<int>(xs.size())) {
    int i = 0;
    for (double x : xs) a[i++] = x;
  }

  double& operator[](int i) { return a[i]; }
  double operator[](int i) const { return a[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n; ++i) a[i] += o.a[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n; ++i) a[i] -= o.a[i];
    return *this;
  }
  Vec& operator*=(double c) {
    for (int i = 0; i < n; ++i) a[i] *= c;
    return *this;
  }
};

inline Vec operator+(Vec u, const Vec& w) { return u += w; }
inline Vec operator-(Vec u, const Vec& w) { return u -= w; }
inline Vec operator*(double c, Vec u) { return u *= c; }
inline Vec operator*(Vec u, double c) { return u *= c; }
inline Vec operator-(Vec u) {
  for (int i = 0; i < u.n; ++i) u.a[i] = -u.a[i];
  return u;
}

inline double dot(const Vec& u, const Vec& w) {
  double s = 0.0;
  for (int i = 0; i < u.n; ++i) s += u.a[i] * w.a[i];
  return s;
}

inline double norm2(const Vec& u) { return std::sqrt(dot(u, u)); }

inline double norm_inf(const Vec& u) {
  double m = 0.0;
  for (int i = 0; i < u.n; ++i) m = std::max(m, std::fabs(u.a[i]));
  return m;
}

struct Mat {
  int rows = 0, cols = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c) { a.fill(0.0); }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[i * cols + j]; }
  double operator()(int i, int j) const { return a[i * cols + j]; }
};

inline Vec mul(const Mat& m, const Vec& v) {
  Vec r(m.rows);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

// u^T M w, the bilinear form.
inline double quad(const Mat& m, const Vec& u, const Vec& w) {
  double s = 0.0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) s += u[i] * m(i, j) * w[j];
  return s;
}

// Cholesky factor of a symmetric matrix; returns false if not positive
// definite (any pivot <= tol * scale).
inline bool cholesky(const Mat& m, Mat& lower, double tol = 1e-13) {
  const int n = m.rows;
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::fabs(m(i, i)));
  if (scale == 0.0) return false;
  lower = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    double d = m(j, j);
    for (int k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k);
    if (d <= tol * scale) return false;
    lower(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / lower(j, j);
    }
  }
  return true;
}

inline bool is_positive_definite(const Mat& m, double tol = 1e-13) {
  Mat l;
  return cholesky(m, l, tol);
}

// Gaussian elimination with partial pivoting.  Throws on a singular system.
inline Vec solve(Mat m, Vec b) {
  const int n = m.rows;
  double scale = 0.0;
  for (int i = 0; i < n * n; ++i) scale = std::max(scale, std::fabs(m.a[i]));
  if (scale == 0.0) throw NumericalError("solve: zero matrix");
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(p, k))) p = i;
    if (std::fabs(m(p, k)) < 1e-14 * scale)
      throw NumericalError("solve: singular matrix");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(b[k], b[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      double f = m(i, k) / m(k, k);
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

inline Mat inverse(const Mat& m) {
  const int n = m.rows;
  Mat inv(n, n);
  for (int j = 0; j < n; ++j) {
    Vec e(n);
    e[j] = 1.0;
    Vec col = solve(m, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

inline double det(Mat m) {
  const int n = m.rows;
  double d = 1.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(m(i, k)) > std::fabs(m(p, k))) p = i;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      d = -d;
    }
    if (m(k, k) == 0.0) return 0.0;
    d *= m(k, k);
    for (int i = k + 1; i < n; ++i) {
      double f = m(i, k) / m(k, k);
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return d;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
// Returns them in ascending order.
inline Vec sym_eigenvalues(Mat m) {
  const int n = m.rows;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::fabs(m(p, q)) < 1e-300) continue;
        double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }
  Vec ev(n);
  for (int i = 0; i < n; ++i) ev[i] = m(i, i);
  for (int i = 1; i < n; ++i) {  // insertion sort, n <= kMaxDim
    double x = ev[i];
    int j = i - 1;
    while (j >= 0 && ev[j] > x) {
      ev[j + 1] = ev[j];
      --j;
    }
    ev[j + 1] = x;
  }
  return ev;
}

}  // namespace rknav
