#include "ginprod/periodic_schur.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ginprod/errors.hpp"
#include "householder.hpp"

namespace ginprod {

namespace {

using detail::make_reflector;

struct Rot {
  double c = 1.0;
  double s = 0.0;
};

// Rotation G = [[c, s], [-s, c]] with G (a, b)^T = (r, 0)^T.
Rot make_rot(double a, double b) {
  if (b == 0.0) return {};
  const double r = std::hypot(a, b);
  return {a / r, b / r};
}

// A <- G A on rows (p, p + 1), columns j0..j1.
void rot_rows(SquareMatrix& A, int p, Rot g, int j0, int j1) {
  for (int j = j0; j <= j1; ++j) {
    const double x = A(p, j);
    const double y = A(p + 1, j);
    A(p, j) = g.c * x + g.s * y;
    A(p + 1, j) = -g.s * x + g.c * y;
  }
}

// A <- A G^T on columns (p, p + 1), rows i0..i1.
void rot_cols(SquareMatrix& A, int p, Rot g, int i0, int i1) {
  for (int i = i0; i <= i1; ++i) {
    const double x = A(i, p);
    const double y = A(i, p + 1);
    A(i, p) = g.c * x + g.s * y;
    A(i, p + 1) = -g.s * x + g.c * y;
  }
}

// Small dense block, at most 3x3.
struct Small {
  int n = 0;
  std::array<double, 9> a{};
  double& operator()(int i, int j) { return a[i * 3 + j]; }
  double operator()(int i, int j) const { return a[i * 3 + j]; }
  static Small identity(int n) {
    Small s;
    s.n = n;
    for (int i = 0; i < n; ++i) s(i, i) = 1.0;
    return s;
  }
};

// A <- A P on columns k..k+P.n-1, rows i0..i1.
void apply_right(SquareMatrix& A, int k, const Small& P, int i0, int i1) {
  for (int i = i0; i <= i1; ++i) {
    double row[3];
    for (int j = 0; j < P.n; ++j) row[j] = A(i, k + j);
    for (int c = 0; c < P.n; ++c) {
      double s = 0.0;
      for (int j = 0; j < P.n; ++j) s += row[j] * P(j, c);
      A(i, k + c) = s;
    }
  }
}

// A <- Qt A on rows k..k+Qt.n-1, columns j0..j1.
void apply_left(SquareMatrix& A, int k, const Small& Qt, int j0, int j1) {
  for (int j = j0; j <= j1; ++j) {
    double col[3];
    for (int r = 0; r < Qt.n; ++r) col[r] = A(k + r, j);
    for (int r = 0; r < Qt.n; ++r) {
      double s = 0.0;
      for (int q = 0; q < Qt.n; ++q) s += Qt(r, q) * col[q];
      A(k + r, j) = s;
    }
  }
}

// Orthogonal Qt with Qt * B upper triangular, for the nr x nr block of A at
// (k, k).
Small triangularizer(const SquareMatrix& A, int k, int nr) {
  Small B;
  B.n = nr;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nr; ++j) B(i, j) = A(k + i, k + j);
  }
  Small Qt = Small::identity(nr);
  auto step = [&](int p, int col) {
    const Rot g = make_rot(B(p, col), B(p + 1, col));
    for (int j = 0; j < nr; ++j) {
      const double x = B(p, j);
      const double y = B(p + 1, j);
      B(p, j) = g.c * x + g.s * y;
      B(p + 1, j) = -g.s * x + g.c * y;
      const double qx = Qt(p, j);
      const double qy = Qt(p + 1, j);
      Qt(p, j) = g.c * qx + g.s * qy;
      Qt(p + 1, j) = -g.s * qx + g.c * qy;
    }
  };
  if (nr == 3) {
    step(1, 0);
    step(0, 0);
    step(1, 1);
  } else {
    step(0, 0);
  }
  return Qt;
}

Small transposed(const Small& s) {
  Small t;
  t.n = s.n;
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.n; ++j) t(j, i) = s(i, j);
  }
  return t;
}

// Product of the (size x size) diagonal blocks at `base` of factors 1..m-1,
// renormalized by powers of two. The true product is P * 2^exponent.
struct ScaledBlock {
  Small P;
  long exponent = 0;
};

ScaledBlock triangular_block_product(const std::vector<SquareMatrix>& A, int base, int size) {
  ScaledBlock out{Small::identity(size), 0};
  for (std::size_t f = 1; f < A.size(); ++f) {
    Small next;
    next.n = size;
    double mx = 0.0;
    for (int i = 0; i < size; ++i) {
      for (int j = i; j < size; ++j) {
        double s = 0.0;
        for (int q = i; q <= j; ++q) s += out.P(i, q) * A[f](base + q, base + j);
        next(i, j) = s;
        mx = std::max(mx, std::fabs(s));
      }
    }
    if (mx > 0.0) {
      int e = 0;
      std::frexp(mx, &e);
      for (double& v : next.a) v = std::ldexp(v, -e);
      out.exponent += e;
    }
    out.P = next;
  }
  return out;
}

// Signed number stored as sign * exp(lg).
struct LogNum {
  double lg = -std::numeric_limits<double>::infinity();
  int sg = 0;

  static LogNum of(double x) {
    if (x == 0.0) return {};
    return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
  }
  static LogNum one() { return {0.0, 1}; }
};

LogNum mul(LogNum a, LogNum b) {
  if (a.sg == 0 || b.sg == 0) return {};
  return {a.lg + b.lg, a.sg * b.sg};
}

LogNum add(LogNum a, LogNum b) {
  if (a.sg == 0) return b;
  if (b.sg == 0) return a;
  const double big = std::max(a.lg, b.lg);
  const double v = a.sg * std::exp(a.lg - big) + b.sg * std::exp(b.lg - big);
  if (v == 0.0) return {};
  return {big + std::log(std::fabs(v)), v > 0 ? 1 : -1};
}

void check_finite_window(const SquareMatrix& A, int lo, int hi) {
  for (int i = lo; i <= hi; ++i) {
    for (int j = std::max(lo, i - 1); j <= hi; ++j) {
      if (!std::isfinite(A(i, j))) throw NumericFailure("periodic QR: non-finite entry");
    }
  }
}

// Real eigenvalues of the 2x2 diagonal block at k of the product.
void classify_block(const std::vector<SquareMatrix>& A, int k, ProductEigenvalues& out) {
  const SquareMatrix& A0 = A[0];
  LogNum u11 = LogNum::one(), u12, u22 = LogNum::one();
  for (std::size_t f = 1; f < A.size(); ++f) {
    const LogNum p = LogNum::of(A[f](k, k));
    const LogNum q = LogNum::of(A[f](k, k + 1));
    const LogNum r = LogNum::of(A[f](k + 1, k + 1));
    u12 = add(mul(u11, q), mul(u12, r));
    u11 = mul(u11, p);
    u22 = mul(u22, r);
  }
  const LogNum a = LogNum::of(A0(k, k));
  const LogNum b = LogNum::of(A0(k, k + 1));
  const LogNum c = LogNum::of(A0(k + 1, k));
  const LogNum d = LogNum::of(A0(k + 1, k + 1));
  // B = A0_block * U: trace and determinant.
  const LogNum tr = add(add(mul(a, u11), mul(c, u12)), mul(d, u22));
  LogNum bc = mul(b, c);
  bc.sg = -bc.sg;
  const LogNum det0 = add(mul(a, d), bc);
  const LogNum det = mul(det0, mul(u11, u22));

  double s = tr.sg != 0 ? tr.lg : -std::numeric_limits<double>::infinity();
  if (det.sg != 0) s = std::max(s, 0.5 * det.lg);
  if (!std::isfinite(s)) {
    // Nilpotent block: double eigenvalue 0.
    out.reals.push_back({0.0, 0});
    out.reals.push_back({0.0, 0});
    return;
  }
  const double t = tr.sg == 0 ? 0.0 : tr.sg * std::exp(tr.lg - s);
  const double dd = det.sg == 0 ? 0.0 : det.sg * std::exp(det.lg - 2.0 * s);
  const double disc = t * t - 4.0 * dd;
  if (disc < 0.0) {
    ++out.complex_pairs;
    return;
  }
  const double mu1 = 0.5 * (t + std::copysign(std::sqrt(disc), t));
  if (mu1 == 0.0) {
    out.reals.push_back({0.0, 0});
    out.reals.push_back({0.0, 0});
    return;
  }
  const LogReal first{std::log(std::fabs(mu1)) + s, mu1 > 0 ? 1 : -1};
  out.reals.push_back(first);
  if (det.sg == 0) {
    out.reals.push_back({0.0, 0});
  } else {
    out.reals.push_back({det.lg - first.log_abs, det.sg * first.sign});
  }
}

}  // namespace

ProductEigenvalues product_eigenvalues(std::vector<SquareMatrix> A, double tol,
                                       int max_sweeps) {
  if (A.empty()) throw std::invalid_argument("product_eigenvalues: need at least one factor");
  if (!(tol > 0.0)) throw std::invalid_argument("product_eigenvalues: tol must be positive");
  const int n = A[0].dim;
  const int m = static_cast<int>(A.size());
  for (const SquareMatrix& F : A) {
    if (F.dim != n) throw std::invalid_argument("product_eigenvalues: dimension mismatch");
    for (double v : F.values) {
      if (!std::isfinite(v)) throw std::invalid_argument("product_eigenvalues: non-finite entry");
    }
  }
  ProductEigenvalues out;
  if (n == 0) return out;

  // 1. Triangularize A[m-1], ..., A[1]; each Q moves into the left neighbour.
  std::vector<double> v(n);
  for (int f = m - 1; f >= 1; --f) {
    SquareMatrix& F = A[f];
    SquareMatrix& L = A[f - 1];
    for (int c = 0; c + 1 < n; ++c) {
      const int len = n - c;
      for (int r = 0; r < len; ++r) v[r] = F(c + r, c);
      const detail::Reflector ref = make_reflector(v[0], v.data(), len);
      v[0] = 1.0;
      if (ref.tau == 0.0) continue;
      for (int j = c + 1; j < n; ++j) {
        double s = 0.0;
        for (int r = 0; r < len; ++r) s += v[r] * F(c + r, j);
        s *= ref.tau;
        for (int r = 0; r < len; ++r) F(c + r, j) -= s * v[r];
      }
      F(c, c) = ref.beta;
      for (int r = 1; r < len; ++r) F(c + r, c) = 0.0;
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int r = 0; r < len; ++r) s += L(i, c + r) * v[r];
        s *= ref.tau;
        for (int r = 0; r < len; ++r) L(i, c + r) -= s * v[r];
      }
    }
  }

  // 2. Hessenberg form of A[0], keeping the other factors triangular.
  for (int c = 0; c + 2 < n; ++c) {
    for (int r = n - 1; r >= c + 2; --r) {
      Rot g = make_rot(A[0](r - 1, c), A[0](r, c));
      if (g.s == 0.0) continue;
      rot_rows(A[0], r - 1, g, c, n - 1);
      A[0](r, c) = 0.0;
      for (int f = m - 1; f >= 1; --f) {
        rot_cols(A[f], r - 1, g, 0, r);
        g = make_rot(A[f](r - 1, r - 1), A[f](r, r - 1));
        rot_rows(A[f], r - 1, g, r - 1, n - 1);
        A[f](r, r - 1) = 0.0;
      }
      rot_cols(A[0], r - 1, g, 0, n - 1);
    }
  }

  // 3. Periodic QR iteration on the active window [l, i].
  SquareMatrix& H = A[0];
  const double smlnum = DBL_MIN * (n / DBL_EPSILON);
  int i = n - 1;
  while (i >= 0) {
    int l = 0;
    bool converged = false;
    for (int its = 0; its <= max_sweeps; ++its) {
      int k = i;
      for (; k > l; --k) {
        const double sub = std::fabs(H(k, k - 1));
        if (sub <= smlnum) break;
        double tst = std::fabs(H(k - 1, k - 1)) + std::fabs(H(k, k));
        if (tst == 0.0) {
          if (k - 2 >= l) tst += std::fabs(H(k - 1, k - 2));
          if (k + 1 <= i) tst += std::fabs(H(k + 1, k));
        }
        if (sub <= tol * tst) break;
      }
      l = k;
      if (l > 0) H(l, l - 1) = 0.0;
      if (l >= i - 1) {
        converged = true;
        break;
      }

      // Leading 3x2 part of the product's Hessenberg matrix, scale 2^et.
      const ScaledBlock top = triangular_block_product(A, l, 2);
      const Small& Tt = top.P;
      double h00 = H(l, l) * Tt(0, 0);
      double h01 = H(l, l) * Tt(0, 1) + H(l, l + 1) * Tt(1, 1);
      double h10 = H(l + 1, l) * Tt(0, 0);
      double h11 = H(l + 1, l) * Tt(0, 1) + H(l + 1, l + 1) * Tt(1, 1);
      double h21 = H(l + 2, l + 1) * Tt(1, 1);

      double x, y, z;
      if (its > 0 && its % 10 == 0 && (its / 10) % 2 == 1) {
        // Exceptional step: no shifts at all.
        x = h00 * h00 + h01 * h10;
        y = h10 * (h00 + h11);
        z = h10 * h21;
      } else {
        // Shifts from the trailing 2x2 of the product, scale 2^eb.
        const ScaledBlock bot = triangular_block_product(A, i - 2, 3);
        const Small& Tb = bot.P;
        const int b0 = i - 2;
        auto hb = [&](int r, int c) {
          double s = 0.0;
          for (int q = r - 1; q <= c; ++q) s += H(r, q) * Tb(q - b0, c - b0);
          return s;
        };
        const double b11 = hb(i - 1, i - 1);
        const double b12 = hb(i - 1, i);
        const double b21 = hb(i, i - 1);
        const double b22 = hb(i, i);
        double tr, det;
        if (its > 0 && its % 10 == 0) {
          const double s = std::fabs(b21) + std::fabs(H(i - 1, i - 2) * Tb(0, 0));
          const double e11 = 0.75 * s + b22;
          tr = 2.0 * e11;
          det = e11 * e11 + 0.4375 * s * s;
        } else {
          tr = b11 + b22;
          det = b11 * b22 - b12 * b21;
        }
        const long L = std::max(top.exponent, bot.exponent);
        const int dt = static_cast<int>(std::max(top.exponent - L, -4000L));
        const int db = static_cast<int>(std::max(bot.exponent - L, -4000L));
        h00 = std::ldexp(h00, dt);
        h01 = std::ldexp(h01, dt);
        h10 = std::ldexp(h10, dt);
        h11 = std::ldexp(h11, dt);
        h21 = std::ldexp(h21, dt);
        tr = std::ldexp(tr, db);
        det = std::ldexp(det, 2 * db);
        x = h00 * h00 + h01 * h10 - tr * h00 + det;
        y = h10 * (h00 + h11 - tr);
        z = h10 * h21;
      }
      double vv[3] = {x, y, z};
      {
        const double s = std::fabs(x) + std::fabs(y) + std::fabs(z);
        if (s > 0.0 && std::isfinite(s)) {
          for (double& e : vv) e /= s;
        } else {
          vv[0] = 1.0;
          vv[1] = vv[2] = 0.0;
        }
      }

      for (int kk = l; kk <= i - 1; ++kk) {
        const int nr = std::min(3, i - kk + 1);
        if (kk > l) {
          for (int r = 0; r < nr; ++r) vv[r] = H(kk + r, kk - 1);
        }
        const detail::Reflector ref = make_reflector(vv[0], vv, nr);
        if (kk > l) {
          H(kk, kk - 1) = ref.beta;
          for (int r = 1; r < nr; ++r) H(kk + r, kk - 1) = 0.0;
        }
        if (ref.tau == 0.0) continue;
        Small P = Small::identity(nr);
        const double u[3] = {1.0, vv[1], nr == 3 ? vv[2] : 0.0};
        for (int r = 0; r < nr; ++r) {
          for (int c = 0; c < nr; ++c) P(r, c) -= ref.tau * u[r] * u[c];
        }
        apply_left(H, kk, P, kk, i);
        for (int f = m - 1; f >= 1; --f) {
          apply_right(A[f], kk, P, l, kk + nr - 1);
          const Small Qt = triangularizer(A[f], kk, nr);
          apply_left(A[f], kk, Qt, kk, i);
          for (int r = 1; r < nr; ++r) {
            for (int c = 0; c < r; ++c) A[f](kk + r, kk + c) = 0.0;
          }
          P = transposed(Qt);
        }
        apply_right(H, kk, P, l, std::min(kk + nr, i));
      }
      check_finite_window(H, l, i);
    }
    if (!converged) {
      throw NumericFailure("periodic QR: no deflation within " + std::to_string(max_sweeps) +
                           " iterations");
    }
    i = l - 1;
  }

  // 4. Read off the eigenvalues of the product.
  for (int k = 0; k < n;) {
    if (k + 1 < n && H(k + 1, k) != 0.0) {
      classify_block(A, k, out);
      k += 2;
      continue;
    }
    LogReal x{0.0, 1};
    for (int f = 0; f < m; ++f) {
      const double d = A[f](k, k);
      if (d == 0.0) {
        x = {0.0, 0};
        break;
      }
      x.log_abs += std::log(std::fabs(d));
      if (d < 0) x.sign = -x.sign;
    }
    out.reals.push_back(x);
    ++k;
  }
  return out;
}

}  // namespace ginprod
