#include "ginprod/schur.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>

#include "ginprod/errors.hpp"
#include "householder.hpp"

namespace ginprod {

namespace {

using detail::make_reflector;
using detail::Reflector;

void check_finite(const SquareMatrix& A) {
  for (double v : A.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("real_schur: matrix has non-finite entries");
  }
}

// Francis double-shift QR on an upper Hessenberg matrix, LAPACK dlahqr style.
// Updates the full matrix so that H ends in real Schur form.
void francis_qr(SquareMatrix& H, SquareMatrix* Z, double tol, int max_sweeps) {
  const int n = H.dim;
  if (n == 0) return;
  for (int j = 0; j < n; ++j) {
    for (int i = j + 2; i < n; ++i) H(i, j) = 0.0;
  }
  const double ulp = DBL_EPSILON;
  const double smlnum = DBL_MIN * (n / ulp);

  auto rotate_pair = [&](int p, double cs, double sn) {
    // H <- G^T H G with G = [[cs, -sn], [sn, cs]] on indices (p, p + 1).
    for (int j = p; j < n; ++j) {
      const double x = H(p, j);
      const double y = H(p + 1, j);
      H(p, j) = cs * x + sn * y;
      H(p + 1, j) = -sn * x + cs * y;
    }
    for (int j = 0; j <= p + 1; ++j) {
      const double x = H(j, p);
      const double y = H(j, p + 1);
      H(j, p) = cs * x + sn * y;
      H(j, p + 1) = -sn * x + cs * y;
    }
    if (Z) {
      for (int j = 0; j < n; ++j) {
        const double x = (*Z)(j, p);
        const double y = (*Z)(j, p + 1);
        (*Z)(j, p) = cs * x + sn * y;
        (*Z)(j, p + 1) = -sn * x + cs * y;
      }
    }
  };

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
        if (sub <= tol * tst) {
          // Ahues and Tisseur's refinement of the classic test.
          const double ab = std::max(sub, std::fabs(H(k - 1, k)));
          const double ba = std::min(sub, std::fabs(H(k - 1, k)));
          const double diff = std::fabs(H(k - 1, k - 1) - H(k, k));
          const double aa = std::max(std::fabs(H(k, k)), diff);
          const double bb = std::min(std::fabs(H(k, k)), diff);
          const double s = aa + ab;
          if (ba * (ab / s) <= std::max(smlnum, tol * (bb * (aa / s)))) break;
        }
      }
      l = k;
      if (l > 0) H(l, l - 1) = 0.0;
      if (l >= i - 1) {
        converged = true;
        break;
      }

      double h11, h12, h21, h22;
      if (its > 0 && its % 20 == 0) {
        const double s = std::fabs(H(i, i - 1)) + std::fabs(H(i - 1, i - 2));
        h11 = 0.75 * s + H(i, i);
        h12 = -0.4375 * s;
        h21 = s;
        h22 = h11;
      } else if (its > 0 && its % 10 == 0) {
        const double s = std::fabs(H(l + 1, l)) + std::fabs(H(l + 2, l + 1));
        h11 = 0.75 * s + H(l, l);
        h12 = -0.4375 * s;
        h21 = s;
        h22 = h11;
      } else {
        h11 = H(i - 1, i - 1);
        h21 = H(i, i - 1);
        h12 = H(i - 1, i);
        h22 = H(i, i);
      }
      double rt1r = 0, rt1i = 0, rt2r = 0, rt2i = 0;
      {
        const double s = std::fabs(h11) + std::fabs(h12) + std::fabs(h21) + std::fabs(h22);
        if (s != 0.0) {
          h11 /= s;
          h21 /= s;
          h12 /= s;
          h22 /= s;
          const double tr = 0.5 * (h11 + h22);
          const double det = (h11 - tr) * (h22 - tr) - h12 * h21;
          const double rtdisc = std::sqrt(std::fabs(det));
          if (det >= 0.0) {
            rt1r = tr * s;
            rt2r = rt1r;
            rt1i = rtdisc * s;
            rt2i = -rt1i;
          } else {
            // Real shifts: use the one closer to h22 twice.
            rt1r = tr + rtdisc;
            rt2r = tr - rtdisc;
            if (std::fabs(rt1r - h22) <= std::fabs(rt2r - h22)) {
              rt1r *= s;
              rt2r = rt1r;
            } else {
              rt2r *= s;
              rt1r = rt2r;
            }
          }
        }
      }

      // Look for two consecutive small subdiagonals to start the bulge.
      int mm = i - 2;
      double v[3];
      for (;; --mm) {
        double h21s = H(mm + 1, mm);
        double s = std::fabs(H(mm, mm) - rt2r) + std::fabs(rt2i) + std::fabs(h21s);
        h21s = H(mm + 1, mm) / s;
        v[0] = h21s * H(mm, mm + 1) + (H(mm, mm) - rt1r) * ((H(mm, mm) - rt2r) / s) -
               rt1i * (rt2i / s);
        v[1] = h21s * (H(mm, mm) + H(mm + 1, mm + 1) - rt1r - rt2r);
        v[2] = h21s * H(mm + 2, mm + 1);
        s = std::fabs(v[0]) + std::fabs(v[1]) + std::fabs(v[2]);
        v[0] /= s;
        v[1] /= s;
        v[2] /= s;
        if (mm == l) break;
        const double h00 = std::fabs(H(mm, mm - 1)) * (std::fabs(v[1]) + std::fabs(v[2]));
        const double h11b =
            std::fabs(v[0]) * (std::fabs(H(mm - 1, mm - 1)) + std::fabs(H(mm, mm)) +
                               std::fabs(H(mm + 1, mm + 1)));
        if (h00 <= ulp * h11b) break;
      }

      for (int kk = mm; kk <= i - 1; ++kk) {
        const int nr = std::min(3, i - kk + 1);
        if (kk > mm) {
          for (int r = 0; r < nr; ++r) v[r] = H(kk + r, kk - 1);
        }
        const Reflector ref = make_reflector(v[0], v, nr);
        if (kk > mm) {
          H(kk, kk - 1) = ref.beta;
          H(kk + 1, kk - 1) = 0.0;
          if (kk < i - 1) H(kk + 2, kk - 1) = 0.0;
        } else if (mm > l) {
          H(kk, kk - 1) *= (1.0 - ref.tau);
        }
        const double t1 = ref.tau;
        const double v2 = v[1];
        const double t2 = t1 * v2;
        if (nr == 3) {
          const double v3 = v[2];
          const double t3 = t1 * v3;
          for (int j = kk; j < n; ++j) {
            const double sum = H(kk, j) + v2 * H(kk + 1, j) + v3 * H(kk + 2, j);
            H(kk, j) -= sum * t1;
            H(kk + 1, j) -= sum * t2;
            H(kk + 2, j) -= sum * t3;
          }
          const int top = std::min(kk + 3, i);
          for (int j = 0; j <= top; ++j) {
            const double sum = H(j, kk) + v2 * H(j, kk + 1) + v3 * H(j, kk + 2);
            H(j, kk) -= sum * t1;
            H(j, kk + 1) -= sum * t2;
            H(j, kk + 2) -= sum * t3;
          }
          if (Z) {
            for (int j = 0; j < n; ++j) {
              const double sum = (*Z)(j, kk) + v2 * (*Z)(j, kk + 1) + v3 * (*Z)(j, kk + 2);
              (*Z)(j, kk) -= sum * t1;
              (*Z)(j, kk + 1) -= sum * t2;
              (*Z)(j, kk + 2) -= sum * t3;
            }
          }
        } else {
          for (int j = kk; j < n; ++j) {
            const double sum = H(kk, j) + v2 * H(kk + 1, j);
            H(kk, j) -= sum * t1;
            H(kk + 1, j) -= sum * t2;
          }
          for (int j = 0; j <= i; ++j) {
            const double sum = H(j, kk) + v2 * H(j, kk + 1);
            H(j, kk) -= sum * t1;
            H(j, kk + 1) -= sum * t2;
          }
          if (Z) {
            for (int j = 0; j < n; ++j) {
              const double sum = (*Z)(j, kk) + v2 * (*Z)(j, kk + 1);
              (*Z)(j, kk) -= sum * t1;
              (*Z)(j, kk + 1) -= sum * t2;
            }
          }
        }
      }
    }
    if (!converged) {
      throw NumericFailure("real_schur: QR iteration did not converge within " +
                           std::to_string(max_sweeps) + " sweeps");
    }
    if (l == i - 1) {
      // 2x2 block: split it when its eigenvalues are real.
      const double a = H(i - 1, i - 1);
      const double b = H(i - 1, i);
      const double c = H(i, i - 1);
      const double d = H(i, i);
      if (c != 0.0) {
        const double p = 0.5 * (a - d);
        const double q = p * p + b * c;
        if (q >= 0.0) {
          const double z = p + std::copysign(std::sqrt(q), p);
          const double r = std::hypot(z, c);
          rotate_pair(i - 1, z / r, c / r);
          H(i, i - 1) = 0.0;
        }
      }
    }
    i = l - 1;
  }
}

}  // namespace

void hessenberg_reduce(SquareMatrix& A, SquareMatrix* Q) {
  const int n = A.dim;
  if (Q) *Q = SquareMatrix::identity(n);
  std::vector<double> v(n);
  for (int k = 0; k + 2 < n; ++k) {
    const int len = n - k - 1;
    for (int r = 0; r < len; ++r) v[r] = A(k + 1 + r, k);
    const Reflector ref = make_reflector(v[0], v.data(), len);
    v[0] = 1.0;
    if (ref.tau == 0.0) continue;
    // Left: rows k+1.., columns k..
    for (int j = k; j < n; ++j) {
      double sum = 0.0;
      for (int r = 0; r < len; ++r) sum += v[r] * A(k + 1 + r, j);
      sum *= ref.tau;
      for (int r = 0; r < len; ++r) A(k + 1 + r, j) -= sum * v[r];
    }
    // Right: all rows, columns k+1..
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int r = 0; r < len; ++r) sum += A(i, k + 1 + r) * v[r];
      sum *= ref.tau;
      for (int r = 0; r < len; ++r) A(i, k + 1 + r) -= sum * v[r];
    }
    if (Q) {
      for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int r = 0; r < len; ++r) sum += (*Q)(i, k + 1 + r) * v[r];
        sum *= ref.tau;
        for (int r = 0; r < len; ++r) (*Q)(i, k + 1 + r) -= sum * v[r];
      }
    }
    A(k + 1, k) = ref.beta;
    for (int r = 1; r < len; ++r) A(k + 1 + r, k) = 0.0;
  }
}

void balance(SquareMatrix& A) {
  // EISPACK balanc, scaling part only.
  const int n = A.dim;
  constexpr double radix = 2.0;
  constexpr double b2 = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::fabs(A(j, i));
        r += std::fabs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= b2;
      }
      g = r * radix;
      while (c >= g) {
        f /= radix;
        c /= b2;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        for (int j = 0; j < n; ++j) A(i, j) /= f;
        for (int j = 0; j < n; ++j) A(j, i) *= f;
      }
    }
  }
}

SchurResult real_schur(const SquareMatrix& A, double tol, int max_sweeps) {
  check_finite(A);
  if (!(tol > 0.0)) throw std::invalid_argument("real_schur: tol must be positive");
  SchurResult out;
  out.T = A;
  hessenberg_reduce(out.T, &out.Q);
  francis_qr(out.T, &out.Q, tol, max_sweeps);
  return out;
}

SquareMatrix real_schur_form(const SquareMatrix& A, double tol, int max_sweeps) {
  check_finite(A);
  if (!(tol > 0.0)) throw std::invalid_argument("real_schur_form: tol must be positive");
  SquareMatrix T = A;
  balance(T);
  hessenberg_reduce(T, nullptr);
  francis_qr(T, nullptr, tol, max_sweeps);
  return T;
}

}  // namespace ginprod
