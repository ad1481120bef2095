/******************************************************************************
 * Copyright 2026 The mracsim Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#include "mracsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mracsim {

namespace {

double off_diagonal_norm(const Matrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

// Householder similarity reduction to upper Hessenberg form, in place.
void hessenberg_reduce(Matrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += h(i, k) * h(i, k);
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;

    double alpha = h(k + 1, k) >= 0.0 ? -xnorm : xnorm;
    double vnorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.0;
    v[k + 1] = h(k + 1, k) - alpha;
    vnorm2 += v[k + 1] * v[k + 1];
    for (std::size_t i = k + 2; i < n; ++i) {
      v[i] = h(i, k);
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;
    const double tau = 2.0 / vnorm2;

    // H <- (I - tau v v') H
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i] * h(i, j);
      s *= tau;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= s * v[i];
    }
    // H <- H (I - tau v v')
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      s *= tau;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * v[j];
    }
    h(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

void eigenvalues_2x2(double a, double b, double c, double d,
                     std::vector<std::complex<double>>* out) {
  const double tr = a + d;
  const double det = a * d - b * c;
  const double disc = tr * tr / 4.0 - det;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    // Stable form: compute the larger-magnitude root first.
    const double s = tr / 2.0 >= 0.0 ? tr / 2.0 + root : tr / 2.0 - root;
    out->emplace_back(s, 0.0);
    if (s != 0.0)
      out->emplace_back(det / s, 0.0);
    else
      out->emplace_back(tr / 2.0 - (tr / 2.0 >= 0.0 ? root : -root), 0.0);
  } else {
    const double im = std::sqrt(-disc);
    out->emplace_back(tr / 2.0, im);
    out->emplace_back(tr / 2.0, -im);
  }
}

// One implicit double-shift QR sweep on the active block h[l..p] of an
// upper Hessenberg matrix (Francis step).
void francis_step(Matrix& h, std::size_t l, std::size_t p, double shift_s,
                  double shift_t) {
  const std::size_t n = h.rows();
  double x = h(l, l) * h(l, l) + h(l, l + 1) * h(l + 1, l) -
             shift_s * h(l, l) + shift_t;
  double y = h(l + 1, l) * (h(l, l) + h(l + 1, l + 1) - shift_s);
  double z = (l + 2 <= p) ? h(l + 1, l) * h(l + 2, l + 1) : 0.0;

  for (std::size_t k = l; k + 1 <= p; ++k) {
    // Householder reflector annihilating (y, z) against x.
    const double hn = std::sqrt(x * x + y * y + z * z);
    if (hn != 0.0) {
      double alpha = x >= 0.0 ? -hn : hn;
      double v0 = x - alpha, v1 = y, v2 = z;
      const double vnorm2 = v0 * v0 + v1 * v1 + v2 * v2;
      if (vnorm2 != 0.0) {
        const double tau = 2.0 / vnorm2;
        const std::size_t last = std::min<std::size_t>(k + 2, p);
        // Left multiply rows k..last.
        for (std::size_t j = (k > l ? k - 1 : l); j < n; ++j) {
          double s = v0 * h(k, j);
          if (k + 1 <= last) s += v1 * h(k + 1, j);
          if (k + 2 <= last) s += v2 * h(k + 2, j);
          s *= tau;
          h(k, j) -= s * v0;
          if (k + 1 <= last) h(k + 1, j) -= s * v1;
          if (k + 2 <= last) h(k + 2, j) -= s * v2;
        }
        // Right multiply columns k..last.
        const std::size_t rmax = std::min<std::size_t>(p, k + 3);
        for (std::size_t i = 0; i <= rmax; ++i) {
          double s = v0 * h(i, k);
          if (k + 1 <= last) s += v1 * h(i, k + 1);
          if (k + 2 <= last) s += v2 * h(i, k + 2);
          s *= tau;
          h(i, k) -= s * v0;
          if (k + 1 <= last) h(i, k + 1) -= s * v1;
          if (k + 2 <= last) h(i, k + 2) -= s * v2;
        }
      }
    }
    if (k + 1 <= p) {
      x = h(k + 1, k);
      y = (k + 2 <= p) ? h(k + 2, k) : 0.0;
      z = (k + 3 <= p) ? h(k + 3, k) : 0.0;
    }
  }
}

}  // namespace

std::vector<double> eig_sym(const Matrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw DimensionMismatch("eig_sym: square matrix required");
  const NumericTolerances& tol = tolerances();

  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
  const double scale = std::max(1.0, m.max_abs());
  if (asym > tol.symmetry_abs * scale)
    throw NotSymmetric("eig_sym: asymmetry " + std::to_string(asym) +
                       " exceeds tolerance");

  // Work on the symmetrized copy.
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));

  const double fnorm = a.frobenius_norm();
  if (fnorm == 0.0) return std::vector<double>(n, 0.0);

  for (int sweep = 0; sweep < tol.jacobi_max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tol.jacobi_off_rel * fnorm) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::pair<double, double> eig_sym_extremes(const Matrix& m) {
  const std::vector<double> ev = eig_sym(m);
  if (ev.empty()) throw DimensionMismatch("eig_sym_extremes: empty matrix");
  return {ev.front(), ev.back()};
}

double spectral_norm(const Matrix& m) {
  if (!m.is_finite()) throw Error("spectral_norm: non-finite entries");
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const Matrix mtm = m.transpose() * m;
  const auto [lo, hi] = eig_sym_extremes(mtm);
  (void)lo;
  return std::sqrt(std::max(0.0, hi));
}

Matrix left_pseudo_inverse(const Matrix& b) {
  const std::size_t n = b.rows();
  const std::size_t m = b.cols();
  if (n < m)
    throw RankDeficient("left_pseudo_inverse: more columns than rows");
  const Matrix btb = b.transpose() * b;
  const auto [lo, hi] = eig_sym_extremes(btb);
  const double smin = std::sqrt(std::max(0.0, lo));
  const double smax = std::sqrt(std::max(0.0, hi));
  if (smin <= tolerances().pinv_rank_rel * smax || smax == 0.0)
    throw RankDeficient("left_pseudo_inverse: B is rank deficient (smin=" +
                        std::to_string(smin) + ", smax=" +
                        std::to_string(smax) + ")");
  return solve_linear(btb, b.transpose());
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n)
    throw DimensionMismatch("eigenvalues: square matrix required");
  if (!a.is_finite()) throw Error("eigenvalues: non-finite entries");

  std::vector<std::complex<double>> out;
  if (n == 0) return out;
  if (n == 1) {
    out.emplace_back(a(0, 0), 0.0);
    return out;
  }

  Matrix h = a;
  hessenberg_reduce(h);

  const double eps = 1e-15;
  const double anorm = std::max(1e-300, h.frobenius_norm());
  std::size_t p = n - 1;
  int iter_same_block = 0;
  long total_iters = 0;
  const long max_total = 60 * static_cast<long>(n) + 200;

  while (true) {
    // Deflate negligible subdiagonals.
    for (std::size_t i = 1; i <= p; ++i) {
      const double small =
          eps * (std::abs(h(i - 1, i - 1)) + std::abs(h(i, i))) + 1e-300;
      if (std::abs(h(i, i - 1)) <= small) h(i, i - 1) = 0.0;
    }

    if (p == 0) {
      out.emplace_back(h(0, 0), 0.0);
      break;
    }
    if (h(p, p - 1) == 0.0) {
      out.emplace_back(h(p, p), 0.0);
      --p;
      iter_same_block = 0;
      continue;
    }
    if (p == 1 || h(p - 1, p - 2) == 0.0) {
      eigenvalues_2x2(h(p - 1, p - 1), h(p - 1, p), h(p, p - 1), h(p, p),
                      &out);
      if (p == 1) break;
      p -= 2;
      iter_same_block = 0;
      continue;
    }

    // Active block [l, p].
    std::size_t l = p - 1;
    while (l > 0 && h(l, l - 1) != 0.0) --l;

    if (++total_iters > max_total)
      throw SingularSystem("eigenvalues: QR iteration failed to converge");

    double s = h(p - 1, p - 1) + h(p, p);
    double t = h(p - 1, p - 1) * h(p, p) - h(p - 1, p) * h(p, p - 1);
    if (++iter_same_block % 12 == 0) {
      // Exceptional shift to break symmetry stalls.
      const double w = std::abs(h(p, p - 1)) + std::abs(h(p - 1, p - 2));
      s = 1.5 * w;
      t = w * w;
    }
    francis_step(h, l, p, s, t);
    (void)anorm;
  }

  return out;
}

bool is_hurwitz(const Matrix& a) {
  const auto ev = eigenvalues(a);
  for (const auto& lambda : ev) {
    if (lambda.real() >= tolerances().hurwitz_margin) return false;
  }
  return true;
}

Matrix solve_lyapunov(const Matrix& a_r, const Matrix& q) {
  const std::size_t n = a_r.rows();
  if (a_r.cols() != n || q.rows() != n || q.cols() != n)
    throw DimensionMismatch("solve_lyapunov: shape mismatch");

  // Q must be symmetric positive definite.
  const auto [q_min, q_max] = eig_sym_extremes(q);
  (void)q_max;
  if (q_min <= 0.0)
    throw Error("solve_lyapunov: Q is not positive definite (lambda_min=" +
                std::to_string(q_min) + ")");
  if (!is_hurwitz(a_r))
    throw NotHurwitz("solve_lyapunov: A_r has an eigenvalue with real part >= " +
                     std::to_string(tolerances().hurwitz_margin));

  // (I (x) Ar' + Ar' (x) I) vec(P) = -vec(Q), column-major vec.
  const std::size_t nn = n * n;
  Matrix k(nn, nn);
  const Matrix at = a_r.transpose();
  // vec index (i, j) -> j * n + i.
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t row = j * n + i;
      // I (x) Ar' acts within column j: sum_k At(i,k) P(k,j).
      for (std::size_t kk = 0; kk < n; ++kk) k(row, j * n + kk) += at(i, kk);
      // Ar' (x) I acts across columns: sum_k P(i,k) Ar(k,j) = At(j,k) P(i,k).
      for (std::size_t kk = 0; kk < n; ++kk) k(row, kk * n + i) += at(j, kk);
    }
  }
  Vector rhs(nn);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) rhs[j * n + i] = -q(i, j);

  Vector vec_p;
  try {
    vec_p = solve_linear(k, rhs);
  } catch (const SingularSystem&) {
    throw SingularSystem("solve_lyapunov: vectorized system is rank deficient");
  }

  Matrix p(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) p(i, j) = vec_p[j * n + i];

  // Symmetrize and verify.
  Matrix ps(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ps(i, j) = 0.5 * (p(i, j) + p(j, i));

  const Matrix residual = a_r.transpose() * ps + ps * a_r + q;
  const double bound =
      tolerances().lyapunov_residual_rel * (1.0 + q.frobenius_norm());
  if (residual.frobenius_norm() > bound)
    throw SingularSystem("solve_lyapunov: residual " +
                         std::to_string(residual.frobenius_norm()) +
                         " exceeds bound " + std::to_string(bound));
  return ps;
}

Vector rk4_step(const DerivativeFn& f, double t, const Vector& y, double h) {
  if (!(h > 0.0)) throw Error("rk4_step: step size must be positive");

  const auto stage = [&](int index, double ts, const Vector& ys) {
    Vector k = f(ts, ys);
    if (k.size() != y.size())
      throw DimensionMismatch("rk4_step: derivative dimension mismatch");
    if (!k.is_finite())
      throw NonFiniteDerivative("rk4_step: non-finite derivative at stage " +
                                std::to_string(index));
    return k;
  };

  const Vector k1 = stage(1, t, y);
  const Vector k2 = stage(2, t + 0.5 * h, y + k1 * (0.5 * h));
  const Vector k3 = stage(3, t + 0.5 * h, y + k2 * (0.5 * h));
  const Vector k4 = stage(4, t + h, y + k3 * h);

  Vector out = y;
  for (std::size_t i = 0; i < y.size(); ++i)
    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace mracsim
