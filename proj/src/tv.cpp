#include "esi/tv.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace esi {
namespace {

using Arr = Eigen::ArrayXXd;

Arr to_array(const ScalarField& f) {
  Arr a(f.n_rows, f.n_cols);
  for (int i = 0; i < f.n_rows; ++i)
    for (int j = 0; j < f.n_cols; ++j) a(i, j) = f.at(i, j);
  return a;
}

ScalarField to_field(const Arr& a) {
  ScalarField f(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
  for (int i = 0; i < f.n_rows; ++i)
    for (int j = 0; j < f.n_cols; ++j) f.at(i, j) = a(i, j);
  return f;
}

// Forward differences, zero past the last column/row.
void diff_ops(const Arr& x, Arr& dx, Arr& dy) {
  const Eigen::Index m = x.rows(), n = x.cols();
  dx.setZero(m, n);
  dy.setZero(m, n);
  if (n > 1) dx.leftCols(n - 1) = x.leftCols(n - 1) - x.rightCols(n - 1);
  if (m > 1) dy.topRows(m - 1) = x.topRows(m - 1) - x.bottomRows(m - 1);
}

// Adjoint of diff_ops: accumulates each difference back onto its endpoints.
Arr div_op(const Arr& p, const Arr& q) {
  const Eigen::Index m = p.rows(), n = p.cols();
  Arr out = p + q;
  out.rightCols(n - 1) -= p.leftCols(n - 1);
  out.bottomRows(m - 1) -= q.topRows(m - 1);
  return out;
}

double tv_of(const Arr& x) {
  Arr dx, dy;
  diff_ops(x, dx, dy);
  return (dx.square() + dy.square()).sqrt().sum();
}

}  // namespace

double tv_value(const ScalarField& x) {
  require(x.n_rows >= 1 && x.n_cols >= 1, ErrorCode::BadShape, "empty image");
  return tv_of(to_array(x));
}

double tv_objective(const ScalarField& x, const ScalarField& b, double gamma) {
  require(x.n_rows == b.n_rows && x.n_cols == b.n_cols, ErrorCode::DimMismatch,
          "image shapes differ");
  const Arr xa = to_array(x);
  const Arr ba = to_array(b);
  return 0.5 * (xa - ba).square().sum() + gamma * tv_of(xa);
}

ScalarField tv_denoise(const ScalarField& b, const TVParams& params) {
  require(b.n_rows >= 1 && b.n_cols >= 1, ErrorCode::BadShape, "empty image");
  for (double v : b.data)
    require(std::isfinite(v), ErrorCode::NonFiniteData, "non-finite image");
  require(params.gamma >= 0.0 && std::isfinite(params.gamma),
          ErrorCode::InvalidArgument, "gamma must be non-negative");
  require(params.max_iters >= 1, ErrorCode::InvalidArgument,
          "max_iters must be positive");
  require(params.tol >= 0.0, ErrorCode::InvalidArgument,
          "tol must be non-negative");
  if (params.gamma == 0.0) return b;

  const Arr ba = to_array(b);
  const Eigen::Index m = ba.rows(), n = ba.cols();
  const double g = params.gamma;
  Arr p = Arr::Zero(m, n), q = Arr::Zero(m, n);
  Arr rp = p, rq = q;
  Arr dx, dy;
  double t = 1.0;

  Arr x_prev = ba;
  Arr best = ba;
  double best_obj = g * tv_of(ba);

  for (int it = 0; it < params.max_iters; ++it) {
    const Arr x = ba - g * div_op(rp, rq);
    diff_ops(x, dx, dy);
    Arr pn = rp + dx / (8.0 * g);
    Arr qn = rq + dy / (8.0 * g);
    const Arr denom = (pn.square() + qn.square()).sqrt().max(1.0);
    pn /= denom;
    qn /= denom;

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double mom = (t - 1.0) / t_next;
    rp = pn + mom * (pn - p);
    rq = qn + mom * (qn - q);
    p.swap(pn);
    q.swap(qn);
    t = t_next;

    const Arr x_cur = ba - g * div_op(p, q);
    const double obj =
        0.5 * (x_cur - ba).square().sum() + g * tv_of(x_cur);
    if (obj < best_obj) {
      best_obj = obj;
      best = x_cur;
    }
    const double change = (x_cur - x_prev).matrix().norm();
    const double scale = std::max(x_cur.matrix().norm(), 1e-300);
    x_prev = x_cur;
    if (change <= params.tol * scale) break;
  }
  return to_field(best);
}

}  // namespace esi
