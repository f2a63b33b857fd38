#include "esi/hankel.hpp"

#include <cmath>
#include <complex>

namespace esi {

namespace {

void check_pencil(Eigen::Index q, int p) {
  require(p >= 1 && p < q, ErrorCode::BadPencil,
          "pencil size must satisfy 1 <= p < Q");
}

template <class Vec, class Mat>
Mat lift_impl(const Vec& f, int p) {
  const int q = static_cast<int>(f.size());
  Mat m(q, p);
  for (int row = 0; row < q; ++row)
    for (int j = 0; j < p; ++j) m(row, j) = f[(row + j) % q];
  return m;
}

template <class Mat, class Vec>
Vec unlift_impl(const Mat& m) {
  const int q = static_cast<int>(m.rows());
  const int p = static_cast<int>(m.cols());
  Vec f(q);
  for (int i = 0; i < q; ++i) {
    typename Vec::Scalar s{};
    for (int j = 0; j < p; ++j) s += m(((i - j) % q + q) % q, j);
    f[i] = s / static_cast<double>(p);
  }
  return f;
}

template <class Mat>
int rank_impl(const Mat& m, double tol) {
  require(tol > 0.0, ErrorCode::InvalidArgument, "rank tolerance must be > 0");
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * sv[0]) ++r;
  return r;
}

}  // namespace

HankelLift lift(const Eigen::VectorXd& f, int p) {
  check_pencil(f.size(), p);
  return {static_cast<int>(f.size()), p,
          lift_impl<Eigen::VectorXd, Eigen::MatrixXd>(f, p)};
}

HankelLiftC lift(const Eigen::VectorXcd& f, int p) {
  check_pencil(f.size(), p);
  return {static_cast<int>(f.size()), p,
          lift_impl<Eigen::VectorXcd, Eigen::MatrixXcd>(f, p)};
}

Eigen::VectorXd unlift(const Eigen::MatrixXd& m) {
  return unlift_impl<Eigen::MatrixXd, Eigen::VectorXd>(m);
}

Eigen::VectorXcd unlift(const Eigen::MatrixXcd& m) {
  return unlift_impl<Eigen::MatrixXcd, Eigen::VectorXcd>(m);
}

Eigen::MatrixXd BlockHankelLift::assemble() const {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.matrix.rows();
    cols += b.matrix.cols();
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::Index r0 = 0, c0 = 0;
  for (const auto& b : blocks) {
    m.block(r0, c0, b.matrix.rows(), b.matrix.cols()) = b.matrix;
    r0 += b.matrix.rows();
    c0 += b.matrix.cols();
  }
  return m;
}

int numerical_rank(const Eigen::MatrixXd& m, double tol) {
  return rank_impl(m, tol);
}

int numerical_rank(const Eigen::MatrixXcd& m, double tol) {
  return rank_impl(m, tol);
}

AnnihilatingFilter build_annihilator(const std::vector<double>& frequencies) {
  const auto r = frequencies.size();
  for (std::size_t i = 0; i < r; ++i) {
    require(frequencies[i] >= 0.0 && frequencies[i] < 2.0 * M_PI,
            ErrorCode::InvalidArgument, "frequencies must lie in [0, 2*pi)");
    for (std::size_t j = i + 1; j < r; ++j) {
      double d = std::abs(frequencies[i] - frequencies[j]);
      d = std::min(d, 2.0 * M_PI - d);
      require(d > 1e-12, ErrorCode::DuplicateFrequency,
              "annihilator frequencies must be distinct");
    }
  }
  AnnihilatingFilter h;
  h.roots.resize(static_cast<Eigen::Index>(r));
  h.taps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(r) + 1);
  h.taps[0] = 1.0;
  for (std::size_t j = 0; j < r; ++j) {
    const std::complex<double> root =
        std::exp(std::complex<double>(0.0, -frequencies[j]));
    h.roots[static_cast<Eigen::Index>(j)] = root;
    // Multiply the running polynomial by (1 - root * z^{-1}).
    for (Eigen::Index k = static_cast<Eigen::Index>(j) + 1; k >= 1; --k)
      h.taps[k] -= root * h.taps[k - 1];
  }
  return h;
}

double annihilation_residual(const Eigen::VectorXcd& f,
                             const AnnihilatingFilter& h) {
  const int q = static_cast<int>(f.size());
  require(q > 0, ErrorCode::InvalidArgument, "empty signal");
  const int len = static_cast<int>(h.taps.size());
  double worst = 0.0;
  for (int k = 0; k < q; ++k) {
    std::complex<double> s = 0.0;
    for (int l = 0; l < len; ++l) s += h.taps[l] * f[(k + l) % q];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

Eigen::VectorXd circ_correlate(const Eigen::VectorXd& f,
                               const Eigen::VectorXd& psi) {
  const int q = static_cast<int>(f.size());
  const int p = static_cast<int>(psi.size());
  require(p >= 1 && p <= q, ErrorCode::DimMismatch,
          "filter longer than signal");
  Eigen::VectorXd out(q);
  for (int k = 0; k < q; ++k) {
    double s = 0.0;
    for (int j = 0; j < p; ++j) s += f[(k + j) % q] * psi[j];
    out[k] = s;
  }
  return out;
}

Eigen::VectorXd circ_convolve(const Eigen::VectorXd& d,
                              const Eigen::VectorXd& psi) {
  const int q = static_cast<int>(d.size());
  const int p = static_cast<int>(psi.size());
  require(p >= 1 && p <= q, ErrorCode::DimMismatch,
          "filter longer than signal");
  Eigen::VectorXd out(q);
  for (int k = 0; k < q; ++k) {
    double s = 0.0;
    for (int j = 0; j < p; ++j) s += d[((k - j) % q + q) % q] * psi[j];
    out[k] = s;
  }
  return out;
}

}  // namespace esi
