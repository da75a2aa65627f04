#include "sbmvar/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <numeric>
#include <string>

#include "sbmvar/errors.hpp"

namespace sbmvar {
namespace {

void check_info(lapack_int info, const char* routine) {
  require(info == 0, ErrorKind::kNumerical,
          std::string(routine) + " failed with info = " + std::to_string(info));
}

// Eigenpairs il..iu (1-based, ascending order) of the tridiagonal (d, e).
void tridiagonal_range(const Eigen::VectorXd& d, const Eigen::VectorXd& e, lapack_int il,
                       lapack_int iu, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  const lapack_int n = static_cast<lapack_int>(d.size());
  Eigen::VectorXd dd = d;
  Eigen::VectorXd ee(n);
  ee.head(n - 1) = e;
  ee(n - 1) = 0.0;
  const lapack_int count = iu - il + 1;
  Eigen::VectorXd w(n);
  vectors.resize(n, count);
  std::vector<lapack_int> support(static_cast<std::size_t>(2 * std::max<lapack_int>(count, 1)));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  check_info(LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, dd.data(), ee.data(), 0.0, 0.0, il, iu,
                            &found, w.data(), vectors.data(), n, count, support.data(), &tryrac),
             "dstemr");
  require(found == count, ErrorKind::kNumerical, "dstemr returned too few eigenpairs");
  values = w.head(count);
}

}  // namespace

Eigenpairs top_abs_eigenpairs(const Eigen::MatrixXd& m, int r) {
  require(m.rows() == m.cols(), ErrorKind::kConsistency, "eigendecomposition needs a square matrix");
  const auto n = static_cast<lapack_int>(m.rows());
  require(r >= 1 && r <= n, ErrorKind::kParameter, "requested eigenpair count outside [1, n]");
  require(m.allFinite(), ErrorKind::kNumerical, "matrix has non-finite entries");

  if (n == 1) return {Eigen::VectorXd::Constant(1, m(0, 0)), Eigen::MatrixXd::Ones(1, 1)};

  Eigen::MatrixXd a = m;
  Eigen::VectorXd d(n), e(n - 1), tau(n - 1);
  check_info(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, a.data(), n, d.data(), e.data(), tau.data()),
             "dsytrd");

  // Candidates: the r lowest and r highest eigenvalues (or the whole spectrum).
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  if (2 * r >= n) {
    tridiagonal_range(d, e, 1, n, values, vectors);
  } else {
    Eigen::VectorXd lo_values, hi_values;
    Eigen::MatrixXd lo_vectors, hi_vectors;
    tridiagonal_range(d, e, 1, r, lo_values, lo_vectors);
    tridiagonal_range(d, e, n - r + 1, n, hi_values, hi_vectors);
    values.resize(2 * r);
    values << lo_values, hi_values;
    vectors.resize(n, 2 * r);
    vectors << lo_vectors, hi_vectors;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index rr) {
    return std::abs(values(l)) > std::abs(values(rr));
  });
  Eigenpairs out;
  out.values.resize(r);
  out.vectors.resize(n, r);
  for (int c = 0; c < r; ++c) {
    out.values(c) = values(order[c]);
    out.vectors.col(c) = vectors.col(order[c]);
  }
  // Back-transform the selected tridiagonal eigenvectors: v = Q * v_tri.
  check_info(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, r, a.data(), n, tau.data(),
                            out.vectors.data(), n),
             "dormtr");
  return out;
}

}  // namespace sbmvar
