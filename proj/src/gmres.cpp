// Copyright 2026 The conformal-dbar Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cdbar/gmres.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/IterativeSolvers>

namespace cdbar {
namespace {
class OperatorWrapper;
}  // namespace
}  // namespace cdbar

namespace Eigen::internal {
template <>
struct traits<cdbar::OperatorWrapper> : public traits<Eigen::SparseMatrix<double>> {};
}  // namespace Eigen::internal

namespace cdbar {
namespace {

class OperatorWrapper : public Eigen::EigenBase<OperatorWrapper> {
 public:
  using Scalar = double;
  using RealScalar = double;
  using StorageIndex = int;
  enum {
    ColsAtCompileTime = Eigen::Dynamic,
    MaxColsAtCompileTime = Eigen::Dynamic,
    IsRowMajor = false
  };

  OperatorWrapper(const LinearOperator& op, Eigen::Index n) : op_(&op), n_(n) {}
  Eigen::Index rows() const { return n_; }
  Eigen::Index cols() const { return n_; }

  template <typename Rhs>
  Eigen::Product<OperatorWrapper, Rhs, Eigen::AliasFreeProduct> operator*(
      const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<OperatorWrapper, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  VectorXd apply(const VectorXd& x) const { return (*op_)(x); }

 private:
  const LinearOperator* op_;
  Eigen::Index n_;
};

}  // namespace
}  // namespace cdbar

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<cdbar::OperatorWrapper, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<cdbar::OperatorWrapper, Rhs,
                                generic_product_impl<cdbar::OperatorWrapper, Rhs>> {
  using Scalar = typename Product<cdbar::OperatorWrapper, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const cdbar::OperatorWrapper& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    dst.noalias() += alpha * lhs.apply(rhs);
  }
};
}  // namespace Eigen::internal

namespace cdbar {

KrylovResult gmres_solve(const LinearOperator& apply, const VectorXd& b, const VectorXd& x0,
                         double tol, int max_iterations, int restart) {
  KrylovResult out;
  const double bnorm = b.norm();
  if (bnorm == 0) {
    out.x = VectorXd::Zero(b.size());
    out.converged = true;
    return out;
  }
  const double r0 = (b - apply(x0)).norm() / bnorm;
  if (r0 <= tol) {
    out.x = x0;
    out.residual = r0;
    out.converged = true;
    return out;
  }
  OperatorWrapper A(apply, b.size());
  Eigen::GMRES<OperatorWrapper, Eigen::IdentityPreconditioner> solver;
  solver.compute(A);
  solver.setTolerance(tol);
  solver.setMaxIterations(max_iterations);
  solver.set_restart(restart);
  out.x = solver.solveWithGuess(b, x0);
  out.iterations = static_cast<int>(solver.iterations());
  out.residual = (b - apply(out.x)).norm() / bnorm;
  out.converged = solver.info() == Eigen::Success && out.residual <= 10 * tol;
  return out;
}

}  // namespace cdbar
