#include "polaron/pt/two_body.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "polaron/core/quadrature.hpp"
#include "polaron/error.hpp"

namespace polaron::pt {

namespace {

constexpr double kPi = std::numbers::pi;

using MapM = Eigen::Map<Eigen::MatrixXd>;
using CMapM = Eigen::Map<const Eigen::MatrixXd>;

}  // namespace

TwoBodyOperator::TwoBodyOperator(std::shared_ptr<const InternalGrid> grid)
    : grid_(std::move(grid)), n_(grid_->n_r() - 1), nu_(grid_->n_u()) {
  const auto r = grid_->radial->nodes();
  const auto W = grid_->radial->line_weights();
  scale_r_.resize(n_);
  inv_r2_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    scale_r_[i] = std::sqrt(W[i]) * r[i];
    inv_r2_[i] = 1.0 / (r[i] * r[i]);
  }
  scale_u_.resize(nu_);
  for (std::size_t k = 0; k < nu_; ++k) scale_u_[k] = std::sqrt(grid_->angular.weights[k]);
  build_kinetic();
  build_repulsion();
}

void TwoBodyOperator::build_kinetic() {
  const auto W = grid_->radial->line_weights();
  const Eigen::MatrixXd K = Eigen::MatrixXd(grid_->radial->kinetic_matrix()).topLeftCorner(n_, n_);
  Eigen::VectorXd inv(n_);
  for (std::size_t i = 0; i < n_; ++i) inv[i] = 1.0 / std::sqrt(W[i]);
  S_ = inv.asDiagonal() * K * inv.asDiagonal();
  S_ = 0.5 * (S_ + S_.transpose()).eval();

  const auto& u = grid_->angular.nodes;
  legendre_.resize(nu_, nu_);
  for (std::size_t l = 0; l < nu_; ++l)
    for (std::size_t k = 0; k < nu_; ++k)
      legendre_(l, k) = scale_u_[k] * std::sqrt((2.0 * l + 1.0) / 2.0) * core::legendre(int(l), u[k]).p;
  Eigen::VectorXd ll(nu_);
  for (std::size_t l = 0; l < nu_; ++l) ll[l] = double(l) * double(l + 1);
  angular_ = legendre_.transpose() * ll.asDiagonal() * legendre_;

  basis_.resize(nu_);
  eig_.resize(nu_);
  Eigen::VectorXd ir2 = Eigen::Map<const Eigen::VectorXd>(inv_r2_.data(), n_);
  for (std::size_t l = 0; l < nu_; ++l) {
    Eigen::MatrixXd Sl = S_;
    Sl.diagonal() += ll[l] * ir2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sl);
    basis_[l] = es.eigenvectors();
    eig_[l] = es.eigenvalues();
  }
}

// 1/|x-y| = sum_L g_L(r1, r2) P_L(u), g_L = r<^L / r>^(L+1). Angular integrals
// of products of DVR functions are exact for L <= 2 n_u - 2, the largest L that
// couples them. Radially, the kink of g_L at r1 = r2 is integrated exactly
// against the element interpolant in r2 (product integration), then
// symmetrized.
void TwoBodyOperator::build_repulsion() {
  const auto& rg = *grid_->radial;
  const auto r = rg.nodes();
  const auto W = rg.line_weights();
  const int n_l = int(2 * nu_ - 1);
  const int order = core::RadialGrid::kOrder;
  const auto lob = core::gauss_lobatto(core::RadialGrid::kElementPoints);
  const auto gl = core::gauss_legendre(24);
  const double h = rg.element_width();

  std::vector<Eigen::MatrixXd> c(n_l, Eigen::MatrixXd::Zero(n_, n_));
  auto add_piece = [&](std::size_t i, int e, double p, double q) {
    std::vector<double> gL(n_l);
    const double ri = r[i];
    const double a = e * h;
    for (std::size_t m = 0; m < gl.nodes.size(); ++m) {
      const double s = 0.5 * (p + q) + 0.5 * (q - p) * gl.nodes[m];
      const double ws = 0.5 * (q - p) * gl.weights[m];
      const double xi = 2.0 * (s - a) / h - 1.0;
      const auto phi = core::lagrange_basis(lob.nodes, xi);
      const bool inner = s < ri;
      const double ratio = inner ? s / ri : ri / s;
      double g = 1.0 / (inner ? ri : s);
      for (int L = 0; L < n_l; ++L) {
        gL[L] = g;
        g *= ratio;
      }
      for (int qn = 0; qn <= order; ++qn) {
        const long j = long(e) * order + qn - 1;
        if (j < 0 || j >= long(n_)) continue;
        const double f = ws * phi[qn];
        for (int L = 0; L < n_l; ++L) c[L](i, j) += f * gL[L];
      }
    }
  };
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n_; ++i) {
    const double ri = r[i];
    for (int e = 0; e < rg.n_elements(); ++e) {
      const double a = e * h, b = (e + 1) * h;
      if (b <= ri) {
        add_piece(i, e, a, b);
        continue;
      }
      double p = a;
      if (a < ri) {
        add_piece(i, e, a, ri);
        p = ri;
      }
      // r>^-(L+1) is steep just above r_i; split geometrically
      while (p < b) {
        const double q = std::min(b, 1.5 * p);
        add_piece(i, e, p, q);
        p = q;
      }
    }
  }
  kernel_.assign(n_l, Eigen::MatrixXd(n_, n_));
  for (int L = 0; L < n_l; ++L)
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) kernel_[L](i, j) = 0.5 * (c[L](i, j) / W[j] + c[L](j, i) / W[i]);

  // scaled angular integrals B_L[k][k'] = int phi_k phi_k' P_L du / sqrt(w_k w_k')
  const auto& u = grid_->angular.nodes;
  const auto fine = core::gauss_legendre(int(2 * nu_));
  std::vector<Eigen::MatrixXd> B(n_l, Eigen::MatrixXd::Zero(nu_, nu_));
  for (std::size_t q = 0; q < fine.nodes.size(); ++q) {
    const auto phi = core::lagrange_basis(u, fine.nodes[q]);
    for (int L = 0; L < n_l; ++L) {
      const double pl = fine.weights[q] * core::legendre(L, fine.nodes[q]).p;
      for (std::size_t k = 0; k < nu_; ++k)
        for (std::size_t kk = 0; kk < nu_; ++kk) B[L](k, kk) += pl * phi[k] * phi[kk];
    }
  }
  for (int L = 0; L < n_l; ++L)
    for (std::size_t k = 0; k < nu_; ++k)
      for (std::size_t kk = 0; kk < nu_; ++kk) B[L](k, kk) /= scale_u_[k] * scale_u_[kk];

  const std::size_t n_pairs = n_ * (n_ + 1) / 2;
  pair_rep_.assign(n_pairs * nu_ * nu_, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      MapM R(pair_rep_.data() + pair(i, j) * nu_ * nu_, nu_, nu_);
      for (int L = 0; L < n_l; ++L) R += kernel_[L](i, j) * B[L];
    }
  }
}

Eigen::VectorXd TwoBodyOperator::to_vector(const BipolaronState& state) const {
  if (state.grid().get() != grid_.get() && !state.grid()->radial->same_as(*grid_->radial))
    throw GridMismatch("two-body operator: state on a different grid");
  const double c = std::sqrt(8.0) * kPi;
  Eigen::VectorXd x(dim());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < nu_; ++k)
        x[(i * n_ + j) * nu_ + k] = c * scale_r_[i] * scale_r_[j] * scale_u_[k] * state.at(i, j, k);
  return x;
}

BipolaronState TwoBodyOperator::to_state(const Eigen::VectorXd& x) const {
  BipolaronState s(grid_);
  const double c = std::sqrt(8.0) * kPi;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j)
      for (std::size_t k = 0; k < nu_; ++k) {
        const double v = 0.5 * (x[(i * n_ + j) * nu_ + k] + x[(j * n_ + i) * nu_ + k]);
        s.ref(i, j, k) = v / (c * scale_r_[i] * scale_r_[j] * scale_u_[k]);
      }
  return s;
}

void TwoBodyOperator::apply(const Eigen::VectorXd& x, std::span<const double> potential, double u,
                            Eigen::VectorXd& y) const {
  y.resize(dim());
  const std::size_t blk = n_ * nu_;
#pragma omp parallel
  {
    Eigen::MatrixXd z(nu_, n_);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < n_; ++i) {
      CMapM xi(x.data() + i * blk, nu_, n_);
      MapM yi(y.data() + i * blk, nu_, n_);
      // second particle, then first
      yi.noalias() = xi * S_;
      Eigen::Map<Eigen::VectorXd> yv(y.data() + i * blk, blk);
      for (std::size_t m = 0; m < n_; ++m) {
        const double s = S_(i, m);
        if (s != 0.0) yv.noalias() += s * Eigen::Map<const Eigen::VectorXd>(x.data() + m * blk, blk);
      }
      z.noalias() = angular_ * xi;
      for (std::size_t j = 0; j < n_; ++j) {
        yi.col(j) += (inv_r2_[i] + inv_r2_[j]) * z.col(j) + (potential[i] + potential[j]) * xi.col(j);
        if (u != 0.0) {
          CMapM R(pair_rep_.data() + pair(i, j) * nu_ * nu_, nu_, nu_);
          yi.col(j).noalias() += u * (R * xi.col(j));
        }
      }
    }
  }
}

void TwoBodyOperator::apply_reference(const Eigen::VectorXd& x, std::span<const double> potential, double u,
                                      Eigen::VectorXd& y) const {
  y.setZero(dim());
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * n_ + j) * nu_ + k; };
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      const double* R = pair_rep_.data() + pair(i, j) * nu_ * nu_;
      for (std::size_t k = 0; k < nu_; ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m < n_; ++m) s += S_(i, m) * x[at(m, j, k)] + S_(j, m) * x[at(i, m, k)];
        double ang = 0.0, rep = 0.0;
        for (std::size_t kk = 0; kk < nu_; ++kk) {
          ang += angular_(k, kk) * x[at(i, j, kk)];
          rep += R[kk * nu_ + k] * x[at(i, j, kk)];
        }
        y[at(i, j, k)] = s + (inv_r2_[i] + inv_r2_[j]) * ang + (potential[i] + potential[j]) * x[at(i, j, k)] +
                         u * rep;
      }
    }
}

double TwoBodyOperator::kinetic_form(const Eigen::VectorXd& x) const {
  const std::vector<double> zero(n_ + 1, 0.0);
  Eigen::VectorXd y;
  apply(x, zero, 0.0, y);
  return x.dot(y);
}

double TwoBodyOperator::repulsion_form(const Eigen::VectorXd& x) const {
  double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      CMapM R(pair_rep_.data() + pair(i, j) * nu_ * nu_, nu_, nu_);
      Eigen::Map<const Eigen::VectorXd> v(x.data() + (i * n_ + j) * nu_, nu_);
      total += v.dot(R * v);
    }
  }
  return total;
}

std::vector<double> TwoBodyOperator::density(const Eigen::VectorXd& x) const {
  const auto w = grid_->radial->weights();
  std::vector<double> rho(n_ + 1, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < nu_; ++k) {
        const double a = x[(i * n_ + j) * nu_ + k], b = x[(j * n_ + i) * nu_ + k];
        s += a * a + b * b;
      }
    rho[i] = s / (4.0 * kPi * w[i]);
  }
  return rho;
}

void TwoBodyOperator::precondition(const Eigen::VectorXd& r, double sigma, Eigen::VectorXd& out) const {
  const std::size_t nn = n_ * n_;
  Eigen::MatrixXd C = legendre_ * CMapM(r.data(), nu_, nn);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t l = 0; l < nu_; ++l) {
    Eigen::MatrixXd M(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) M(i, j) = C(l, i * n_ + j);
    Eigen::MatrixXd Z = basis_[l].transpose() * M * basis_[l];
    for (std::size_t b = 0; b < n_; ++b)
      for (std::size_t a = 0; a < n_; ++a) Z(a, b) /= eig_[l][a] + eig_[l][b] + sigma;
    M.noalias() = basis_[l] * Z * basis_[l].transpose();
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) C(l, i * n_ + j) = M(i, j);
  }
  out.resize(dim());
  MapM(out.data(), nu_, nn).noalias() = legendre_.transpose() * C;
}

}  // namespace polaron::pt
