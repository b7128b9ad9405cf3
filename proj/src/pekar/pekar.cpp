#include "polaron/pekar/pekar.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <numbers>

#include "polaron/core/coulomb.hpp"
#include "polaron/error.hpp"

namespace polaron::pekar {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void require_normalized(const core::RadialField& psi) {
  if (psi.kind != core::FieldKind::wavefunction) throw InvalidArgument("pekar: expected a wavefunction");
  if (std::abs(psi.norm() - 1.0) > 1e-6) throw InvalidArgument("pekar: wavefunction is not normalized");
}

// Discrete problem in the scaled variable v_i = sqrt(4 pi W_i) r_i psi_i over
// the free nodes (all but r_max). In v the norm is Euclidean and the kinetic
// form is v^T S v with S = W^-1/2 K W^-1/2.
class Problem {
 public:
  Problem(std::shared_ptr<const core::RadialGrid> grid, double beta)
      : grid_(std::move(grid)), beta_(beta), n_(grid_->size()), free_(n_ - 1) {
    const auto W = grid_->line_weights();
    const auto r = grid_->nodes();
    scale_.resize(free_);
    for (std::size_t i = 0; i < free_; ++i) scale_[i] = std::sqrt(kFourPi * W[i]);
    Eigen::SparseMatrix<double> K = grid_->kinetic_matrix();
    Eigen::VectorXd inv(free_);
    for (std::size_t i = 0; i < free_; ++i) inv[i] = 1.0 / std::sqrt(W[i]);
    S_ = inv.asDiagonal() * K.topLeftCorner(free_, free_) * inv.asDiagonal();
    S_.makeCompressed();
    r_.assign(r.begin(), r.begin() + free_);
  }

  std::size_t free_size() const { return free_; }

  Eigen::VectorXd to_v(const core::RadialField& psi) const {
    Eigen::VectorXd v(free_);
    for (std::size_t i = 0; i < free_; ++i) v[i] = scale_[i] * r_[i] * psi.values[i];
    return v;
  }

  core::RadialField to_psi(const Eigen::VectorXd& v) const {
    std::vector<double> psi(n_, 0.0);
    for (std::size_t i = 0; i < free_; ++i) psi[i] = v[i] / (scale_[i] * r_[i]);
    return core::RadialField::wavefunction(grid_, std::move(psi));
  }

  std::vector<double> potential(const Eigen::VectorXd& v) const {
    std::vector<double> rho(n_, 0.0);
    for (std::size_t i = 0; i < free_; ++i) {
      const double psi = v[i] / (scale_[i] * r_[i]);
      rho[i] = psi * psi;
    }
    return core::variational_potential(*grid_, rho);
  }

  struct Eval {
    EnergyParts parts;
    std::vector<double> potential;
  };

  Eval evaluate(const Eigen::VectorXd& v) const {
    Eval e;
    e.potential = potential(v);
    const double kinetic = v.dot(S_ * v);
    double attraction = 0.0;
    for (std::size_t i = 0; i < free_; ++i) attraction += v[i] * v[i] * e.potential[i];
    e.parts = {kinetic - beta_ * attraction, kinetic, attraction};
    return e;
  }

  // H v with H = S - 2 beta V
  Eigen::VectorXd apply(const Eigen::VectorXd& v, const std::vector<double>& pot) const {
    Eigen::VectorXd h = S_ * v;
    for (std::size_t i = 0; i < free_; ++i) h[i] -= 2.0 * beta_ * pot[i] * v[i];
    return h;
  }

  const Eigen::SparseMatrix<double>& kinetic() const { return S_; }

 private:
  std::shared_ptr<const core::RadialGrid> grid_;
  double beta_;
  std::size_t n_;
  std::size_t free_;
  std::vector<double> scale_;
  std::vector<double> r_;
  Eigen::SparseMatrix<double> S_;
};

}  // namespace

EnergyParts pekar_energy(const core::RadialField& psi, double beta) {
  require_normalized(psi);
  const auto& grid = *psi.grid;
  const auto r = grid.nodes();
  const auto W = grid.line_weights();
  Eigen::VectorXd u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) u[i] = r[i] * psi.values[i];
  const Eigen::SparseMatrix<double> K = grid.kinetic_matrix();
  (void)W;
  const double kinetic = kFourPi * u.dot(K * u);
  const auto rho = core::density_of(psi);
  const double attraction = core::coulomb_double_integral(rho, rho);
  return {kinetic - beta * attraction, kinetic, attraction};
}

std::vector<double> pekar_gradient(const core::RadialField& psi, double beta) {
  const auto& grid = *psi.grid;
  const auto r = grid.nodes();
  const auto w = grid.weights();
  Eigen::VectorXd u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) u[i] = r[i] * psi.values[i];
  const Eigen::VectorXd Ku = grid.kinetic_matrix() * u;
  std::vector<double> rho(grid.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = psi.values[i] * psi.values[i];
  const auto V = core::variational_potential(grid, rho);
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = 2.0 * kFourPi * r[i] * Ku[i] - 4.0 * kFourPi * beta * w[i] * psi.values[i] * V[i];
  return g;
}

PekarResult solve_pekar(double beta, std::shared_ptr<const core::RadialGrid> grid, const PekarOptions& opts) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("solve_pekar: beta must be positive");
  const Problem prob(grid, beta);

  core::RadialField start = opts.initial.value_or(
      core::RadialField::sample(grid, [beta](double r) { return std::exp(-beta * r); },
                                core::FieldKind::wavefunction));
  if (!start.grid->same_as(*grid)) throw GridMismatch("solve_pekar: initial guess on a different grid");
  Eigen::VectorXd v = prob.to_v(start);
  if (!(v.norm() > 0.0)) throw DegenerateInput("solve_pekar: initial guess vanishes");
  v /= v.norm();

  PekarResult res;
  res.beta = beta;
  auto eval = prob.evaluate(v);
  double shift = -1.0;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> precond;
  const std::size_t m = prob.free_size();
  Eigen::SparseMatrix<double> identity(static_cast<long>(m), static_cast<long>(m));
  identity.setIdentity();

  double step = 1.0;
  Eigen::VectorXd prev_step;
  double residual = 0.0;
  double mu = 0.0;
  long it = 0;
  for (;; ++it) {
    const Eigen::VectorXd hv = prob.apply(v, eval.potential);
    mu = v.dot(hv);
    const Eigen::VectorXd r = hv - mu * v;
    residual = r.norm();
    if (opts.record_trace) res.energy_trace.push_back(eval.parts.energy);
    if (residual <= opts.tol) break;
    if (it >= opts.max_iterations)
      throw NoConvergence("solve_pekar: iteration cap reached", residual, it);

    // refactor the kinetic preconditioner when the level shift drifts
    const double want = std::max(-mu, 1e-3 * eval.parts.kinetic);
    if (shift < 0.0 || std::abs(want - shift) > 0.1 * shift) {
      shift = want;
      precond.compute(prob.kinetic() + shift * identity);
    }
    Eigen::VectorXd d = precond.solve(r);
    d -= v.dot(d) * v;
    const double slope = -2.0 * r.dot(d);  // dE/dtau at tau = 0, negative
    bool accepted = false;
    if (residual > 1e-5 * std::max(1.0, std::abs(mu))) {
      // backtracking on the energy along the normalized retraction
      for (int bt = 0; bt < 60; ++bt) {
        Eigen::VectorXd trial = v - step * d;
        trial /= trial.norm();
        auto te = prob.evaluate(trial);
        const double drop = eval.parts.energy - te.parts.energy;
        if (drop < 1e-13 * std::abs(eval.parts.energy)) {
          // below rounding, leave it to the residual-ranked phase
          if (drop >= 0.0) break;
        } else if (te.parts.energy <= eval.parts.energy + 1e-4 * step * slope) {
          prev_step = trial - v;
          v = std::move(trial);
          eval = std::move(te);
          accepted = true;
          step = std::min(4.0, step * 1.5);
          break;
        }
        step *= 0.5;
      }
    }
    if (!accepted) {
      // Energy differences are now at rounding level, so steps are ranked by
      // the residual. Candidates: the lowest Ritz vector of the frozen-potential
      // operator on span{v, d, previous step}, and plain steps along d. Only
      // candidates within the rounding slack of the current energy qualify.
      const double slack = 1e-12 * std::max(1.0, std::abs(eval.parts.energy));
      double best_res = residual;
      const Eigen::VectorXd v0 = v;
      const double e0 = eval.parts.energy;
      auto consider = [&](Eigen::VectorXd trial) {
        if (trial.dot(v0) < 0.0) trial = -trial;
        trial /= trial.norm();
        auto te = prob.evaluate(trial);
        if (te.parts.energy > e0 + slack) return;
        const Eigen::VectorXd th = prob.apply(trial, te.potential);
        const double tres = (th - trial.dot(th) * trial).norm();
        if (tres < best_res) {
          best_res = tres;
          prev_step = trial - v0;
          v = std::move(trial);
          eval = std::move(te);
          accepted = true;
        }
      };
      const auto pot0 = eval.potential;
      Eigen::MatrixXd basis(static_cast<long>(m), prev_step.size() == v.size() ? 3 : 2);
      basis.col(0) = v0;
      basis.col(1) = d;
      if (basis.cols() == 3) basis.col(2) = prev_step;
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
      const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(basis.rows(), basis.cols());
      Eigen::MatrixXd HQ(Q.rows(), Q.cols());
      for (long c = 0; c < Q.cols(); ++c) HQ.col(c) = prob.apply(Q.col(c), pot0);
      const Eigen::MatrixXd small = Q.transpose() * HQ;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (small + small.transpose()));
      const Eigen::VectorXd ritz = Q * es.eigenvectors().col(0);
      consider(ritz);
      for (double tau : {2.0, 1.0, 0.5}) consider(v0 - tau * d);
      for (double tau = 0.25; !accepted && tau > 1e-3; tau *= 0.5) consider(v0 - tau * d);
    }
    if (!accepted) throw NoConvergence("solve_pekar: line search failed", residual, it);
  }

  // fix the trivial phase: positive at the origin
  if (v[0] < 0.0) v = -v;
  res.psi = prob.to_psi(v);
  res.energy = eval.parts.energy;
  res.kinetic = eval.parts.kinetic;
  res.attraction = eval.parts.attraction;
  res.chemical_potential = mu;
  res.residual = residual;
  res.iterations = it;
  return res;
}

std::shared_ptr<const core::RadialGrid> default_pekar_grid() { return core::make_grid(40.0, 2000); }

double pekar_constant(std::shared_ptr<const core::RadialGrid> grid, const PekarOptions& opts) {
  return -solve_pekar(1.0, std::move(grid), opts).energy;
}

PekarResult solve_pekar_scaled(double beta, const PekarOptions& opts) {
  if (!(beta > 0.0)) throw InvalidArgument("solve_pekar: beta must be positive");
  auto grid = std::make_shared<const core::RadialGrid>(default_pekar_grid()->scaled(beta));
  return solve_pekar(beta, grid, opts);
}

double gaussian_trial_energy(double beta) { return -beta * beta / (3.0 * std::numbers::pi); }

}  // namespace polaron::pekar
