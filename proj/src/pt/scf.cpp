#include "polaron/pt/scf.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "polaron/core/coulomb.hpp"
#include "polaron/error.hpp"
#include "polaron/pekar/pekar.hpp"

namespace polaron::pt {

namespace {

void check_params(const core::CouplingParams& p) {
  if (p.n_particles != 2) throw InvalidArgument("pt: n_particles must be 2");
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) throw ValidationError("alpha", "must be nonnegative");
  if (!(p.repulsion_u >= 0.0) || !std::isfinite(p.repulsion_u)) throw ValidationError("u", "must be nonnegative");
}

void require_normalized(const BipolaronState& s) {
  if (std::abs(s.norm() - 1.0) > 1e-6) throw InvalidArgument("pt: state is not normalized");
}

double self_coulomb(const core::RadialGrid& g, const std::vector<double>& rho) {
  return core::radial_inner(g, rho, core::variational_potential(g, rho));
}

}  // namespace

PtEnergy pt_energy(const TwoBodyOperator& op, const Eigen::VectorXd& x, const core::CouplingParams& params) {
  check_params(params);
  const auto rho = op.density(x);
  const double kinetic = op.kinetic_form(x);
  const double rep = op.repulsion_form(x);
  const double att = self_coulomb(*op.grid()->radial, rho);
  return {kinetic + params.repulsion_u * rep - params.alpha * att, kinetic, rep, att};
}

PtEnergy pt_energy(const BipolaronState& state, const core::CouplingParams& params) {
  check_params(params);
  require_normalized(state);
  const TwoBodyOperator op(state.grid());
  return pt_energy(op, op.to_vector(state), params);
}

double expectation_inv_r12(const BipolaronState& state) {
  require_normalized(state);
  const TwoBodyOperator op(state.grid());
  return op.repulsion_form(op.to_vector(state));
}

InnerStats lowest_eigenpair(const TwoBodyOperator& op, std::span<const double> potential, double u,
                            Eigen::VectorXd& x, double tol, long max_iterations) {
  const double nx = x.norm();
  if (!(nx > 0.0) || !std::isfinite(nx)) throw DegenerateInput("inner solve: start vector vanishes");
  x /= nx;
  Eigen::VectorXd Ax, w, Aw, p, Ap, r;
  op.apply(x, potential, u, Ax);
  double theta = x.dot(Ax);
  double residual = 0.0;
  long it = 0;
  for (;; ++it) {
    r = Ax - theta * x;
    residual = r.norm();
    if (residual <= tol) break;
    if (it >= max_iterations) throw NoConvergence("inner solve: iteration cap reached", residual, it);
    if (it > 0 && it % 25 == 0) {
      // refresh against drift of the recurrences
      x /= x.norm();
      op.apply(x, potential, u, Ax);
      theta = x.dot(Ax);
      r = Ax - theta * x;
      residual = r.norm();
      if (residual <= tol) break;
    }
    op.precondition(r, std::max(-theta, 0.0), w);
    for (int pass = 0; pass < 2; ++pass) {
      w -= x.dot(w) * x;
      if (p.size()) w -= p.dot(w) * p;
    }
    const double nw = w.norm();
    if (!(nw > 0.0)) throw NoConvergence("inner solve: preconditioned residual vanished", residual, it);
    w /= nw;
    op.apply(w, potential, u, Aw);

    bool use_p = false;
    if (p.size()) {
      // p is kept orthonormal to x_old; re-orthogonalize against x and w
      Eigen::VectorXd q = p;
      Eigen::VectorXd Aq = Ap;
      for (int pass = 0; pass < 2; ++pass) {
        const double a = x.dot(q), b = w.dot(q);
        q -= a * x + b * w;
        Aq -= a * Ax + b * Aw;
      }
      const double nq = q.norm();
      if (nq > 1e-8) {
        p = q / nq;
        Ap = Aq / nq;
        use_p = true;
      }
    }
    const int m = use_p ? 3 : 2;
    const Eigen::VectorXd* V[3] = {&x, &w, &p};
    const Eigen::VectorXd* AV[3] = {&Ax, &Aw, &Ap};
    Eigen::MatrixXd G(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) G(a, b) = V[a]->dot(*AV[b]);
    G = 0.5 * (G + G.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::VectorXd c = es.eigenvectors().col(0);
    if (c[0] < 0.0) c = -c;
    Eigen::VectorXd pn = c[1] * w;
    Eigen::VectorXd Apn = c[1] * Aw;
    if (use_p) {
      pn += c[2] * p;
      Apn += c[2] * Ap;
    }
    x = c[0] * x + pn;
    Ax = c[0] * Ax + Apn;
    const double npn = pn.norm();
    if (npn > 0.0) {
      p = pn / npn;
      Ap = Apn / npn;
    }
    const double n2 = x.norm();
    x /= n2;
    Ax /= n2;
    theta = x.dot(Ax);
  }
  return {theta, residual, it};
}

InnerResult inner_ground_state(const core::RadialField& potential, double u_repulsion,
                               std::shared_ptr<const InternalGrid> grid, const InnerOptions& opts) {
  if (!potential.grid->same_as(*grid->radial)) throw GridMismatch("inner_ground_state: potential on a different grid");
  for (double v : potential.values)
    if (!std::isfinite(v)) throw InvalidArgument("inner_ground_state: potential is not finite");
  if (!(u_repulsion >= 0.0)) throw ValidationError("u", "must be nonnegative");
  const TwoBodyOperator op(grid);
  Eigen::VectorXd x;
  if (opts.initial) {
    x = op.to_vector(*opts.initial);
  } else {
    const double k = std::numbers::pi / grid->radial->r_max();
    x = op.to_vector(BipolaronState::sample(grid, [k](double a, double b, double) { return std::exp(-k * (a + b)); }));
  }
  const auto st = lowest_eigenpair(op, potential.values, u_repulsion, x, opts.tol, opts.max_iterations);
  InnerResult res{normalize(op.to_state(x)), st.eigenvalue, st.residual, st.iterations};
  return res;
}

BipolaronResult scf_minimize(const core::CouplingParams& params, std::shared_ptr<const InternalGrid> grid,
                             const ScfOptions& opts) {
  const TwoBodyOperator op(std::move(grid));
  return scf_minimize(params, op, opts);
}

BipolaronResult scf_minimize(const core::CouplingParams& params, const TwoBodyOperator& op, const ScfOptions& opts) {
  check_params(params);
  if (!(params.alpha > 0.0)) throw ValidationError("alpha", "must be positive");
  if (!(opts.mixing > 0.0 && opts.mixing <= 1.0)) throw ValidationError("mixing", "must lie in (0, 1]");
  const auto grid = op.grid();
  const auto& radial = *grid->radial;
  const double alpha = params.alpha, u = params.repulsion_u;

  Eigen::VectorXd x;
  if (opts.initial) {
    x = op.to_vector(*opts.initial);
  } else {
    x = op.to_vector(
        BipolaronState::sample(grid, [alpha](double a, double b, double) { return std::exp(-alpha * (a + b)); }));
  }
  x /= x.norm();
  std::vector<double> rho_in = op.density(x);
  std::vector<double> pot(rho_in.size());

  BipolaronResult res;
  res.params = params;
  const std::size_t n = rho_in.size();
  using Vec = Eigen::VectorXd;
  double mix = opts.mixing;
  double residual = std::numeric_limits<double>::infinity();
  // last accepted iterate; a rejected step restarts from it with halved mixing
  struct Accepted {
    double energy = std::numeric_limits<double>::infinity();
    Vec rho_in, rho_out, x;
    double residual = 0.0;
  } best;
  long rejected = 0, streak = 0;
  bool accelerate = opts.history > 0;
  int failures = 0;
  long plain = 0;
  std::vector<Vec> hist_in, hist_f;
  const double inner_scale = alpha * alpha;
  PtEnergy parts{};
  long it = 0;
  for (;;) {
    ++it;
    const auto v = core::variational_potential(radial, rho_in);
    for (std::size_t i = 0; i < n; ++i) pot[i] = -2.0 * alpha * v[i];
    const double inner_tol =
        inner_scale * std::max(1e-12, std::min(opts.inner_tol, std::isfinite(residual) ? 1e-2 * residual : 1.0));
    const auto st = lowest_eigenpair(op, pot, u, x, inner_tol, 5000);
    res.inner_iterations += st.iterations;

    const auto rho_out = op.density(x);
    const auto trial = pt_energy(op, x, params);
    double diff = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff = std::max(diff, std::abs(rho_out[i] - rho_in[i]));
      peak = std::max(peak, std::abs(rho_out[i]));
    }
    residual = diff / peak;

    const Vec rin = Eigen::Map<const Vec>(rho_in.data(), long(n));
    const Vec rout = Eigen::Map<const Vec>(rho_out.data(), long(n));
    const double slack = 1e-10 * std::max(1.0, std::abs(trial.energy));
    Vec next;
    if (trial.energy <= best.energy + slack) {
      parts = trial;
      best = {trial.energy, rin, rout, x, residual};
      res.energy_trace.push_back(trial.energy);
      rejected = 0;
      if (residual <= opts.tol) break;
      if (!accelerate && opts.history > 0 && failures < 2 && ++plain >= 5) accelerate = true;
      if (++streak >= 5 && mix < opts.mixing) {
        mix = std::min(opts.mixing, 2.0 * mix);
        streak = 0;
      }
      // linear mixing step, extrapolated over the recent history (Anderson)
      const Vec f = rout - rin;
      next = rin + mix * f;
      if (accelerate && !hist_f.empty()) {
        const long m = long(hist_f.size());
        Eigen::MatrixXd dF(n, m), dR(n, m);
        for (long c = 0; c < m; ++c) {
          dF.col(c) = f - hist_f[c];
          dR.col(c) = rin - hist_in[c];
        }
        const Vec gamma = dF.colPivHouseholderQr().solve(f);
        if (gamma.allFinite()) next -= (dR + mix * dF) * gamma;
      }
      hist_in.push_back(rin);
      hist_f.push_back(f);
      if (long(hist_f.size()) > opts.history) {
        hist_in.erase(hist_in.begin());
        hist_f.erase(hist_f.begin());
      }
    } else {
      if (++rejected > 30)
        throw NoConvergence("scf: energy keeps rising (oscillation detected; try a smaller mixing)", best.residual, it);
      mix = std::max(0.5 * mix, 1e-4);
      streak = 0;
      // extrapolation led uphill: plain mixing for a while, for good after two failures
      if (accelerate) ++failures;
      accelerate = false;
      plain = 0;
      hist_in.clear();
      hist_f.clear();
      next = best.rho_in + mix * (best.rho_out - best.rho_in);
      x = best.x;
    }
    if (it >= opts.max_iterations)
      throw NoConvergence("scf: iteration cap reached (oscillation suspected; try a smaller mixing)", best.residual, it);
    for (std::size_t i = 0; i < n; ++i) rho_in[i] = std::max(0.0, next[i]);
  }
  residual = best.residual;
  x = best.x;
  res.accelerated = accelerate;

  res.energy = parts.energy;
  res.kinetic = parts.kinetic;
  res.repulsion_expect = parts.repulsion_expect;
  res.attraction = parts.attraction;
  res.state = normalize(op.to_state(x));
  res.density = core::RadialField::density(grid->radial, op.density(x), 2.0);
  res.scf_iterations = it;
  res.scf_residual = residual;
  res.final_mixing = mix;

  if (opts.self_test && u == 0.0) {
    const auto pk = pekar::solve_pekar(2.0 * alpha, grid->radial);
    res.self_test_deviation = std::abs(res.energy - 2.0 * pk.energy) / std::abs(res.energy);
  }
  return res;
}

PtEnergy product_energy(const core::RadialField& phi, const core::CouplingParams& params,
                        std::shared_ptr<const InternalGrid> grid) {
  const auto state = normalize(BipolaronState::product(std::move(grid), phi));
  return pt_energy(state, params);
}

}  // namespace polaron::pt
