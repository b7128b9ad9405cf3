#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polaron/binding/binding.hpp"

namespace polaron::binding {

struct VerifyCheck {
  std::string id;  // a, b, c, d or monotone
  std::string subject;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
  std::vector<const VerifyCheck*> failures() const;
};

struct PtSingle {
  double alpha = 0.0;
  double energy = 0.0;
};

struct VerifyInputs {
  std::vector<pimc::PimcEstimate> pimc;  // single-polaron estimates
  std::vector<PtSingle> pt;              // single-polaron PT energies
  std::vector<BindingReport> rows;
  std::optional<double> nu_c;
  double pekar_constant = 0.109;
};

/// (a) PIMC brackets, (b) Pekar value and PIMC below PT, (c) e2 <= 2 e1 on
/// every row, (d) unbound beyond 1.1 nu_c, plus delta_e monotone in U.
VerificationReport verify_bounds(const VerifyInputs& in);

struct SuiteOptions {
  pimc::SamplerOptions mc;
  std::vector<double> pimc_alphas{0.25, 1.0};
  double alpha = 1.0;
  /// U / alpha values of the PT scan; 1.1 nu_c and 1.5 nu_c are appended.
  std::vector<double> scan_ratios{0.0, 0.5, 1.0, 1.5, 2.0};
  double nu_tol = 0.01;
  /// Adds 0.1 to e2 of the last (unbound) scan row before checking.
  bool inject_fault = false;
};

SuiteOptions default_suite();
VerifyInputs run_suite(const SuiteOptions& opts);

}  // namespace polaron::binding
