#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace uat {

enum class CertificateMode { Certified, Measured };

std::string_view to_string(CertificateMode mode);

struct CertificateStage {
  std::string name;
  double budget = 0.0;
  /// Proven bound (certified mode) or measured value (measured mode).
  double achieved = 0.0;
};

/// Per-stage L1 error budget of a construction. In certified mode every
/// achieved value is a proven upper bound and
///   sum(achieved) <= sum(budget) <= requested_eps.
struct ApproxCertificate {
  double requested_eps = 0.0;
  std::vector<CertificateStage> stages;
  CertificateMode mode = CertificateMode::Certified;
  /// Named auxiliary values (measured errors, alternative bounds, sizes).
  std::vector<std::pair<std::string, double>> details;

  double total_budget() const;
  double total_achieved() const;
  /// Budget/eps invariants hold for this certificate.
  bool consistent() const;
};

}  // namespace uat
