#include "uat/certificate.hpp"

namespace uat {

std::string_view to_string(CertificateMode mode) {
  return mode == CertificateMode::Certified ? "certified" : "measured";
}

double ApproxCertificate::total_budget() const {
  double total = 0.0;
  for (const auto& s : stages) total += s.budget;
  return total;
}

double ApproxCertificate::total_achieved() const {
  double total = 0.0;
  for (const auto& s : stages) total += s.achieved;
  return total;
}

bool ApproxCertificate::consistent() const {
  if (mode != CertificateMode::Certified) return true;
  for (const auto& s : stages) {
    if (!(s.achieved <= s.budget)) return false;
  }
  return total_achieved() <= total_budget() && total_budget() <= requested_eps;
}

}  // namespace uat
