#include "gfbs/report.hpp"

#include <cmath>
#include <ostream>

#include "gfbs/matrix_io.hpp"

namespace gfbs {

bool CertificateReport::passed() const {
  for (const auto& c : checks)
    if (!c.informational && !c.passed) return false;
  return true;
}

const Check* CertificateReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

void CertificateReport::merge(const CertificateReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

void SlackTracker::observe(double lhs, double rhs, long location) { observe_slack(rhs - lhs, location); }

void SlackTracker::observe_slack(double slack, long location) {
  if (std::isnan(slack)) {
    if (!saw_nan_) location_ = location;
    saw_nan_ = true;
    return;
  }
  if (!saw_nan_ && slack < worst_) {
    worst_ = slack;
    location_ = location;
  }
}

Check SlackTracker::result() const {
  Check c;
  c.name = name_;
  c.worst_slack = saw_nan_ ? std::nan("") : worst_;
  c.location = location_;
  c.passed = !saw_nan_ && worst_ >= -tol_;
  return c;
}

Check info_check(const std::string& name, double value) {
  Check c;
  c.name = name;
  c.informational = true;
  c.value = value;
  c.worst_slack = 0.0;
  return c;
}

Check flag_check(const std::string& name, bool ok, double slack) {
  Check c;
  c.name = name;
  c.passed = ok;
  c.worst_slack = slack;
  return c;
}

void write_report(std::ostream& out, const CertificateReport& report) {
  for (const auto& c : report.checks) {
    out << c.name << ' ' << (c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL")) << ' '
        << format_real(c.worst_slack) << ' ' << c.location;
    if (c.value) out << ' ' << format_real(*c.value);
    out << '\n';
  }
  for (const auto& n : report.notes) out << "# " << n << '\n';
}

}  // namespace gfbs
