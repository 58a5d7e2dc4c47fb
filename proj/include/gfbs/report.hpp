#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gfbs {

// One verified inequality (or reported constant). worst_slack is rhs - lhs at the
// tightest point, so a check passes when worst_slack >= -tolerance. Informational
// entries carry a value but never gate the overall verdict.
struct Check {
  std::string name;
  bool passed = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  long location = -1;  // iteration index or sample id; -1 when not applicable
  bool informational = false;
  std::optional<double> value;
};

struct CertificateReport {
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool passed() const;
  const Check* find(const std::string& name) const;
  void add(Check c) { checks.push_back(std::move(c)); }
  void merge(const CertificateReport& other);
};

using CheckReport = CertificateReport;

// Accumulates the worst slack of an inequality family "lhs <= rhs".
class SlackTracker {
 public:
  SlackTracker(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}
  void observe(double lhs, double rhs, long location);
  void observe_slack(double slack, long location);
  Check result() const;

 private:
  std::string name_;
  double tol_;
  double worst_ = std::numeric_limits<double>::infinity();
  long location_ = -1;
  bool saw_nan_ = false;
};

Check info_check(const std::string& name, double value);
Check flag_check(const std::string& name, bool ok, double slack);

// One check per line: name PASS|FAIL|INFO worst_slack location [value].
void write_report(std::ostream& out, const CertificateReport& report);

}  // namespace gfbs
