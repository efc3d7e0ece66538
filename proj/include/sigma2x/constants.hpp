#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sigma2x::constants {

// Mathematical constants stored as decimal strings (60+ digits) and parsed
// once at startup.  Working precision everywhere is 64-bit double; the
// closed-form combinations below are evaluated internally in double-double
// (compensated) arithmetic so the final rounding is the only loss.
enum class Name { PI, LN2, ZETA3, CATALAN };

struct NamedConstant {
  std::string name;            // "PI", "LN2", "ZETA3", "CATALAN"
  std::string decimal_source;  // >= 40 significant digits
  double value;                // correctly rounded double
  std::string reference_note;  // where the tabulated value enters the chain
};

double get(Name which);
double get(const std::string& name);  // throws std::out_of_range on unknown name
const std::vector<NamedConstant>& all_constants();

// Fixed arithmetic combinations of the named constants.  Those anchored to a
// printed decimal string carry it verbatim in paper_digits.
enum class FormId { E2X_EQ2, X_EQ22, X1_EQ24, X2_EQ25, SIGMA_EQ26, SUM_EQ7 };

struct ClosedForm {
  std::string id;
  std::string expression;  // human-readable definition
  std::optional<std::string> paper_digits;
  double value;
};

double eval_closed_form(FormId which);
const ClosedForm& closed_form(FormId which);
const ClosedForm& closed_form(const std::string& id);  // throws std::out_of_range
const std::vector<ClosedForm>& all_closed_forms();

// The three printed relations that do not hold as displayed.  Each row
// records the probe factor that reconciles the printed form with the
// anchored closed forms, plus the residual deviation after that factor.
struct AuditRow {
  std::string relation;  // stable id
  std::string detail;    // what was compared
  double computed;       // value of the printed/derived combination
  double expected;       // anchored reference value
  double best_factor;
  std::string best_factor_label;
  double deviation_after;  // relative, after applying best_factor
};

std::vector<AuditRow> consistency_audit();

}  // namespace sigma2x::constants
