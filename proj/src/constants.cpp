#include "sigma2x/constants.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "sigma2x/probe.hpp"

namespace sigma2x::constants {
namespace {

// Minimal double-double arithmetic (hi + lo, |lo| <= ulp(hi)/2).  Only what
// the closed forms need: add, sub, mul, div, small integer scaling.  Gives
// ~31 significant digits, so every result below is correct to well under one
// ulp of double after the final rounding.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

DD quick_two_sum(double a, double b) {  // requires |a| >= |b|
  double s = a + b;
  return {s, b - (s - a)};
}

DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

DD add(DD x, DD y) {
  DD s = two_sum(x.hi, y.hi);
  double e = s.lo + x.lo + y.lo;
  return quick_two_sum(s.hi, e);
}

DD sub(DD x, DD y) { return add(x, DD{-y.hi, -y.lo}); }

DD mul(DD x, DD y) {
  DD p = two_prod(x.hi, y.hi);
  double e = p.lo + x.hi * y.lo + x.lo * y.hi;
  return quick_two_sum(p.hi, e);
}

DD div(DD x, DD y) {
  double q1 = x.hi / y.hi;
  DD r = sub(x, mul(DD{q1, 0.0}, y));
  double q2 = r.hi / y.hi;
  r = sub(r, mul(DD{q2, 0.0}, y));
  double q3 = r.hi / y.hi;
  DD q = quick_two_sum(q1, q2);
  return add(q, DD{q3, 0.0});
}

DD from_int(long n) { return {static_cast<double>(n), 0.0}; }

// Parse a plain decimal string ("-30.705985...", no exponent) into a DD.
DD parse_decimal(const std::string& s) {
  DD acc{0.0, 0.0};
  bool neg = false;
  long frac_digits = 0;
  bool seen_point = false;
  for (char c : s) {
    if (c == '-') {
      neg = true;
    } else if (c == '+' || c == ' ') {
      continue;
    } else if (c == '.') {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      acc = add(mul(acc, from_int(10)), from_int(c - '0'));
      if (seen_point) ++frac_digits;
    } else {
      throw std::invalid_argument("bad digit in decimal constant: " + s);
    }
  }
  DD scale{1.0, 0.0};
  for (long i = 0; i < frac_digits; ++i) scale = mul(scale, from_int(10));
  DD v = div(acc, scale);
  if (neg) v = DD{-v.hi, -v.lo};
  return v;
}

struct Table {
  DD pi, ln2, zeta3, catalan;
  DD pi2, pi4;
  std::vector<NamedConstant> named;
  std::vector<ClosedForm> forms;
  DD form_dd[6];
};

const char* kPiDigits =
    "3.14159265358979323846264338327950288419716939937510582097494";
const char* kLn2Digits =
    "0.693147180559945309417232121458176568075500134360255254120680";
const char* kZeta3Digits =
    "1.20205690315959428539973816151144999076498629234049888179227";
const char* kCatalanDigits =
    "0.915965594177219015054603514932384110774149374281672134266498";

const char* kX1Digits =
    "-30.70598523924889925762268444608481536875855208165945918981645846";
const char* kX2Digits =
    "21.284905670516337983402598547497784400625730440810132220995696061";
const char* kSigmaDigits =
    "0.0241791589181444058954507621628984314049152384251207335945309986";

const Table& table() {
  static const Table t = [] {
    Table tb;
    tb.pi = parse_decimal(kPiDigits);
    tb.ln2 = parse_decimal(kLn2Digits);
    tb.zeta3 = parse_decimal(kZeta3Digits);
    tb.catalan = parse_decimal(kCatalanDigits);
    tb.pi2 = mul(tb.pi, tb.pi);
    tb.pi4 = mul(tb.pi2, tb.pi2);

    tb.named = {
        {"PI", kPiDigits, tb.pi.hi, "prefactors and closed forms throughout"},
        {"LN2", kLn2Digits, tb.ln2.hi, "closed form expressions for the two"},
        {"ZETA3", kZeta3Digits, tb.zeta3.hi,
         "evaluated in closed form by Onsager"},
        {"CATALAN", kCatalanDigits, tb.catalan.hi,
         "denotes Catalan's constant"},
    };

    // X1 = -pi^4 [ (4/3) ln2 - (5/pi^2) zeta3 ]
    DD x1 = sub(mul(from_int(5), mul(tb.pi2, tb.zeta3)),
                mul(div(from_int(4), from_int(3)), mul(tb.pi4, tb.ln2)));
    // X2 = pi^4 [ (2/3) ln2 - (2/pi^2) zeta3 ]
    DD x2 = sub(mul(div(from_int(2), from_int(3)), mul(tb.pi4, tb.ln2)),
                mul(from_int(2), mul(tb.pi2, tb.zeta3)));
    // X = pi^4 ln2 - (7/2) pi^2 zeta3
    DD x22 = sub(mul(tb.pi4, tb.ln2),
                 mul(div(from_int(7), from_int(2)), mul(tb.pi2, tb.zeta3)));
    // Sigma = -(X1 + X2) / (4 pi^4)   (corrected denominator)
    DD sum12 = add(x1, x2);
    DD sigma = div(DD{-sum12.hi, -sum12.lo}, mul(from_int(4), tb.pi4));
    // E2x = (1/6) ln2 - (3 / 4 pi^2) zeta3   (independent route to Sigma)
    DD e2x = sub(div(tb.ln2, from_int(6)),
                 div(mul(from_int(3), tb.zeta3), mul(from_int(4), tb.pi2)));
    // Printed sum relation: 3 zeta3 - (2 pi^2 / 3) ln2
    DD sum7 = sub(mul(from_int(3), tb.zeta3),
                  mul(div(mul(from_int(2), tb.pi2), from_int(3)), tb.ln2));

    tb.form_dd[0] = e2x;
    tb.form_dd[1] = x22;
    tb.form_dd[2] = x1;
    tb.form_dd[3] = x2;
    tb.form_dd[4] = sigma;
    tb.form_dd[5] = sum7;

    tb.forms = {
        {"E2X_EQ2", "(1/6)*ln2 - (3/(4*pi^2))*zeta3", std::nullopt, e2x.hi},
        {"X_EQ22", "pi^4*ln2 - (7/2)*pi^2*zeta3", std::nullopt, x22.hi},
        {"X1_EQ24", "-pi^4*((4/3)*ln2 - (5/pi^2)*zeta3)", kX1Digits, x1.hi},
        {"X2_EQ25", "pi^4*((2/3)*ln2 - (2/pi^2)*zeta3)", kX2Digits, x2.hi},
        {"SIGMA_EQ26", "-(X1_EQ24 + X2_EQ25)/(4*pi^4)", kSigmaDigits,
         sigma.hi},
        {"SUM_EQ7", "3*zeta3 - (2*pi^2/3)*ln2 (as printed)", std::nullopt,
         sum7.hi},
    };
    return tb;
  }();
  return t;
}

}  // namespace

double get(Name which) {
  const Table& t = table();
  switch (which) {
    case Name::PI: return t.pi.hi;
    case Name::LN2: return t.ln2.hi;
    case Name::ZETA3: return t.zeta3.hi;
    case Name::CATALAN: return t.catalan.hi;
  }
  throw std::out_of_range("unknown constant");
}

double get(const std::string& name) {
  for (const auto& c : all_constants())
    if (c.name == name) return c.value;
  throw std::out_of_range("unknown constant: " + name);
}

const std::vector<NamedConstant>& all_constants() { return table().named; }

double eval_closed_form(FormId which) {
  return table().forms[static_cast<int>(which)].value;
}

const ClosedForm& closed_form(FormId which) {
  return table().forms[static_cast<int>(which)];
}

const ClosedForm& closed_form(const std::string& id) {
  for (const auto& f : all_closed_forms())
    if (f.id == id) return f;
  throw std::out_of_range("unknown closed form: " + id);
}

const std::vector<ClosedForm>& all_closed_forms() { return table().forms; }

std::vector<AuditRow> consistency_audit() {
  const double x1 = eval_closed_form(FormId::X1_EQ24);
  const double x2 = eval_closed_form(FormId::X2_EQ25);
  const double pi = get(Name::PI);
  const double pi2 = pi * pi;
  const auto& probe = FactorProbe::default_probe();

  auto row = [&](const char* id, const char* detail, double computed,
                 double expected) {
    auto m = probe.best(computed, expected, 1e-12);
    return AuditRow{id,        detail,
                    computed,  expected,
                    m.best_factor, m.best_factor_label,
                    m.relative_deviation};
  };

  std::vector<AuditRow> rows;
  // (a) the sum identity as printed holds only after division by pi^2
  rows.push_back(row("sum_identity",
                     "X1_EQ24 + X2_EQ25 vs 3*zeta3 - (2*pi^2/3)*ln2 as printed",
                     x1 + x2, eval_closed_form(FormId::SUM_EQ7)));
  // (b) the printed 4*pi^2 denominator of Sigma is really 4*pi^4
  rows.push_back(row("sigma_denominator",
                     "-(X1_EQ24 + X2_EQ25)/(4*pi^2) as printed vs SIGMA_EQ26",
                     -(x1 + x2) / (4.0 * pi2),
                     eval_closed_form(FormId::SIGMA_EQ26)));
  // (c) the final closed form equals (X2 - X1)/2, not X2 - X1
  rows.push_back(row("final_closed_form",
                     "X_EQ22 vs X2_EQ25 - X1_EQ24",
                     eval_closed_form(FormId::X_EQ22), x2 - x1));
  return rows;
}

}  // namespace sigma2x::constants
