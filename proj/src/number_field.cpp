#include "mfa/number_field.hpp"

#include <cmath>
#include <limits>

namespace mfa {

namespace {
const char* kErrName[] = {
    "NotSquareFree",    "NoRootInBracket", "MultipleRootsInBracket",
    "DivisionByZero",   "FieldMismatch",   "IndexOutOfRange",
    "SingletonAttractor", "UndecidedGap",  "RuleViolation",
    "FncNotDetected",   "SingularMassSystem", "NonUniqueMass",
    "NotRooted",        "PathExplosion",   "BisectionFailure",
    "NonConcaveInput",  "GridTooNarrow",   "ParseError",
    "ValidationError",  "UnknownExample",  "ConstraintViolation",
    "Internal",
};
}  // namespace

const char* errc_name(Errc c) { return kErrName[static_cast<int>(c)]; }

std::shared_ptr<const NumberField> NumberField::make(Poly minpoly, Rational lo, Rational hi) {
  minpoly = poly_trim(std::move(minpoly));
  if (poly_degree(minpoly) < 1) fail(Errc::ValidationError, "minpoly must be nonconstant");
  minpoly = poly_make_monic(std::move(minpoly));
  if (lo >= hi) fail(Errc::ValidationError, "bracket must satisfy lo < hi");

  Poly g = poly_gcd(minpoly, poly_derivative(minpoly));
  if (poly_degree(g) > 0)
    fail(Errc::NotSquareFree, "gcd(p, p') = " + poly_str(g));

  int slo = rat_sign(poly_eval(minpoly, lo));
  int shi = rat_sign(poly_eval(minpoly, hi));
  if (slo == 0 || shi == 0)
    fail(Errc::ValidationError, "bracket endpoint is a root of minpoly");

  int count = sturm_count(minpoly, lo, hi);
  if (count > 1)
    fail(Errc::MultipleRootsInBracket, "Sturm count is " + std::to_string(count));
  if (count == 0 || slo == shi)
    fail(Errc::NoRootInBracket, "Sturm count is " + std::to_string(count));

  auto f = std::shared_ptr<NumberField>(new NumberField());
  f->minpoly_ = std::move(minpoly);
  f->init_lo_ = lo;
  f->init_hi_ = hi;
  if (f->degree() == 1) {
    // theta is rational: pin the bracket to the exact root.
    Rational root = -f->minpoly_[0];
    f->lo_ = f->hi_ = root;
  } else {
    f->lo_ = lo;
    f->hi_ = hi;
  }
  return f;
}

std::shared_ptr<const NumberField> NumberField::rationals() {
  // theta = 1, the root of x - 1 in (0, 2).
  return make({Rational(-1), Rational(1)}, Rational(0), Rational(2));
}

std::pair<Rational, Rational> NumberField::bracket(const Rational& max_width) const {
  std::lock_guard<std::mutex> lk(mu_);
  while (hi_ - lo_ > max_width) {
    Rational mid = (lo_ + hi_) / 2;
    int sm = rat_sign(poly_eval(minpoly_, mid));
    if (sm == 0) {
      lo_ = hi_ = mid;
      break;
    }
    int sl = rat_sign(poly_eval(minpoly_, lo_));
    if (sl == sm)
      lo_ = mid;
    else
      hi_ = mid;
  }
  return {lo_, hi_};
}

std::string NumberField::describe() const {
  return "Q(t), t root of " + poly_str(minpoly_) + " in (" + rat_str(init_lo_) + ", " +
         rat_str(init_hi_) + ")";
}

AlgebraicReal::AlgebraicReal(FieldPtr field, Rational constant) : field_(std::move(field)) {
  coeffs_.assign(field_->degree(), Rational(0));
  coeffs_[0] = std::move(constant);
}

AlgebraicReal::AlgebraicReal(FieldPtr field, std::vector<Rational> coeffs)
    : field_(std::move(field)), coeffs_(std::move(coeffs)) {
  reduce();
}

AlgebraicReal AlgebraicReal::theta(FieldPtr field) {
  int d = field->degree();
  std::vector<Rational> c(d, Rational(0));
  if (d == 1) {
    c[0] = -field->minpoly()[0];
  } else {
    c[1] = 1;
  }
  return AlgebraicReal(std::move(field), std::move(c));
}

void AlgebraicReal::reduce() {
  int d = field_->degree();
  if (static_cast<int>(coeffs_.size()) > d) {
    Poly rem = poly_divmod(poly_trim(coeffs_), field_->minpoly()).second;
    coeffs_ = std::move(rem);
  }
  coeffs_.resize(d, Rational(0));
}

bool AlgebraicReal::is_zero() const {
  for (const auto& c : coeffs_)
    if (c != 0) return false;
  return true;
}

bool AlgebraicReal::is_rational() const {
  if (field_->degree() == 1) return true;
  for (size_t i = 1; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0) return false;
  return true;
}

Rational AlgebraicReal::rational_value() const {
  // Reduced representation: a rational value is exactly the constant coefficient.
  return coeffs_[0];
}

void AlgebraicReal::check_same_field(const AlgebraicReal& a, const AlgebraicReal& b) {
  if (a.field_ == b.field_) return;
  if (a.field_ && b.field_ && a.field_->minpoly() == b.field_->minpoly() &&
      a.field_->initial_bracket() == b.field_->initial_bracket())
    return;
  fail(Errc::FieldMismatch, "operands belong to different number fields");
}

AlgebraicReal AlgebraicReal::operator-() const {
  AlgebraicReal r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

AlgebraicReal operator+(const AlgebraicReal& a, const AlgebraicReal& b) {
  AlgebraicReal::check_same_field(a, b);
  AlgebraicReal r = a;
  for (size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] += b.coeffs_[i];
  return r;
}

AlgebraicReal operator-(const AlgebraicReal& a, const AlgebraicReal& b) {
  AlgebraicReal::check_same_field(a, b);
  AlgebraicReal r = a;
  for (size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] -= b.coeffs_[i];
  return r;
}

AlgebraicReal operator*(const AlgebraicReal& a, const AlgebraicReal& b) {
  AlgebraicReal::check_same_field(a, b);
  Poly prod = poly_mul(poly_trim(a.coeffs_), poly_trim(b.coeffs_));
  Poly rem = poly_divmod(prod, a.field_->minpoly()).second;
  std::vector<Rational> c = std::move(rem);
  c.resize(a.field_->degree(), Rational(0));
  AlgebraicReal r;
  r.field_ = a.field_;
  r.coeffs_ = std::move(c);
  return r;
}

AlgebraicReal AlgebraicReal::inverse() const {
  if (is_zero()) fail(Errc::DivisionByZero, "inverse of zero");
  if (field_->degree() == 1) {
    Rational v = rational_value();
    return AlgebraicReal(field_, 1 / v);
  }
  Poly p = poly_trim(coeffs_);
  Poly g, u, v;
  poly_egcd(p, field_->minpoly(), g, u, v);
  if (poly_degree(g) == 0) {
    // u*p == 1 mod minpoly (g normalized to 1).
    return AlgebraicReal(field_, std::vector<Rational>(u.begin(), u.end()));
  }
  // Squarefree but reducible minpoly: g(theta) may or may not vanish. If it
  // does, the value itself is zero, which contradicts the check above unless
  // the representation is non-canonical; treat as division by zero.
  auto [lo, hi] = field_->initial_bracket();
  if (sturm_count(g, lo, hi) >= 1)
    fail(Errc::DivisionByZero, "value vanishes at theta (reducible minpoly)");
  // p * u = g (mod minpoly) with g(theta) != 0: invert g(theta) recursively.
  AlgebraicReal gv(field_, std::vector<Rational>(g.begin(), g.end()));
  AlgebraicReal uv(field_, std::vector<Rational>(u.begin(), u.end()));
  return uv * gv.inverse();
}

AlgebraicReal operator/(const AlgebraicReal& a, const AlgebraicReal& b) {
  AlgebraicReal::check_same_field(a, b);
  if (b.is_zero()) fail(Errc::DivisionByZero, "division by zero");
  return a * b.inverse();
}

int AlgebraicReal::sign() const {
  if (is_zero()) return 0;
  Poly p = poly_trim(coeffs_);
  if (poly_degree(p) == 0) return rat_sign(p[0]);
  // With an irreducible minpoly a nonzero reduced representation cannot
  // vanish at theta. The minpoly is only validated squarefree, so decide the
  // zero case exactly once via the gcd before refining.
  Poly g = poly_gcd(p, field_->minpoly());
  if (poly_degree(g) > 0) {
    auto [ilo, ihi] = field_->initial_bracket();
    if (sturm_count(g, ilo, ihi) >= 1) return 0;
  }
  Rational width = field_->initial_bracket().second - field_->initial_bracket().first;
  for (int iter = 0; iter < 4096; ++iter) {
    auto [lo, hi] = field_->bracket(width);
    auto [elo, ehi] = poly_eval_interval(p, lo, hi);
    if (rat_sign(elo) > 0) return 1;
    if (rat_sign(ehi) < 0) return -1;
    if (lo == hi) return rat_sign(poly_eval(p, lo));
    width /= 16;
  }
  fail(Errc::Internal, "sign refinement failed to separate a nonzero value");
}

int AlgebraicReal::compare(const AlgebraicReal& a, const AlgebraicReal& b) {
  if (a.coeffs_ == b.coeffs_) return 0;
  return (a - b).sign();
}

std::pair<Rational, Rational> AlgebraicReal::enclosure(const Rational& max_width) const {
  Poly p = poly_trim(coeffs_);
  if (p.empty()) return {Rational(0), Rational(0)};
  Rational width = field_->initial_bracket().second - field_->initial_bracket().first;
  while (true) {
    auto [lo, hi] = field_->bracket(width);
    auto [elo, ehi] = poly_eval_interval(p, lo, hi);
    if (ehi - elo <= max_width || lo == hi) return {elo, ehi};
    width /= 16;
  }
}

std::pair<double, double> AlgebraicReal::to_float(int bits) const {
  if (bits < 1) fail(Errc::ValidationError, "precision must be >= 1 bit");
  if (is_zero()) return {0.0, 0.0};
  Rational scale = 1;
  scale >>= bits + 4;  // 2^-(bits+4)
  Rational width = scale;
  Rational mid, rad;
  while (true) {
    auto [elo, ehi] = enclosure(width);
    mid = (elo + ehi) / 2;
    rad = (ehi - elo) / 2;
    if (rad <= scale * std::max(Rational(1), rat_abs(mid))) break;
    width /= 16;
  }
  // Rational-to-double conversion truncates; pick the nearest representable
  // of the three candidates and report the exact residual in the radius.
  double v = mid.get_d();
  double best = v;
  Rational best_err = rat_abs(mid - Rational(v));
  for (double cand : {std::nextafter(v, std::numeric_limits<double>::infinity()),
                      std::nextafter(v, -std::numeric_limits<double>::infinity())}) {
    Rational err = rat_abs(mid - Rational(cand));
    if (err < best_err) {
      best = cand;
      best_err = err;
    }
  }
  Rational total = best_err + rad;
  double eps = total.get_d() * (1 + 4e-16) + 5e-324;
  return {best, eps};
}

std::string AlgebraicReal::str() const {
  Poly p = poly_trim(coeffs_);
  if (p.empty()) return "0";
  if (field_->degree() == 1) return rat_str(rational_value());
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (!s.empty()) s += "+";
    s += rat_str(p[i]);
    if (i >= 1) s += "t";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s;
}

}  // namespace mfa
