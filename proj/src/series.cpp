#include "lfosc/series.hpp"

#include "lfosc/error.hpp"

namespace lfosc {

CoefficientSeries::CoefficientSeries(ValueKind kind, std::size_t limit, std::string label)
    : kind_(kind), limit_(limit), label_(std::move(label)) {
  if (limit == 0) raise(errc::invalid_argument, "series limit must be >= 1");
  if (kind_ == ValueKind::Exact)
    exact_.assign(limit_ + 1, Rational(0));
  else
    vals_.assign(limit_ + 1, 0.0);
}

CoefficientSeries CoefficientSeries::exact(std::size_t limit, std::string label) {
  return CoefficientSeries(ValueKind::Exact, limit, std::move(label));
}

CoefficientSeries CoefficientSeries::float64(std::size_t limit, std::string label) {
  return CoefficientSeries(ValueKind::Float64, limit, std::move(label));
}

void CoefficientSeries::check_index(std::size_t n) const {
  if (n < 1 || n > limit_)
    raise(errc::range_error,
          "series index " + std::to_string(n) + " outside [1, " + std::to_string(limit_) + "]");
}

double CoefficientSeries::value(std::size_t n) const {
  check_index(n);
  if (kind_ == ValueKind::Exact) return exact_[n].convert_to<double>();
  return vals_[n];
}

const Rational& CoefficientSeries::exact_value(std::size_t n) const {
  check_index(n);
  if (kind_ != ValueKind::Exact)
    raise(errc::invalid_argument, "exact_value() on a float series (" + label_ + ")");
  return exact_[n];
}

void CoefficientSeries::set(std::size_t n, Rational v) {
  check_index(n);
  if (kind_ != ValueKind::Exact)
    raise(errc::invalid_argument, "rational write to a float series (" + label_ + ")");
  exact_[n] = std::move(v);
}

void CoefficientSeries::set(std::size_t n, double v) {
  check_index(n);
  if (kind_ == ValueKind::Exact) {
    exact_[n] = Rational(v); // doubles are rationals; conversion is exact
    return;
  }
  vals_[n] = v;
}

bool CoefficientSeries::present(std::size_t n) const {
  check_index(n);
  if (present_.empty()) return true;
  return present_[n] != 0;
}

void CoefficientSeries::mark_absent(std::size_t n) {
  check_index(n);
  if (present_.empty()) present_.assign(limit_ + 1, 1);
  present_[n] = 0;
  if (kind_ == ValueKind::Exact)
    exact_[n] = 0;
  else
    vals_[n] = 0.0;
}

double CoefficientSeries::gap_fraction(std::size_t lo, std::size_t hi) const {
  check_index(lo);
  check_index(hi);
  if (hi < lo) raise(errc::invalid_argument, "gap_fraction: hi < lo");
  if (present_.empty()) return 0.0;
  std::size_t absent = 0;
  for (std::size_t n = lo; n <= hi; ++n)
    if (!present_[n]) ++absent;
  return static_cast<double>(absent) / static_cast<double>(hi - lo + 1);
}

CoefficientSeries CoefficientSeries::to_float64() const {
  CoefficientSeries out(ValueKind::Float64, limit_, label_);
  out.multiplicative_ = multiplicative_;
  out.present_ = present_;
  for (std::size_t n = 1; n <= limit_; ++n)
    out.vals_[n] = value(n);
  return out;
}

} // namespace lfosc
