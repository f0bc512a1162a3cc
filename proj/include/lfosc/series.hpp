#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lfosc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class ValueKind { Exact, Float64 };

/// Dirichlet-series coefficient sequence a(1..N).
///
/// Values are stored either as exact rationals or as 64-bit floats; the
/// representation is fixed at construction and recorded in kind(). Entries may
/// be marked absent (ingested tables with holes); absent entries read as 0 and
/// carry a presence flag that sign scans consult.
class CoefficientSeries {
public:
  CoefficientSeries(ValueKind kind, std::size_t limit, std::string label);

  static CoefficientSeries exact(std::size_t limit, std::string label);
  static CoefficientSeries float64(std::size_t limit, std::string label);

  std::size_t limit() const noexcept { return limit_; }
  ValueKind kind() const noexcept { return kind_; }
  bool is_exact() const noexcept { return kind_ == ValueKind::Exact; }

  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  bool is_multiplicative() const noexcept { return multiplicative_; }
  void set_multiplicative(bool flag) noexcept { multiplicative_ = flag; }

  // Valid for both representations; exact values are rounded to double.
  double value(std::size_t n) const;
  const Rational& exact_value(std::size_t n) const;

  void set(std::size_t n, Rational v);
  void set(std::size_t n, double v);

  bool present(std::size_t n) const;
  void mark_absent(std::size_t n);
  bool has_gaps() const noexcept { return !present_.empty(); }
  // Fraction of indices in [lo, hi] that are absent.
  double gap_fraction(std::size_t lo, std::size_t hi) const;

  // Derived float view of an exact series (copy for float input).
  CoefficientSeries to_float64() const;

private:
  void check_index(std::size_t n) const;

  ValueKind kind_;
  std::size_t limit_;
  std::vector<Rational> exact_; // index 0 unused
  std::vector<double> vals_;    // index 0 unused
  std::vector<std::uint8_t> present_; // empty means every index present
  std::string label_;
  bool multiplicative_ = false;
};

} // namespace lfosc
