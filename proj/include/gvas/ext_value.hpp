#ifndef GVAS_EXT_VALUE_HPP_
#define GVAS_EXT_VALUE_HPP_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace gvas {

using Int = std::int64_t;

/// An integer extended with -inf and +inf.
///
/// Summaries live in N u {-inf, +inf} and displacements in Z u {+inf}; both
/// use this type.  Addition saturates at the infinities, and -inf + +inf is
/// rejected.
class ExtInt {
public:
  enum class Kind : std::uint8_t { NegInf, Fin, PosInf };

  constexpr ExtInt() : kind_(Kind::NegInf), value_(0) {}
  constexpr ExtInt(Int v) : kind_(Kind::Fin), value_(v) {}  // NOLINT implicit

  static constexpr ExtInt neg_inf() { return ExtInt(Kind::NegInf); }
  static constexpr ExtInt pos_inf() { return ExtInt(Kind::PosInf); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::Fin; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }

  Int value() const {
    if (kind_ != Kind::Fin) throw std::logic_error("ExtInt::value on infinite value");
    return value_;
  }

  friend constexpr bool operator==(const ExtInt& a, const ExtInt& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Fin || a.value_ == b.value_);
  }
  friend constexpr std::strong_ordering operator<=>(const ExtInt& a, const ExtInt& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    if (a.kind_ != Kind::Fin) return std::strong_ordering::equal;
    return a.value_ <=> b.value_;
  }

  friend ExtInt operator+(const ExtInt& a, const ExtInt& b);
  ExtInt& operator+=(const ExtInt& o) { return *this = *this + o; }

  /// "+inf", "-inf" or the decimal value.
  std::string to_string() const;
  static ExtInt parse(const std::string& s);

private:
  explicit constexpr ExtInt(Kind k) : kind_(k), value_(0) {}
  Kind kind_;
  Int value_;
};

using ExtValue = ExtInt;

inline ExtInt max(const ExtInt& a, const ExtInt& b) { return a < b ? b : a; }
inline ExtInt min(const ExtInt& a, const ExtInt& b) { return a < b ? a : b; }

std::ostream& operator<<(std::ostream& os, const ExtInt& v);

/// Checked 64-bit helpers; overflow is reported, never wrapped.
Int checked_add(Int a, Int b);
Int checked_mul(Int a, Int b);

}  // namespace gvas

#endif  // GVAS_EXT_VALUE_HPP_
