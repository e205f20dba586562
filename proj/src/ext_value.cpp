#include "gvas/ext_value.hpp"

#include <ostream>

namespace gvas {

ExtInt operator+(const ExtInt& a, const ExtInt& b) {
  using K = ExtInt::Kind;
  if ((a.kind_ == K::NegInf && b.kind_ == K::PosInf) ||
      (a.kind_ == K::PosInf && b.kind_ == K::NegInf)) {
    throw std::domain_error("ExtInt: -inf + +inf is undefined");
  }
  if (a.kind_ == K::NegInf || b.kind_ == K::NegInf) return ExtInt::neg_inf();
  if (a.kind_ == K::PosInf || b.kind_ == K::PosInf) return ExtInt::pos_inf();
  return ExtInt(checked_add(a.value_, b.value_));
}

std::string ExtInt::to_string() const {
  switch (kind_) {
    case Kind::NegInf: return "-inf";
    case Kind::PosInf: return "+inf";
    case Kind::Fin: break;
  }
  return std::to_string(value_);
}

ExtInt ExtInt::parse(const std::string& s) {
  if (s == "+inf" || s == "inf") return pos_inf();
  if (s == "-inf") return neg_inf();
  std::size_t used = 0;
  Int v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("not an extended integer: " + s);
  return ExtInt(v);
}

std::ostream& operator<<(std::ostream& os, const ExtInt& v) { return os << v.to_string(); }

Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("integer overflow in addition");
  return r;
}

Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer overflow in multiplication");
  return r;
}

}  // namespace gvas
