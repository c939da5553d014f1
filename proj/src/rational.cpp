#include "subavg/rational.hpp"

#include <cctype>

namespace subavg {

Rat parse_rat(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    Rat r(text);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + text);
    r.canonicalize();
    return r;
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) {
    Rat r(text);
    r.canonicalize();
    return r;
  }
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  if (digits.empty() || digits == "-")
    throw std::invalid_argument("bad rational literal: " + text);
  Int num(digits);
  Int den(1);
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  Rat r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace subavg
