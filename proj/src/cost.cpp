#include "soac/cost.hpp"

namespace soac {

std::string rat_to_string(const Rat& r) {
  Rat c = r;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rat rat_from_string(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational");
  // mpq accepts leading '+', whitespace and other slack we do not want in a
  // canonical file format, so vet the shape first: -?digits(/digits)?
  auto digits = [](const std::string& s) {
    if (s.empty()) return false;
    for (char ch : s)
      if (ch < '0' || ch > '9') return false;
    return true;
  };
  std::string t = text;
  std::string num = t, den;
  auto slash = t.find('/');
  if (slash != std::string::npos) {
    num = t.substr(0, slash);
    den = t.substr(slash + 1);
    if (!digits(den) || den == "0" || (den.size() > 1 && den[0] == '0'))
      throw ParseError("bad rational '" + text + "'");
  }
  std::string mag = (!num.empty() && num[0] == '-') ? num.substr(1) : num;
  if (!digits(mag) || (mag.size() > 1 && mag[0] == '0'))
    throw ParseError("bad rational '" + text + "'");
  Rat r;
  if (r.set_str(t, 10) != 0) throw ParseError("bad rational '" + text + "'");
  r.canonicalize();
  return r;
}

std::string cost_to_string(const Cost& c) {
  if (c.is_infinite()) return "infeasible";
  return rat_to_string(c.value());
}

}  // namespace soac
