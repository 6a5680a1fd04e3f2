// Exact cost arithmetic: arbitrary-precision rationals plus a distinguished
// Infinity.  Infinity is absorbing under addition and compares greater than
// every finite value.  It is a tagged state of Cost, never a stored rational;
// latency tables hold only finite Rat entries.
#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace soac {

using Rat = mpq_class;  // always kept canonical (reduced, positive denominator)

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Malformed instance / flow / layout structure.
struct ModelError : Error {
  using Error::Error;
};
// Search space exceeded a configured enumeration budget.
struct ResourceError : Error {
  using Error::Error;
};
// Text input could not be parsed; carries a 1-based line number (0 = n/a).
struct ParseError : Error {
  int line = 0;
  ParseError(int line_no, const std::string& msg)
      : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class Cost {
 public:
  Cost() : inf_(false), v_(0) {}
  Cost(const Rat& v) : inf_(false), v_(v) {}  // NOLINT: implicit by design
  Cost(long n) : inf_(false), v_(n) {}        // NOLINT
  static Cost infinity() {
    Cost c;
    c.inf_ = true;
    return c;
  }

  bool is_infinite() const { return inf_; }
  // The finite value; calling this on Infinity is a logic error.
  const Rat& value() const {
    if (inf_) throw ModelError("attempt to read the value of Infinity");
    return v_;
  }

  Cost& operator+=(const Cost& o) {
    if (inf_ || o.inf_) {
      inf_ = true;
      v_ = 0;
    } else {
      v_ += o.v_;
    }
    return *this;
  }
  friend Cost operator+(Cost a, const Cost& b) { return a += b; }

  friend bool operator==(const Cost& a, const Cost& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.v_ == b.v_;
  }
  friend bool operator!=(const Cost& a, const Cost& b) { return !(a == b); }
  friend bool operator<(const Cost& a, const Cost& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.v_ < b.v_;
  }
  friend bool operator<=(const Cost& a, const Cost& b) { return a < b || a == b; }
  friend bool operator>(const Cost& a, const Cost& b) { return b < a; }
  friend bool operator>=(const Cost& a, const Cost& b) { return b <= a; }

 private:
  bool inf_;
  Rat v_;
};

// "p" or "p/q" with q > 0 after canonicalization; no floating point anywhere.
std::string rat_to_string(const Rat& r);
Rat rat_from_string(const std::string& text);  // throws ParseError on junk

std::string cost_to_string(const Cost& c);  // Infinity renders as "infeasible"

}  // namespace soac
