#ifndef FOLDGROWTH_BIGINT_HPP
#define FOLDGROWTH_BIGINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "foldgrowth/errors.hpp"

namespace fg {

// Sign-magnitude arbitrary precision integer, base 2^32. Supports exactly the
// operations the homology computations need.
class Bigint {
public:
  Bigint() = default;
  Bigint(long long v) {  // NOLINT: implicit by design
    if (v < 0) {
      neg_ = true;
      v = -v;
    }
    while (v) {
      mag_.push_back(static_cast<uint32_t>(v & 0xffffffffu));
      v >>= 32;
    }
  }

  bool zero() const { return mag_.empty(); }
  bool negative() const { return neg_; }

  friend bool operator==(const Bigint& a, const Bigint& b) {
    return a.neg_ == b.neg_ && a.mag_ == b.mag_;
  }
  friend bool operator!=(const Bigint& a, const Bigint& b) { return !(a == b); }
  friend bool operator<(const Bigint& a, const Bigint& b) {
    if (a.neg_ != b.neg_) return a.neg_;
    int c = cmp_mag(a.mag_, b.mag_);
    return a.neg_ ? c > 0 : c < 0;
  }

  Bigint operator-() const {
    Bigint r = *this;
    if (!r.zero()) r.neg_ = !r.neg_;
    return r;
  }

  friend Bigint operator+(const Bigint& a, const Bigint& b) {
    if (a.neg_ == b.neg_) {
      Bigint r;
      r.mag_ = add_mag(a.mag_, b.mag_);
      r.neg_ = a.neg_ && !r.mag_.empty();
      return r;
    }
    int c = cmp_mag(a.mag_, b.mag_);
    if (c == 0) return Bigint();
    Bigint r;
    if (c > 0) {
      r.mag_ = sub_mag(a.mag_, b.mag_);
      r.neg_ = a.neg_;
    } else {
      r.mag_ = sub_mag(b.mag_, a.mag_);
      r.neg_ = b.neg_;
    }
    return r;
  }
  friend Bigint operator-(const Bigint& a, const Bigint& b) { return a + (-b); }
  friend Bigint operator*(const Bigint& a, const Bigint& b) {
    if (a.zero() || b.zero()) return Bigint();
    Bigint r;
    r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
    for (size_t i = 0; i < a.mag_.size(); ++i) {
      uint64_t carry = 0;
      for (size_t j = 0; j < b.mag_.size(); ++j) {
        uint64_t cur = r.mag_[i + j] + static_cast<uint64_t>(a.mag_[i]) * b.mag_[j] + carry;
        r.mag_[i + j] = static_cast<uint32_t>(cur);
        carry = cur >> 32;
      }
      size_t k = i + b.mag_.size();
      while (carry) {
        uint64_t cur = r.mag_[k] + carry;
        r.mag_[k++] = static_cast<uint32_t>(cur);
        carry = cur >> 32;
      }
    }
    trim(r.mag_);
    r.neg_ = a.neg_ != b.neg_;
    return r;
  }
  Bigint& operator+=(const Bigint& b) { return *this = *this + b; }
  Bigint& operator-=(const Bigint& b) { return *this = *this - b; }
  Bigint& operator*=(const Bigint& b) { return *this = *this * b; }

  // exact division by a small positive integer; errors when not divisible
  Bigint div_exact(uint32_t d) const {
    check(d != 0, errc::domain, "division by zero");
    Bigint r;
    r.mag_.assign(mag_.size(), 0);
    uint64_t rem = 0;
    for (size_t i = mag_.size(); i-- > 0;) {
      uint64_t cur = (rem << 32) | mag_[i];
      r.mag_[i] = static_cast<uint32_t>(cur / d);
      rem = cur % d;
    }
    check(rem == 0, errc::internal, "inexact division");
    trim(r.mag_);
    r.neg_ = neg_ && !r.mag_.empty();
    return r;
  }

  // decimal digit count of |x|, as a cheap magnitude proxy
  size_t magnitude_digits() const { return to_string().size(); }

  std::string to_string() const {
    if (zero()) return "0";
    std::vector<uint32_t> m = mag_;
    std::string out;
    while (!m.empty()) {
      uint64_t rem = 0;
      for (size_t i = m.size(); i-- > 0;) {
        uint64_t cur = (rem << 32) | m[i];
        m[i] = static_cast<uint32_t>(cur / 1000000000u);
        rem = cur % 1000000000u;
      }
      trim(m);
      std::string chunk = std::to_string(rem);
      if (!m.empty())
        out = std::string(9 - chunk.size(), '0') + chunk + out;
      else
        out = chunk + out;
    }
    return neg_ ? "-" + out : out;
  }

  // absolute-value comparison
  static int abs_cmp(const Bigint& a, const Bigint& b) { return cmp_mag(a.mag_, b.mag_); }

private:
  bool neg_ = false;
  std::vector<uint32_t> mag_;  // little endian, no trailing zeros

  static void trim(std::vector<uint32_t>& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
  }
  static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
  }
  static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r(std::max(a.size(), b.size()) + 1, 0);
    uint64_t carry = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      uint64_t cur = carry;
      if (i < a.size()) cur += a[i];
      if (i < b.size()) cur += b[i];
      r[i] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
    }
    trim(r);
    return r;
  }
  // requires |a| >= |b|
  static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                       const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r = a;
    int64_t borrow = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      int64_t cur = static_cast<int64_t>(r[i]) - borrow - (i < b.size() ? b[i] : 0);
      borrow = 0;
      if (cur < 0) {
        cur += (1ll << 32);
        borrow = 1;
      }
      r[i] = static_cast<uint32_t>(cur);
    }
    trim(r);
    return r;
  }
};

} // namespace fg

#endif
