#ifndef FOLDGROWTH_ERRORS_HPP
#define FOLDGROWTH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fg {

enum class errc {
  domain,      // operation applied outside its precondition
  malformed,   // structurally invalid input (bad edge chain, bad file)
  validation,  // representative fails a TT/filtration check
  composition, // parts cannot be glued (base or label mismatch)
  resource,    // configured bound exceeded
  internal,    // self-check failed; indicates a bug or invalid rep
  io,
};

class error : public std::runtime_error {
public:
  error(errc k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  errc kind;
};

[[noreturn]] inline void fail(errc k, const std::string& msg) { throw error(k, msg); }

inline void check(bool ok, errc k, const std::string& msg) {
  if (!ok) fail(k, msg);
}

} // namespace fg

#endif
