#pragma once

#include <gmpxx.h>

#include <string>

#include "oe/errors.hpp"

namespace oe {

/// "num/den" or plain integer string -> canonical rational.
inline mpq_class parse_rational(const std::string& s) {
    if (s.empty()) throw Error("empty rational");
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw Error("bad rational: " + s);
    q.canonicalize();
    return q;
}

inline std::string rational_str(const mpq_class& q) { return q.get_str(); }

}  // namespace oe
