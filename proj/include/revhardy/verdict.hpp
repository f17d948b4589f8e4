#pragma once

#include <string>
#include <string_view>

#include "revhardy/errors.hpp"

namespace revhardy {

enum class Verdict { Verified, Violated, Inconclusive, TriviallyHolds, InvalidParams };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Verified: return "verified";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::TriviallyHolds: return "trivially_holds";
    case Verdict::InvalidParams: return "invalid_params";
  }
  return "inconclusive";
}

inline Verdict verdict_from_string(std::string_view s) {
  for (Verdict v : {Verdict::Verified, Verdict::Violated, Verdict::Inconclusive, Verdict::TriviallyHolds,
                    Verdict::InvalidParams}) {
    if (to_string(v) == s) return v;
  }
  fail(ErrorKind::ConfigError, "unknown verdict '" + std::string(s) + "'");
}

}  // namespace revhardy
