#pragma once

// Umbrella header.

#include "certquad/approx.hpp"
#include "certquad/composite.hpp"
#include "certquad/core.hpp"
#include "certquad/expr.hpp"
#include "certquad/prob.hpp"
#include "certquad/rules.hpp"
#include "certquad/table.hpp"

namespace certquad {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace certquad
