// Deterministic numeric formatting. Every floating-point value that lands in a
// CSV/JSON artifact goes through fmt6/round6 so reruns produce byte-identical
// files independent of float-printing strategy.
#pragma once

#include <string>

namespace deforsc {

// Format with 6 significant digits ("%.6g" semantics, "nan"/"inf" spelled out).
std::string fmt6(double x);

// The double you get by parsing fmt6(x) back; used before JSON serialization.
double round6(double x);

// Integer-valued doubles as plain integers (e.g. counts stored as double).
std::string fmt_int(long long x);

// Shortest representation that parses back to exactly x (std::to_chars).
// Used for data files (panels) where round-tripping must be lossless.
std::string fmt_exact(double x);

}  // namespace deforsc
