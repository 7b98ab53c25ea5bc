// Anchor TU for the exception hierarchy (keeps vtables/typeinfo in one place).
#include "deforsc/errors.hpp"

namespace deforsc {
// Nothing to define: the types are header-only, this TU pins the archive entry.
}
