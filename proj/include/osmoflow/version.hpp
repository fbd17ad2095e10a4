#pragma once

#define OSMOFLOW_VERSION "0.1.0"

namespace osmoflow {
inline constexpr const char* version() { return OSMOFLOW_VERSION; }
}
