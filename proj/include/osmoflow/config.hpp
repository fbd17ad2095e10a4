#pragma once

// Run configuration: a strict TOML subset (sections, scalar keys, comments).
// Unknown sections or keys are rejected so a typo cannot silently fall back
// to a default.  The canonical serialization (all effective values after
// defaults) feeds a FNV-1a hash that output files embed for provenance.

#include <string>

#include "osmoflow/params.hpp"

namespace osmoflow {

struct RunConfig {
  PhysParams params{};

  // [grids]
  int n_inner = 129;
  int n_outer = 129;
  int stokes_n = 48;

  // [spectrum]
  int k_max = 16;
  double tol_zero = 1e-6;
  double spurious_rel = 1e-3;

  // [tolerances]
  double bc_tol = 1e-6;

  // [dynamics]
  double dt = 0.0;  // 0: stepper default
  double t_final = 12.0;
  int sample_every = 10;

  // [run]
  unsigned long long seed = 12345;
  std::string out_dir = ".";

  void validate() const;      // throws ConfigError on invalid values
  std::string canonical() const;  // deterministic key=value serialization
  std::string hash() const;       // FNV-1a hex digest of canonical()
};

// Parse a config file (strict TOML subset).  Throws ConfigError on syntax
// errors, unknown keys, type mismatches, or invalid values; the message
// carries the line number.
RunConfig load_run_config(const std::string& path);

// Same, from an in-memory string (used by tests).
RunConfig parse_run_config(const std::string& text);

}  // namespace osmoflow
