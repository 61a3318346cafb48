#pragma once

#include <map>
#include <string>

#include "gsopt/foms.hpp"
#include "gsopt/gateset.hpp"
#include "gsopt/optimizer.hpp"
#include "gsopt/plant.hpp"

namespace gsopt {

//=========================================================================
// Run configuration: a flat dotted-key text file (`section.key = value`,
// '#' comments). Every key has a default; unknown keys are rejected; the
// fully-resolved configuration is snapshotted verbatim into run directories.
//=========================================================================

class RunConfig {
 public:
  RunConfig();  ///< all defaults

  /// Parse a config file; later assignments win. Throws ValidationError on
  /// unknown keys or malformed values.
  void load_file(const std::string& path);
  void load_string(const std::string& text);
  /// Single `key=value` override (CLI --set).
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;

  /// Sorted `key = value` lines of the fully-resolved configuration.
  std::string resolved_text() const;
  /// Same, with documentation comments: the generated config.reference.
  static std::string reference_text();

  //--- typed builders -----------------------------------------------------
  EnsembleModel make_model() const;
  GateSet make_gateset() const;       ///< guess pulses bound at the guess duration
  PulseShape reference_pulse() const; ///< shortest rectangular pulse for slot 2
  double a_max() const;               ///< reference-pulse amplitude
  FomSpec make_fom_spec() const;
  DcrabConfig make_dcrab_config() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gsopt
