#ifndef MCU_CANDIDATE_STORE_HPP
#define MCU_CANDIDATE_STORE_HPP

#include <iosfwd>
#include <string>

#include "mcu/candidate_set.hpp"

namespace mcu {

// Single self-describing binary file: one header record (magic, version,
// ModelSpec, M, dim, alpha, provenance) followed by M fixed-layout
// candidate records (dim doubles of theta, then h). All integers and
// IEEE-754 doubles little-endian; byte layout documented in
// docs/formats.md. Doubles round-trip bit-exactly.

/// Writes the candidate-set file format to the sink.
/// Throws IoError on write failure.
void save(const CandidateSet& set, std::ostream& out);

/// Atomic file save: writes <path>.tmp then renames over <path>.
void save_file(const CandidateSet& set, const std::string& path);

/// Parses and validates a candidate-set stream. Unknown format version ->
/// UnsupportedVersionError; truncation, record-count mismatch, or any
/// invariant violation -> CorruptionError (never a partial set).
CandidateSet load(std::istream& in);

CandidateSet load_file(const std::string& path);

}  // namespace mcu

#endif
