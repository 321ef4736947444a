#ifndef FB_IO_HPP
#define FB_IO_HPP

#include "fb/config.hpp"
#include "fb/solver.hpp"
#include "fb/verification.hpp"

#include <cstdint>
#include <string>

namespace fb {

std::string trace_to_json(const SolveTrace& trace, std::uint64_t config_hash, std::uint64_t seed);

/// Reads a serialized trace back; field values come from the CSV files named
/// in the entries (resolved relative to dir). Throws SchemaError on version
/// mismatch and IoError on missing files.
SolveTrace trace_from_json(const std::string& dir, const std::string& json_text, const Grid& g);

std::string report_to_json(const VerificationReport& rep);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace fb

#endif
