#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "auvplan/flowfield.hpp"

namespace auvplan {

inline constexpr int kFieldFormatVersion = 1;

// Field document, line oriented, '#' starts a comment:
//
//   format_version 1
//   nx <int>
//   ny <int>
//   cell_size_m <real>
//   layer_depths_m <real> ... (one per layer, strictly increasing)
//   origin_deg <lon> <lat>          (optional)
//   layer 0
//   u                               ny rows of nx reals, row 0 = southernmost
//   v                               same shape
//   land                            same shape, 0 or 1
//   layer 1
//   ...
//
// Every row must carry exactly nx values; nothing is padded or coerced.

/// Throws ParseError for malformed documents and dimension mismatches,
/// ValidationError for invariant violations in otherwise well-formed input.
FlowField load_flow_field(std::istream& in);
FlowField load_flow_field_file(const std::filesystem::path& path);

/// Values are written in shortest round-trip form, so load(write(f)) == f.
void write_flow_field(std::ostream& out, const FlowField& field);
void write_flow_field_file(const std::filesystem::path& path, const FlowField& field);

/// Hash of the canonical serialization; identifies a field in plan headers.
std::string field_fingerprint(const FlowField& field);

}  // namespace auvplan
