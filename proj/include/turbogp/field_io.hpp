#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "turbogp/spectral_field.hpp"

namespace turbogp {

enum class FieldKind { kReal, kSpectral };

/// Metadata stored in the JSON header of a field dump.
struct FieldHeader {
    int n = 0;
    FieldKind kind = FieldKind::kReal;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
};

/// Writes a field dump: `header_path` receives
/// {"alpha": ..., "kind": "real"|"spectral", "n": N, "seed": ...} and
/// `payload_path` the values as little-endian IEEE-754 doubles in row-major
/// order (spectral payloads interleave re, im). Throws IoError.
void write_field(const RealField& field, const std::string& header_path, const std::string& payload_path,
                 std::optional<std::uint64_t> seed = {}, std::optional<double> alpha = {});
void write_field(const SpectralField& field, const std::string& header_path, const std::string& payload_path,
                 std::optional<std::uint64_t> seed = {}, std::optional<double> alpha = {});

FieldHeader read_field_header(const std::string& header_path);

/// Reads either kind of dump and returns the physical-space field.
RealField read_real_field(const std::string& header_path, const std::string& payload_path);
SpectralField read_spectral_field(const std::string& header_path, const std::string& payload_path);

}  // namespace turbogp
