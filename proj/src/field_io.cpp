#include "turbogp/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "turbogp/error.hpp"

namespace turbogp {
namespace {

using nlohmann::json;

void write_header(const std::string& path, int n, FieldKind kind, std::optional<std::uint64_t> seed,
                  std::optional<double> alpha) {
    json h;
    h["n"] = n;
    h["kind"] = kind == FieldKind::kReal ? "real" : "spectral";
    h["seed"] = seed ? json(*seed) : json(nullptr);
    h["alpha"] = alpha ? json(*alpha) : json(nullptr);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << h.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_doubles(const std::string& path, std::span<const double> values) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    std::vector<unsigned char> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(values[i]);
        for (int b = 0; b < 8; ++b) bytes[i * 8 + std::size_t(b)] = static_cast<unsigned char>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<double> read_doubles(const std::string& path, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<unsigned char> bytes(count * 8);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
    if (in.gcount() != std::streamsize(bytes.size())) {
        throw IoError("payload '" + path + "' is shorter than the header declares");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw IoError("payload '" + path + "' is longer than the header declares");
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= std::uint64_t(bytes[i * 8 + std::size_t(b)]) << (8 * b);
        values[i] = std::bit_cast<double>(bits);
    }
    return values;
}

}  // namespace

void write_field(const RealField& field, const std::string& header_path, const std::string& payload_path,
                 std::optional<std::uint64_t> seed, std::optional<double> alpha) {
    write_doubles(payload_path, field.values());
    write_header(header_path, field.grid().n(), FieldKind::kReal, seed, alpha);
}

void write_field(const SpectralField& field, const std::string& header_path, const std::string& payload_path,
                 std::optional<std::uint64_t> seed, std::optional<double> alpha) {
    std::vector<double> interleaved;
    interleaved.reserve(field.coeffs().size() * 2);
    for (const auto& c : field.coeffs()) {
        interleaved.push_back(c.real());
        interleaved.push_back(c.imag());
    }
    write_doubles(payload_path, interleaved);
    write_header(header_path, field.grid().n(), FieldKind::kSpectral, seed, alpha);
}

FieldHeader read_field_header(const std::string& header_path) {
    std::ifstream in(header_path);
    if (!in) throw IoError("cannot open '" + header_path + "' for reading");
    json h;
    try {
        in >> h;
    } catch (const json::exception& e) {
        throw IoError("field header '" + header_path + "' is not valid JSON: " + e.what());
    }
    FieldHeader out;
    try {
        out.n = h.at("n").get<int>();
        const std::string kind = h.at("kind").get<std::string>();
        if (kind == "real") {
            out.kind = FieldKind::kReal;
        } else if (kind == "spectral") {
            out.kind = FieldKind::kSpectral;
        } else {
            throw IoError("field header '" + header_path + "' has unknown kind '" + kind + "'");
        }
        if (h.contains("seed") && !h["seed"].is_null()) out.seed = h["seed"].get<std::uint64_t>();
        if (h.contains("alpha") && !h["alpha"].is_null()) out.alpha = h["alpha"].get<double>();
    } catch (const json::exception& e) {
        throw IoError("field header '" + header_path + "' is malformed: " + e.what());
    }
    return out;
}

RealField read_real_field(const std::string& header_path, const std::string& payload_path) {
    const FieldHeader h = read_field_header(header_path);
    if (h.kind == FieldKind::kSpectral) return to_physical(read_spectral_field(header_path, payload_path));
    const GridSpec grid(h.n);
    return RealField(grid, read_doubles(payload_path, grid.size()));
}

SpectralField read_spectral_field(const std::string& header_path, const std::string& payload_path) {
    const FieldHeader h = read_field_header(header_path);
    const GridSpec grid(h.n);
    if (h.kind == FieldKind::kReal) return to_spectral(RealField(grid, read_doubles(payload_path, grid.size())));
    const auto raw = read_doubles(payload_path, grid.size() * 2);
    std::vector<std::complex<double>> coeffs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) coeffs[i] = {raw[2 * i], raw[2 * i + 1]};
    return SpectralField(grid, std::move(coeffs));
}

}  // namespace turbogp
