#pragma once

#include <stdexcept>
#include <string>

namespace hamadv {

enum class Errc {
    unsupported_order,
    dimension_mismatch,
    turning_point,
    root_bracket_failure,
    stencil_undefined,
    degenerate_polygon,
    map_undefined,
    energy_not_conserved,
    nonpositive_c,
    no_room_for_bump,
    incomplete_certificate,
    parse_error,
    validation_error,
    io_error,
};

const char* errc_name(Errc c);

/// Domain error carrying one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::unsupported_order: return "unsupported_order";
        case Errc::dimension_mismatch: return "dimension_mismatch";
        case Errc::turning_point: return "turning_point";
        case Errc::root_bracket_failure: return "root_bracket_failure";
        case Errc::stencil_undefined: return "stencil_undefined";
        case Errc::degenerate_polygon: return "degenerate_polygon";
        case Errc::map_undefined: return "map_undefined";
        case Errc::energy_not_conserved: return "energy_not_conserved";
        case Errc::nonpositive_c: return "nonpositive_c";
        case Errc::no_room_for_bump: return "no_room_for_bump";
        case Errc::incomplete_certificate: return "incomplete_certificate";
        case Errc::parse_error: return "parse_error";
        case Errc::validation_error: return "validation_error";
        case Errc::io_error: return "io_error";
    }
    return "unknown";
}

} // namespace hamadv
