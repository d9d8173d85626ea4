#pragma once

#include <stdexcept>
#include <string>

namespace formal {

enum class Errc {
    ZeroLeading,
    InsufficientPrecision,
    EmptyComposition,
    NotInFiltration,
    NonsplitField,
    Irreducible,
    NotRegular,
    GcdViolation,
    SingularGauge,
    NotSplit,
    ShapeMismatch,
    ResidueNonzero,
    DuplicatePoints,
    UnsupportedDepth,
    Parse,
};

inline const char* errc_name(Errc c) {
    switch (c) {
    case Errc::ZeroLeading: return "ZERO_LEADING";
    case Errc::InsufficientPrecision: return "INSUFFICIENT_PRECISION";
    case Errc::EmptyComposition: return "EMPTY_COMPOSITION";
    case Errc::NotInFiltration: return "NOT_IN_FILTRATION";
    case Errc::NonsplitField: return "NONSPLIT_FIELD";
    case Errc::Irreducible: return "IRREDUCIBLE";
    case Errc::NotRegular: return "NOT_REGULAR";
    case Errc::GcdViolation: return "GCD_VIOLATION";
    case Errc::SingularGauge: return "SINGULAR_GAUGE";
    case Errc::NotSplit: return "NOT_SPLIT";
    case Errc::ShapeMismatch: return "SHAPE_MISMATCH";
    case Errc::ResidueNonzero: return "RESIDUE_NONZERO";
    case Errc::DuplicatePoints: return "DUPLICATE_POINTS";
    case Errc::UnsupportedDepth: return "UNSUPPORTED_DEPTH";
    case Errc::Parse: return "PARSE";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

    // For INSUFFICIENT_PRECISION: the absolute precision that would have sufficed, if known.
    int needed = 0;

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace formal
