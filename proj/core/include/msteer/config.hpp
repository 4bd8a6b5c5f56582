#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msteer/engine.hpp"
#include "msteer/moments.hpp"

namespace msteer {

enum class CoeffKind { Uniform, Explicit };

// Where the dynamics coefficients a(0..K-1) come from: seeded i.i.d.
// uniform draws, or an explicit list.
struct CoeffSource {
    CoeffKind kind = CoeffKind::Uniform;
    double lo = 0.5;
    double hi = 0.7;
    std::vector<double> values;
};

struct RunConfig {
    SteeringMode mode = SteeringMode::Density;
    int order = 0;
    int horizon = 0;
    CoeffSource coeffs;
    std::optional<DensitySpec> initial;
    std::optional<std::string> initial_samples; // file with one value per line
    std::optional<DensitySpec> terminal;
    Support constraint; // real line unless configured
    int agents = 0;
    std::uint64_t seed = 0;
    std::string output = "out";
    int nodes = 512;
    double tol = 1e-9;
    bool heavy_tail = false;
    bool history = true;
    bool check_only = false; // plan only, skip realization (set by the CLI flag)
};

// Parse the key = value run configuration (see README for the schema).
// Syntax problems raise ParseError with the line number; semantic problems
// raise one ValidationError listing every violation.
RunConfig parse_config(const std::string& text);

// Density mixture grammar used for the initial/terminal keys, e.g.
// "0.5*gaussian(0,2) + 0.5*gaussian(-1,2)".
DensitySpec parse_density(const std::string& text);

} // namespace msteer
