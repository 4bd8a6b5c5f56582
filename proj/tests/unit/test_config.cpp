#include "doctest.h"

#include <string>

#include "msteer/config.hpp"

using namespace msteer;

namespace {

std::string code_of(const std::string& text) {
    try {
        parse_config(text);
        return "none";
    } catch (const Error& e) {
        return to_string(e.code());
    }
}

std::string message_of(const std::string& text) {
    try {
        parse_config(text);
        return {};
    } catch (const Error& e) {
        return e.what();
    }
}

const char* kDensityBase = R"(mode = density
order = 2
horizon = 3
coeffs = uniform(0.5, 0.7)
initial = gaussian(0, 1)
terminal = gaussian(1, 2)
)";

} // namespace

TEST_CASE("density grammar parses single families") {
    DensitySpec g = parse_density("gaussian(0, 2)");
    REQUIRE(g.components().size() == 1);
    CHECK(g.components()[0].family == Family::Gaussian);
    CHECK(g.components()[0].loc == 0.0);
    CHECK(g.components()[0].scale == 2.0);
    CHECK(g.components()[0].weight == 1.0);

    DensitySpec l = parse_density("laplace(-3, 1)");
    CHECK(l.components()[0].family == Family::Laplace);
    CHECK(l.components()[0].loc == -3.0);

    DensitySpec gl = parse_density("genlogistic(1, 2)");
    CHECK(gl.components()[0].family == Family::GenLogistic);
    CHECK(gl.components()[0].shape == 2.0);

    DensitySpec u = parse_density("uniform(-1, 1)");
    CHECK(u.components()[0].family == Family::Uniform);
    CHECK(u.components()[0].lo == -1.0);
    CHECK(u.components()[0].hi == 1.0);

    DensitySpec c = parse_density("cauchy(0.5, 2)");
    CHECK(c.components()[0].family == Family::Cauchy);

    DensitySpec p = parse_density("point(1.5)");
    CHECK(p.components()[0].family == Family::PointMass);
    CHECK(p.components()[0].loc == 1.5);

    DensitySpec t = parse_density("truncated_gaussian(0, 1, -2, 2)");
    CHECK(t.components()[0].family == Family::TruncatedGaussian);
    CHECK(t.components()[0].lo == -2.0);
    CHECK(t.components()[0].hi == 2.0);
}

TEST_CASE("density grammar parses weighted mixtures") {
    DensitySpec mix = parse_density("0.5*gaussian(0, 2) + 0.5*gaussian(-1, 2)");
    REQUIRE(mix.components().size() == 2);
    CHECK(mix.components()[0].weight == 0.5);
    CHECK(mix.components()[0].loc == 0.0);
    CHECK(mix.components()[1].weight == 0.5);
    CHECK(mix.components()[1].loc == -1.0);

    // whitespace is free around terms, weights and arguments
    DensitySpec spaced = parse_density("  0.4 * genlogistic( 1 , 2 )+0.6*genlogistic(-2, 3) ");
    REQUIRE(spaced.components().size() == 2);
    CHECK(spaced.components()[0].weight == 0.4);
    CHECK(spaced.components()[1].shape == 3.0);

    // scientific notation in arguments
    DensitySpec sci = parse_density("gaussian(1e-1, 2.5e0)");
    CHECK(sci.components()[0].loc == doctest::Approx(0.1));
    CHECK(sci.components()[0].scale == doctest::Approx(2.5));
}

TEST_CASE("density grammar rejects malformed input") {
    CHECK_THROWS_AS(parse_density(""), Error);
    CHECK_THROWS_AS(parse_density("gaussian"), Error);
    CHECK_THROWS_AS(parse_density("gaussian(0"), Error);
    CHECK_THROWS_AS(parse_density("gaussian(0, 1) extra"), Error);
    CHECK_THROWS_AS(parse_density("unknown(0, 1)"), Error);
    CHECK_THROWS_AS(parse_density("gaussian(0)"), Error);
    CHECK_THROWS_AS(parse_density("gaussian(0, 1, 2)"), Error);
    CHECK_THROWS_AS(parse_density("0.5*0.5*gaussian(0, 1)"), Error);
    CHECK_THROWS_AS(parse_density("gaussian(zero, 1)"), Error);
    CHECK_THROWS_AS(parse_density("+ gaussian(0, 1) +"), Error);

    // weights must sum to one (semantics, not syntax)
    try {
        parse_density("0.5*gaussian(0, 1) + 0.3*gaussian(1, 1)");
        FAIL("weights 0.8 must be rejected");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WeightSumInvalid);
    }
}

TEST_CASE("full density mode config") {
    RunConfig cfg = parse_config(R"(# steering run
mode = density
order = 2
horizon = 5           # steps
coeffs = uniform(0.55, 0.65)
initial = 0.5*gaussian(0, 2) + 0.5*gaussian(-1, 2)
terminal = gaussian(1, 2)
constraint = interval(-6, 6)
seed = 99
output = /tmp/some_dir
nodes = 256
tol = 1e-8
heavy_tail = true
history = false
)");
    CHECK(cfg.mode == SteeringMode::Density);
    CHECK(cfg.order == 2);
    CHECK(cfg.horizon == 5);
    CHECK(cfg.coeffs.kind == CoeffKind::Uniform);
    CHECK(cfg.coeffs.lo == 0.55);
    CHECK(cfg.coeffs.hi == 0.65);
    REQUIRE(cfg.initial.has_value());
    CHECK(cfg.initial->components().size() == 2);
    REQUIRE(cfg.terminal.has_value());
    CHECK(cfg.constraint.bounded);
    CHECK(cfg.constraint.lo == -6.0);
    CHECK(cfg.seed == 99u);
    CHECK(cfg.output == "/tmp/some_dir");
    CHECK(cfg.nodes == 256);
    CHECK(cfg.tol == 1e-8);
    CHECK(cfg.heavy_tail);
    CHECK_FALSE(cfg.history);
    CHECK_FALSE(cfg.check_only);
}

TEST_CASE("occupation mode config with explicit coefficients") {
    RunConfig cfg = parse_config(R"(mode = occupation
order = 2
horizon = 3
coeffs = list(0.5, 0.6, 0.7)
initial = gaussian(0, 1)
terminal = gaussian(1, 2)
agents = 1000
)");
    CHECK(cfg.mode == SteeringMode::Occupation);
    CHECK(cfg.coeffs.kind == CoeffKind::Explicit);
    REQUIRE(cfg.coeffs.values.size() == 3);
    CHECK(cfg.coeffs.values[1] == 0.6);
    CHECK(cfg.agents == 1000);
    CHECK_FALSE(cfg.constraint.bounded);
    // defaults
    CHECK(cfg.nodes == 512);
    CHECK(cfg.tol == 1e-9);
    CHECK(cfg.seed == 0u);
    CHECK(cfg.output == "out");
    CHECK(cfg.history);
}

TEST_CASE("occupation mode accepts a sample file instead of a density") {
    RunConfig cfg = parse_config(R"(mode = occupation
order = 2
horizon = 2
coeffs = list(0.5, 0.5)
initial_samples = /tmp/xs.txt
terminal = gaussian(1, 2)
)");
    CHECK_FALSE(cfg.initial.has_value());
    REQUIRE(cfg.initial_samples.has_value());
    CHECK(*cfg.initial_samples == "/tmp/xs.txt");
}

TEST_CASE("syntax errors carry the line number") {
    const std::string bad_pair = "mode = density\norder 2\n";
    CHECK(code_of(bad_pair) == "ParseError");
    CHECK(message_of(bad_pair).find("line 2") != std::string::npos);

    const std::string bad_value = "mode = density\norder = 2\nhorizon = abc\n";
    CHECK(code_of(bad_value) == "ParseError");

    const std::string unknown = "mode = density\nwhat = 7\n";
    CHECK(code_of(unknown) == "ParseError");
    CHECK(message_of(unknown).find("line 2") != std::string::npos);
    CHECK(message_of(unknown).find("unknown key") != std::string::npos);

    const std::string no_value = "mode =\n";
    CHECK(code_of(no_value) == "ParseError");

    const std::string bad_bool = std::string(kDensityBase) + "heavy_tail = maybe\n";
    CHECK(code_of(bad_bool) == "ParseError");

    const std::string bad_mode = "mode = chaos\n";
    CHECK(code_of(bad_mode) == "ParseError");
}

TEST_CASE("validation collects every violation at once") {
    const std::string msg = message_of("seed = 4\n");
    CHECK(msg.find("mode is required") != std::string::npos);
    CHECK(msg.find("order is required") != std::string::npos);
    CHECK(msg.find("horizon is required") != std::string::npos);
    CHECK(msg.find("terminal density is required") != std::string::npos);
    CHECK(code_of("seed = 4\n") == "ValidationError");
}

TEST_CASE("validation rules") {
    // horizon and order must be positive
    CHECK(code_of("mode = density\norder = 0\nhorizon = 3\ninitial = gaussian(0,1)\n"
                  "terminal = gaussian(1,2)\n") == "ValidationError");
    CHECK(code_of("mode = density\norder = 2\nhorizon = 0\ninitial = gaussian(0,1)\n"
                  "terminal = gaussian(1,2)\n") == "ValidationError");

    // coefficient draw range stays inside (0,1)
    CHECK(code_of("mode = density\norder = 2\nhorizon = 3\ncoeffs = uniform(0.5, 1.2)\n"
                  "initial = gaussian(0,1)\nterminal = gaussian(1,2)\n") == "ValidationError");
    CHECK(code_of("mode = density\norder = 2\nhorizon = 3\ncoeffs = uniform(0.7, 0.5)\n"
                  "initial = gaussian(0,1)\nterminal = gaussian(1,2)\n") == "ValidationError");

    // explicit coefficient list length must match the horizon
    CHECK(code_of("mode = density\norder = 2\nhorizon = 3\ncoeffs = list(0.5, 0.6)\n"
                  "initial = gaussian(0,1)\nterminal = gaussian(1,2)\n") == "ValidationError");

    // density mode needs an initial density and no sample file
    CHECK(code_of("mode = density\norder = 2\nhorizon = 3\nterminal = gaussian(1,2)\n") ==
          "ValidationError");
    CHECK(code_of("mode = density\norder = 2\nhorizon = 3\ninitial = gaussian(0,1)\n"
                  "initial_samples = xs.txt\nterminal = gaussian(1,2)\n") == "ValidationError");

    // occupation mode needs exactly one initial source and a crowd size
    CHECK(code_of("mode = occupation\norder = 2\nhorizon = 3\nterminal = gaussian(1,2)\n") ==
          "ValidationError");
    CHECK(code_of("mode = occupation\norder = 2\nhorizon = 3\ninitial = gaussian(0,1)\n"
                  "initial_samples = xs.txt\nterminal = gaussian(1,2)\n") == "ValidationError");
    CHECK(code_of("mode = occupation\norder = 2\nhorizon = 3\ninitial = gaussian(0,1)\n"
                  "terminal = gaussian(1,2)\n") == "ValidationError");

    // numeric floors
    CHECK(code_of(std::string(kDensityBase) + "nodes = 32\n") == "ValidationError");
    CHECK(code_of(std::string(kDensityBase) + "tol = 0\n") == "ValidationError");

    // endpoints must have finite moments
    CHECK(code_of("mode = density\norder = 2\nhorizon = 3\ninitial = cauchy(0,1)\n"
                  "terminal = gaussian(1,2)\n") == "ValidationError");
    CHECK(code_of("mode = density\norder = 2\nhorizon = 3\ninitial = gaussian(0,1)\n"
                  "terminal = cauchy(0,1)\n") == "ValidationError");

    // constraint interval must be ordered
    CHECK(code_of(std::string(kDensityBase) + "constraint = interval(2, -2)\n") ==
          "ValidationError");

    // a correct config parses cleanly
    CHECK(code_of(kDensityBase) == "none");
}

TEST_CASE("comments and blank lines are ignored") {
    RunConfig cfg = parse_config(R"(
# full-line comment

mode = density    # trailing comment
order = 2
horizon = 1
coeffs = list(0.5)
initial = gaussian(0, 1)

terminal = gaussian(1, 2)   # done
)");
    CHECK(cfg.mode == SteeringMode::Density);
    CHECK(cfg.horizon == 1);
    CHECK(cfg.coeffs.values.size() == 1);
}
