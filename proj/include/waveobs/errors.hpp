#pragma once

#include <stdexcept>
#include <string>

namespace waveobs {

// Error taxonomy. ValidationError: bad input (config, grid, hypothesis
// violations) -> CLI exit 2. PipelineError: a solve or pipeline stage
// failed (CFL breach, Newton divergence, domains not intersecting) ->
// CLI exit 3. Every message is prefixed with the module that raised it.

enum class ErrorCode {
    generic,
    expr_syntax,
    expr_unknown_identifier,
    expr_unbound_variable,
    expr_domain,
    hypothesis_violation,
    unknown_catalog_name,
    bad_geometry,
    bad_grid,
    config_schema,
    cfl_violation,
    nonconvergence,
    hyperbolicity_breach,
    boundary_degeneracy,
    mask_empty,
    no_intersection,
    out_of_window,
    too_few_samples,
    time_condition_failed,
    not_autonomous,
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string module, std::string what,
                    ErrorCode code = ErrorCode::generic)
        : std::runtime_error(module + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string module, std::string what,
                  ErrorCode code = ErrorCode::generic)
        : std::runtime_error(module + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace waveobs
