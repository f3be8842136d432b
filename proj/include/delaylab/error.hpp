#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace delaylab {

/// Stable error identifiers. The string form is part of the service API.
enum class Errc {
    invalid_argument,
    non_finite_argument,
    derivative_order_too_large,
    degenerate_placement_system,
    roots_must_be_distinct,
    grid_too_large,
    contour_through_root,
    certification_failed,
    neutral_chain_unbounded,
    bound_unavailable_for_neutral,
    multiplicity_condition_violated,
    order_exceeds_cap,
    factorization_not_representable,
    hypergeometric_form_unavailable,
    argument_outside_series_regime,
    simulation_restricted_to_retarded,
    step_too_large,
    signal_too_short,
    selection_without_result,
    delay_below_physical_minimum,
    no_admissible_solution,
    limit_exceeded,
    malformed_request,
    not_found,
};

/// Coarse class of an error: drives CLI exit codes and HTTP status.
enum class ErrorKind { validation, numeric, limit };

constexpr std::string_view errc_name(Errc c) noexcept {
    switch (c) {
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::non_finite_argument: return "non_finite_argument";
        case Errc::derivative_order_too_large: return "derivative_order_too_large";
        case Errc::degenerate_placement_system: return "degenerate_placement_system";
        case Errc::roots_must_be_distinct: return "roots_must_be_distinct";
        case Errc::grid_too_large: return "grid_too_large";
        case Errc::contour_through_root: return "contour_through_root";
        case Errc::certification_failed: return "certification_failed";
        case Errc::neutral_chain_unbounded: return "neutral_chain_unbounded";
        case Errc::bound_unavailable_for_neutral: return "bound_unavailable_for_neutral";
        case Errc::multiplicity_condition_violated: return "multiplicity_condition_violated";
        case Errc::order_exceeds_cap: return "order_exceeds_cap";
        case Errc::factorization_not_representable: return "factorization_not_representable";
        case Errc::hypergeometric_form_unavailable: return "hypergeometric_form_unavailable";
        case Errc::argument_outside_series_regime: return "argument_outside_series_regime";
        case Errc::simulation_restricted_to_retarded: return "simulation_restricted_to_retarded";
        case Errc::step_too_large: return "step_too_large";
        case Errc::signal_too_short: return "signal_too_short";
        case Errc::selection_without_result: return "selection_without_result";
        case Errc::delay_below_physical_minimum: return "delay_below_physical_minimum";
        case Errc::no_admissible_solution: return "no_admissible_solution";
        case Errc::limit_exceeded: return "limit_exceeded";
        case Errc::malformed_request: return "malformed_request";
        case Errc::not_found: return "not_found";
    }
    return "unknown";
}

constexpr ErrorKind errc_kind(Errc c) noexcept {
    switch (c) {
        case Errc::degenerate_placement_system:
        case Errc::contour_through_root:
        case Errc::certification_failed:
        case Errc::multiplicity_condition_violated:
        case Errc::factorization_not_representable:
        case Errc::hypergeometric_form_unavailable:
        case Errc::signal_too_short:
        case Errc::no_admissible_solution:
            return ErrorKind::numeric;
        case Errc::grid_too_large:
        case Errc::limit_exceeded:
            return ErrorKind::limit;
        default:
            return ErrorKind::validation;
    }
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }
    [[nodiscard]] ErrorKind kind() const noexcept { return errc_kind(code_); }

private:
    Errc code_;
};

}  // namespace delaylab
