#pragma once

#include <stdexcept>
#include <string>

namespace brlab {

// Error taxonomy. Every failure mode carries a message naming the offending
// quantity (node, parameter, sample point) so callers can report it verbatim.

struct contract_error : std::runtime_error {
  explicit contract_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user-supplied parameter (out-of-range exponent, odd grid size, ...).
struct parameter_error : contract_error {
  using contract_error::contract_error;
};

// Operands live on different grids or in the wrong space.
struct grid_mismatch_error : contract_error {
  using contract_error::contract_error;
};

// Curve fails an admissibility hypothesis; message names the sample point.
struct admissibility_error : contract_error {
  using contract_error::contract_error;
};

// Curve/box/case combination is inconsistent.
struct classification_error : contract_error {
  using contract_error::contract_error;
};

// Argument outside the domain where a map is defined (inverse ranges, cones).
struct range_error : contract_error {
  using contract_error::contract_error;
};
struct cone_domain_error : range_error {
  using range_error::range_error;
};

// A quantity that must stay away from zero degenerated.
struct degeneracy_error : contract_error {
  using contract_error::contract_error;
};

// Grid too coarse for the requested scale.
struct resolution_error : contract_error {
  using contract_error::contract_error;
};

// Input field or region is empty/degenerate.
struct degenerate_input_error : contract_error {
  using contract_error::contract_error;
};

// Symbol evaluated to a non-finite value; message names the node.
struct symbol_evaluation_error : contract_error {
  using contract_error::contract_error;
};

// Serialized field file is malformed.
struct format_error : contract_error {
  using contract_error::contract_error;
};

// Numerical quadrature failed to converge under refinement.
struct quadrature_error : contract_error {
  using contract_error::contract_error;
};

// A checked inequality failed with a genuine witness.
struct domination_failure_error : contract_error {
  using contract_error::contract_error;
};

// A window leaks outside the region it must be confined to.
struct support_error : contract_error {
  using contract_error::contract_error;
};

// A geometric lemma check found a violating witness.
struct lemma_failure_error : contract_error {
  using contract_error::contract_error;
};

// Division by a value too close to zero in a ratio map.
struct singularity_error : contract_error {
  using contract_error::contract_error;
};

// Rectangle family inconsistent with the grid.
struct family_error : contract_error {
  using contract_error::contract_error;
};

// Regression input unusable (too few rows, non-positive values).
struct fit_error : contract_error {
  using contract_error::contract_error;
};

// Experiment configuration invalid.
struct config_error : contract_error {
  using contract_error::contract_error;
};

}  // namespace brlab
