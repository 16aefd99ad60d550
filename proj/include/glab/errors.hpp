#pragma once

#include <stdexcept>
#include <string>

namespace glab {

// Error codes for every failure mode the library reports.  Each operation
// documents which codes it can raise.
enum class errc {
  duplicate_edge,
  self_loop,
  vertex_out_of_range,
  empty_edge_set,
  size_out_of_range,
  instance_too_large,
  non_positive_parameter,
  degree_too_small,
  not_antiferromagnetic,
  fixed_point_no_converge,
  empty_support,
  infeasible_pinning,
  negative_function_value,
  support_mismatch,
  too_few_free_vertices,
  infeasible_face,
  level_too_high,
  parameter_out_of_range,
  degenerate_entropy,
  infeasible_state,
  not_ergodic,
  degenerate_kl,
  degenerate_denominator,
  theta_too_large,
  n_too_small,
  not_a_tree,
  path_tree_too_large,
  config_parse,
};

const char* errc_name(errc code);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace glab
