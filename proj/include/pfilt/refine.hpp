#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pfilt/filter.hpp"
#include "pfilt/liering.hpp"
#include "pfilt/matalgebra.hpp"

namespace pfilt {

enum class RingChoice { adjoint, centroid, derivation, left_scalar, right_scalar };

const char* ring_name(RingChoice r);

/// Solution space of the defining linear identities of the chosen ring of a
/// biadditive map, as block-diagonal matrices. Closed under products for all
/// choices except derivation, whose associative envelope is the caller's step.
MatAlgebra compute_ring(const BilinearMap& b, RingChoice which);

/// New characteristic subgroups between f_s and its boundary: the pullbacks
/// of the radical chain L_s >= L_s J >= L_s J^2 >= ... acting through the
/// chosen ring of the graded bracket at (s, t). Empty when the ring is
/// semisimple.
std::vector<Subgroup> radical_refinement(const Filter& f, const MonoidIndex& s,
                                         const MonoidIndex& t, RingChoice which);

enum class Policy { first, random, adjoint, derivation, sweep };

Policy policy_from_string(const std::string& s);
const char* policy_name(Policy p);

struct IterationStat {
  std::string ring;
  std::string bracket_s;
  std::string bracket_t;
  std::size_t ring_dim = 0;
  std::size_t radical_dim = 0;
  std::size_t subgroups_added = 0;
  double seconds = 0;
  std::vector<Subgroup> inserted;  // the radical chain, outermost first
};

struct RefinementReport {
  unsigned iterations = 0;
  std::size_t subgroups_added = 0;
  std::size_t initial_length = 0;
  std::size_t final_length = 0;
  bool hit_cap = false;
  double total_seconds = 0;
  std::vector<IterationStat> per_iteration;

  double growth() const {
    return initial_length ? static_cast<double>(final_length) / static_cast<double>(initial_length)
                          : 0.0;
  }
};

/// One refinement pass: pick a bracket and ring per policy, insert the
/// radical chain, regenerate, and fill. Returns the unchanged filter with
/// flag false when every candidate algebra is semisimple.
std::pair<Filter, bool> refine_once(const Filter& f, Policy policy, std::mt19937_64& rng,
                                    IterationStat* stat = nullptr);

/// Iterate refine_once to a fixpoint or the iteration cap (default 64).
std::pair<Filter, RefinementReport> refine_loop(const Filter& f, Policy policy,
                                                std::uint64_t seed, unsigned max_iter = 64);

std::string report_to_json(const RefinementReport& r);
extern const char* kReportCsvHeader;
std::string report_csv_row(const std::string& group_name, const PcGroupPtr& g,
                           unsigned group_p_class, const RefinementReport& r);

}  // namespace pfilt
