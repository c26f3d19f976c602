#pragma once

#include <cstdint>

#include <envydiv/preferences.hpp>

namespace envydiv {

/// Old-style preferences on r tiles turned into new-style preferences on C1.
/// `epsilon`: tile r shorter than this (but not degenerate) must have score 0.
/// Samples the source first and throws PreconditionBreach on a witness; the
/// returned oracle also throws if a query lands on one.
PreferencePtr psi(PreferencePtr source, double epsilon, int precondition_samples = 512, std::uint64_t seed = 1);

/// Throws PreconditionBreach if some sampled cut has tile r non-degenerate,
/// shorter than epsilon and preferred.
void check_psi_precondition(const PreferenceMatrix &source, double epsilon, int samples, std::uint64_t seed);

enum class EliminationOrder { from_left, from_right };

/// Drops r-1 repeated cut points (values that also occur as another point
/// or as an end of [0,1]), scanning in the given direction. The result is
/// partition-equivalent to the input. Throws InvalidConfiguration when the
/// cut has fewer than r-1 degenerate tiles.
Cut eliminate_superfluous(const Cut &cut, int r, EliminationOrder order = EliminationOrder::from_left);

/// Old-style preferences on r tiles turned into new-style preferences on C2.
/// With `check_consistency`, every query also evaluates the right-hand
/// elimination and throws PartitionEquivalenceViolation if they disagree.
PreferencePtr phi(PreferencePtr source, bool check_consistency = true);

} // namespace envydiv
