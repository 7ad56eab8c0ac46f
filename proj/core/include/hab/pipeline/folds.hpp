#pragma once

#include <span>
#include <string>
#include <vector>

#include "hab/common.hpp"

namespace hab::pipeline {

/// Fold ids aligned with the uid list the assignment was built from.
struct FoldAssignment {
    int k = 5;
    std::uint64_t seed = 1;
    std::vector<std::string> uids;
    std::vector<int> fold_of;  // same order as uids

    std::size_t size() const { return uids.size(); }
};

/// Seeded Fisher-Yates shuffle, then round-robin assignment; fold sizes
/// differ by at most one. Identical output on every machine.
FoldAssignment kfold_split(std::span<const std::string> train_uids, int k = 5,
                           std::uint64_t seed = 1);

/// Shuffles and round-robins within each stratum key instead of globally.
FoldAssignment kfold_split_stratified(std::span<const std::string> train_uids,
                                      std::span<const int> strata, int k = 5,
                                      std::uint64_t seed = 1);

}  // namespace hab::pipeline
