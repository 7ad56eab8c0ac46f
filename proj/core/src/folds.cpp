#include "hab/pipeline/folds.hpp"

#include <map>
#include <numeric>

namespace hab::pipeline {

FoldAssignment kfold_split(std::span<const std::string> train_uids, int k,
                           std::uint64_t seed) {
    if (k < 2) throw InputError("k must be at least 2");
    if (train_uids.size() < static_cast<std::size_t>(k))
        throw InputError("fewer uids (" + std::to_string(train_uids.size()) +
                         ") than folds (" + std::to_string(k) + ")");
    FoldAssignment out;
    out.k = k;
    out.seed = seed;
    out.uids.assign(train_uids.begin(), train_uids.end());
    out.fold_of.resize(train_uids.size());

    std::vector<std::uint32_t> order(train_uids.size());
    std::iota(order.begin(), order.end(), 0u);
    SplitMix64 rng(seed);
    rng.shuffle(order);
    for (std::size_t i = 0; i < order.size(); ++i)
        out.fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    return out;
}

FoldAssignment kfold_split_stratified(std::span<const std::string> train_uids,
                                      std::span<const int> strata, int k,
                                      std::uint64_t seed) {
    if (k < 2) throw InputError("k must be at least 2");
    if (strata.size() != train_uids.size())
        throw InputError("strata length must match uid count");
    if (train_uids.size() < static_cast<std::size_t>(k))
        throw InputError("fewer uids than folds");
    FoldAssignment out;
    out.k = k;
    out.seed = seed;
    out.uids.assign(train_uids.begin(), train_uids.end());
    out.fold_of.resize(train_uids.size());

    std::map<int, std::vector<std::uint32_t>> groups;  // ordered for determinism
    for (std::size_t i = 0; i < train_uids.size(); ++i)
        groups[strata[i]].push_back(static_cast<std::uint32_t>(i));
    SplitMix64 rng(seed);
    int next_fold = 0;
    for (auto& [key, members] : groups) {
        (void)key;
        rng.shuffle(members);
        for (auto idx : members) {
            out.fold_of[idx] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return out;
}

}  // namespace hab::pipeline
