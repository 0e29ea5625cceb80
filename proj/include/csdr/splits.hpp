#pragma once
// Deterministic dataset partitioning: a fixed-size held-out test set first,
// then a train/validation split of the remainder (90/10 by default, or an
// explicit validation count).

#include <cstdint>
#include <string>
#include <vector>

namespace csdr {

struct DatasetSplit {
    std::vector<std::string> train, val, test;
    std::uint64_t seed = 0;
};

// n_val < 0 selects the default 10% validation share
DatasetSplit make_splits(const std::vector<std::string>& ids, std::uint64_t seed, int n_test = 20,
                         int n_val = -1);

} // namespace csdr
