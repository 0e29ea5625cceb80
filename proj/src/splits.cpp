#include "csdr/splits.hpp"

#include <stdexcept>

#include "csdr/rng.hpp"

namespace csdr {

DatasetSplit make_splits(const std::vector<std::string>& ids, std::uint64_t seed, int n_test,
                         int n_val) {
    if (n_test < 1) throw std::invalid_argument("make_splits: need a positive test count");
    if (int(ids.size()) < n_test + 10)
        throw std::invalid_argument("make_splits: too few ids for the requested test size");
    std::vector<std::string> pool = ids;
    Rng rng = substream(seed, "splits");
    shuffle(pool, rng);

    DatasetSplit s;
    s.seed = seed;
    s.test.assign(pool.begin(), pool.begin() + n_test);
    const std::size_t rest = pool.size() - n_test;
    std::size_t n_train;
    if (n_val < 0) {
        n_train = rest * 9 / 10;
    } else {
        if (std::size_t(n_val) >= rest)
            throw std::invalid_argument("make_splits: validation size leaves no training data");
        n_train = rest - std::size_t(n_val);
    }
    s.train.assign(pool.begin() + n_test, pool.begin() + n_test + n_train);
    s.val.assign(pool.begin() + n_test + n_train, pool.end());
    return s;
}

} // namespace csdr
