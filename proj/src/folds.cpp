#include "nml/folds.hpp"

#include <algorithm>

#include "nml/errors.hpp"

namespace nml {

std::vector<FoldSpec> make_folds(std::size_t grid_len, bool scaled) {
    std::vector<FoldSpec> folds;

    if (!scaled) {
        if (grid_len < 500)
            throw DataError("make_folds: grid of " + std::to_string(grid_len) +
                            " weeks is too short for reference-sized folds; pass scaled=true");
        // Anchored trains 288/324/360/396 expanding by the 36-week validation
        // block; the last test absorbs up to 64 weeks of the remaining grid.
        const std::size_t train0 = 288, val = 36, test = 52;
        for (int k = 0; k < 4; ++k) {
            FoldSpec f;
            f.fold_id = k + 1;
            f.train_end = train0 + static_cast<std::size_t>(k) * val;
            f.val_end = f.train_end + val;
            std::size_t t = test;
            if (k == 3) t = std::clamp(grid_len - f.val_end, test, static_cast<std::size_t>(64));
            f.test_end = f.val_end + t;
            folds.push_back(f);
        }
        if (folds.back().test_end > grid_len)
            throw DataError("make_folds: reference folds exceed the grid");
        return folds;
    }

    // Proportional layout: same 288/36/52 shape compressed to the grid.
    double unit = static_cast<double>(grid_len) / 546.0;
    auto scale = [&](std::size_t weeks, std::size_t min_weeks) {
        return std::max(min_weeks, static_cast<std::size_t>(weeks * unit));
    };
    const std::size_t train0 = scale(288, 16);
    const std::size_t val = scale(36, 4);
    const std::size_t test = scale(52, 4);
    for (int k = 0; k < 4; ++k) {
        FoldSpec f;
        f.fold_id = k + 1;
        f.train_end = train0 + static_cast<std::size_t>(k) * val;
        f.val_end = f.train_end + val;
        f.test_end = f.val_end + test;
        folds.push_back(f);
    }
    if (folds.back().test_end > grid_len)
        throw DataError("make_folds: grid of " + std::to_string(grid_len) +
                        " weeks is too short even for scaled folds");
    return folds;
}

} // namespace nml
