#ifndef NML_FOLDS_HPP
#define NML_FOLDS_HPP

#include <cstddef>
#include <vector>

namespace nml {

/// Expanding-window partition of a weekly grid, as half-open index ranges.
/// Training is anchored at index 0; validation and test follow contiguously.
struct FoldSpec {
    int fold_id = 0;        // 1..4
    std::size_t train_end = 0; // train = [0, train_end)
    std::size_t val_end = 0;   // validation = [train_end, val_end)
    std::size_t test_end = 0;  // test = [val_end, test_end)

    std::size_t train_len() const { return train_end; }
    std::size_t val_len() const { return val_end - train_end; }
    std::size_t test_len() const { return test_end - val_end; }
};

/// Four walk-forward folds. Without `scaled`, the grid must span at least 500
/// weeks and windows follow the reference brackets (training expanding by one
/// validation block per fold, 36-week validation, 52-64 week test). With
/// `scaled`, windows shrink proportionally for short grids while keeping the
/// contiguity and expansion invariants.
std::vector<FoldSpec> make_folds(std::size_t grid_len, bool scaled = false);

} // namespace nml

#endif
