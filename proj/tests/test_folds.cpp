#include <doctest.h>

#include "nml/errors.hpp"
#include "nml/folds.hpp"

using namespace nml;

TEST_CASE("reference folds on a 546-week grid") {
    auto folds = make_folds(546);
    REQUIRE(folds.size() == 4);
    for (std::size_t k = 0; k < folds.size(); ++k) {
        const FoldSpec& f = folds[k];
        CHECK(f.fold_id == static_cast<int>(k) + 1);
        // Contiguity within the fold.
        CHECK(f.train_end > 0);
        CHECK(f.val_end > f.train_end);
        CHECK(f.test_end > f.val_end);
        // Window brackets.
        CHECK(f.train_len() >= 288);
        CHECK(f.train_len() <= 396);
        CHECK(f.val_len() >= 36);
        CHECK(f.val_len() <= 40);
        CHECK(f.test_len() >= 52);
        CHECK(f.test_len() <= 64);
        // Expanding anchor: the next train absorbs train + validation.
        if (k > 0) CHECK(f.train_end >= folds[k - 1].val_end);
    }
    CHECK(folds[0].train_len() == 288);
    CHECK(folds.back().test_end <= 546);
}

TEST_CASE("scaled folds keep the invariants on a short grid") {
    auto folds = make_folds(100, true);
    REQUIRE(folds.size() == 4);
    for (std::size_t k = 0; k < folds.size(); ++k) {
        const FoldSpec& f = folds[k];
        CHECK(f.val_end > f.train_end);
        CHECK(f.test_end > f.val_end);
        if (k > 0) CHECK(f.train_end >= folds[k - 1].val_end);
    }
    CHECK(folds.back().test_end <= 100);
}

TEST_CASE("fold 2 train contains fold 1 train plus validation by construction") {
    auto folds = make_folds(546);
    CHECK(folds[1].train_end == folds[0].val_end);
}

TEST_CASE("short grid without scaling errors") {
    CHECK_THROWS_AS(make_folds(499), DataError);
    CHECK_THROWS_AS(make_folds(10, true), DataError);
}
