#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orgrad/learner.hpp"
#include "orgrad/sampling.hpp"

namespace orgrad {

struct RatingRecord {
    std::int64_t user = 0;  // 1-based, as in the file
    std::int64_t item = 0;  // 1-based
    double rating = 0.0;
    std::int64_t timestamp = 0;

    friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

// MovieLens 100k `u.data` layout: user<TAB>item<TAB>rating<TAB>timestamp, one
// record per line. Malformed lines raise with their line number.
[[nodiscard]] std::vector<RatingRecord> load_ratings(const std::string& path);

// Inverse of load_ratings; integral ratings print without a decimal point so
// a parsed file round-trips byte for byte.
void save_ratings(const std::string& path, const std::vector<RatingRecord>& records);

struct RatingSplit {
    std::vector<RatingRecord> train, test;
};

// Stable sort by timestamp (file order breaks ties), earliest `train_count`
// records to train, the rest to test. Requires at least train_count + 1.
[[nodiscard]] RatingSplit chronological_split(std::vector<RatingRecord> records,
                                              std::int64_t train_count = 80000);

struct MovielensOptions {
    Dims dims = {1000, 1700};
    std::vector<std::int64_t> ranks = {2, 5, 10, 15};
    std::vector<double> eta_grid = {2e-4, 5e-4, 1e-3};  // online, per step
    std::vector<double> offline_eta_grid = {0.05, 0.1, 0.2};  // per batch iteration
    std::int64_t offline_iters = 100;
    std::int64_t holdout = 8000;  // train tail held out to pick eta
};

struct MovielensCell {
    std::string method;  // "online" | "offline"
    std::int64_t rank = 0;
    double eta = 0.0;  // grid choice that won on the holdout
    double mae = 0.0;  // on the test split, predictions clipped to [1, 5]
};

struct MovielensReport {
    double train_mean = 0.0;
    double baseline_mae = 0.0;  // constant train-mean predictor
    std::vector<MovielensCell> cells;
};

// Ratings are centered by the train mean, learned as the entry design on a
// dims[0] x dims[1] matrix with linear loss, and the mean is added back (and
// the value clipped to [1, 5]) at prediction time. mode: online | offline |
// both.
[[nodiscard]] MovielensReport movielens_eval(const RatingSplit& split,
                                             const std::string& mode,
                                             const MovielensOptions& opt);

// One row per method, one column per rank, baseline and chosen etas in the
// comments.
void write_movielens_csv(const std::string& path, const std::vector<std::string>& comments,
                         const MovielensReport& report, const std::vector<std::int64_t>& ranks);

// Test-split MAE of a fixed estimate (plus mean, clipped), exposed for tests.
[[nodiscard]] double rating_mae(const DenseTensor& estimate, double train_mean,
                                const std::vector<RatingRecord>& test);

}  // namespace orgrad
