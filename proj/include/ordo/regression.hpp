#pragma once

#include "ordo/features.hpp"

namespace ordo {

constexpr int kNumPredictors = 45;  // feature 46 is the target

/// One sampled node: where it came from plus its feature vector. The target
/// (feature 46, number of answers) must be present.
struct DataRow {
    std::string query_id;
    int node_id = -1;
    FeatureVector x;
};

struct Dataset {
    std::vector<DataRow> rows;
};

/// CSV with header `query_id,node_id,<46 canonical feature names>`.
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

/// Per-predictor mean and population standard deviation over training rows,
/// missing cells excluded. Frozen at fit time and reapplied verbatim at
/// inference.
struct NormalizationStats {
    std::array<double, kNumPredictors> mean{};
    std::array<double, kNumPredictors> stdev{};
    std::array<long, kNumPredictors> count{};  // present cells seen

    /// z-score of feature i (1-based) given a raw vector: missing or
    /// zero-std cells map to 0, i.e. to the column mean.
    double z(int i, const FeatureVector& f) const;
};

NormalizationStats compute_normalization(const Dataset& d,
                                         const std::array<bool, kNumPredictors>& mask);

/// log10(1 + answers), the regression target.
double transform_target(double answers);

struct RegressionModel {
    std::array<double, kNumPredictors> w{};
    std::array<bool, kNumPredictors> mask{};
    double intercept = 0;
    NormalizationStats norm;
    double train_rmse = 0;
    double r2 = 0;
    double adj_r2 = 0;
    bool ridge_fallback = false;
};

/// Least squares over the masked predictors via the normal equations.
/// Constant (zero-variance or all-missing) columns get weight 0 without
/// penalization; a genuinely singular system falls back to ridge with
/// lambda = 1e-8 * trace / dim and sets ridge_fallback.
RegressionModel fit_ols(const Dataset& d, const std::array<bool, kNumPredictors>& mask);

/// Model prediction for one raw feature vector.
double predict(const RegressionModel& m, const FeatureVector& f);

/// Root mean squared residual against transformed targets.
double rmse(const RegressionModel& m, const Dataset& d);

struct CvResult {
    double mean_rmse = 0;
    std::vector<double> fold_rmse;
};

/// Repeated random subsampling: `fraction` of rows train, rest test, stats
/// recomputed per split.
CvResult cross_validate_subsample(const Dataset& d,
                                  const std::array<bool, kNumPredictors>& mask,
                                  double fraction, int repeats, uint64_t seed);

/// k disjoint, exhaustive folds (sizes differ by at most one).
CvResult cross_validate_kfold(const Dataset& d,
                              const std::array<bool, kNumPredictors>& mask, int k,
                              uint64_t seed);

enum class SubsetMethod { forward, backward, exhaustive };

struct SubsetResult {
    std::array<bool, kNumPredictors> mask{};
    std::vector<double> r2_curve;  // best training R-squared per visited size
    std::vector<int> sizes;        // the sizes the curve entries refer to
};

/// Best-k feature search over `candidates` (1-based feature ids <= 45).
/// Exhaustive requires <= 20 candidates; all methods score subsets by
/// training R-squared computed from a single shared Gram matrix.
SubsetResult subset_select(const Dataset& d, const std::vector<int>& candidates, int k,
                           SubsetMethod method);

/// The ten deployed default predictors (mask form).
std::array<bool, kNumPredictors> default_mask();

/// Answerability score: masked feature extraction (probing only when the
/// mask demands it), stored-stats z-scoring, then intercept + sum w_i z_i.
double f_sl(const SearchGraph& g, const SearchNode& n, const KnowledgeBase& kb,
            const SearchConfig& cfg, const RegressionModel& m);

/// Text model file: one `<name> <mean> <std> <weight> <selected>` line per
/// predictor, then `intercept <v>`, `diag <rmse> <r2> <adj_r2>`,
/// `ridge <0|1>`. Round-trip exact.
void save_model(const RegressionModel& m, const std::string& path);
RegressionModel load_model(const std::string& path);

}  // namespace ordo
