#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace deckgen {

/// One page with its aggregated human score and geometry features.
struct RatedPage {
    std::string deck_id;
    std::string page_id;
    double y = 0;    // aggregated target on the 1-5 scale
    double rho = 0;  // occupied area fraction
    int m_eff = 0;   // effective region count
};

struct GridSpec {
    int m_min = 1;
    int m_max = 8;
    double kappa_min = 1.0;
    double kappa_max = 12.0;
    double kappa_step = 0.1;

    void validate() const;
    std::vector<double> kappa_values() const;
};

struct TrainMetrics {
    double pearson = 0;
    double spearman = 0;
    double rmse = 0;
};

struct CalibrationResult {
    int m_star = 0;
    double kappa = 0;
    double a = 0, b1 = 0, b2 = 0;
    TrainMetrics train;
};

struct PagePrediction {
    std::string deck_id;
    std::string page_id;
    double y = 0;
    double y_raw = 0;
    double y_clipped = 0;
};

struct FoldResult {
    std::string deck_id;
    bool failed = false;
    std::string failure;
    CalibrationResult calib;
};

struct LodoResult {
    std::vector<FoldResult> folds;
    std::vector<PagePrediction> pooled;
    TrainMetrics global;
};

// ---- statistics -----------------------------------------------------------

/// Pearson correlation. Throws Error{stats} when either vector is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

double rmse(std::span<const double> y, std::span<const double> yhat);

/// Average ranks (1-based) with ties sharing the mean of their rank range.
std::vector<double> average_ranks(std::span<const double> values);

/// Least-squares fit of y ~ a + b1*om + b2*fr via Householder QR on the
/// 3-column design. Throws Error{singular} naming the collinear column.
std::array<double, 3> fit_affine(std::span<const double> y, std::span<const double> om,
                                 std::span<const double> fr);

// ---- rating aggregation ---------------------------------------------------

struct RatingRow {
    std::string rater_id;
    std::string deck_id;
    std::string page_id;
    double score = 0;
};

struct FeatureRow {
    std::string deck_id;
    std::string page_id;
    double rho = 0;
    int m_eff = 0;
};

/// Per-rater z-score normalization: z = (s - mean_r) / (sd_r + eps),
/// population standard deviation. Scores are replaced in place.
std::vector<RatingRow> zscore_normalize(std::vector<RatingRow> rows, double eps = 1e-8);

struct AggregatedPage {
    std::string deck_id;
    std::string page_id;
    double y = 0;       // mean z mapped back by the pooled inverse transform
    double z_mean = 0;  // raw z path
};

/// Per-page targets: mean of per-rater z-scores, mapped back to the rating
/// scale with the pooled mean/sd of all raw scores. Page order follows first
/// appearance in the input rows.
std::vector<AggregatedPage> aggregate_ratings(const std::vector<RatingRow>& rows, double eps = 1e-8);

/// CSV with header rater_id,deck_id,page_id,score. Scores must lie in [1,5].
std::vector<RatingRow> parse_ratings_csv(std::string_view text);

/// CSV with header deck_id,page_id,rho,m_eff.
std::vector<FeatureRow> parse_features_csv(std::string_view text);

/// Joins aggregated ratings with features; ordering follows the features
/// rows. A rated page with no feature row is an error; feature rows without
/// ratings are dropped.
std::vector<RatedPage> build_rated_pages(const std::vector<RatingRow>& ratings,
                                         const std::vector<FeatureRow>& features, double eps = 1e-8);

// ---- fitting and evaluation -----------------------------------------------

/// Grid search over (m_star, kappa): recompute FR, refit the affine map,
/// rank grid points by the key (pearson, spearman, -rmse) and return the
/// first strict maximizer in scan order (m_star outer ascending, kappa inner
/// ascending). Grid points with singular fits or undefined statistics are
/// skipped; if every point is skipped the calibration fails.
CalibrationResult select_and_fit(std::span<const RatedPage> train, double tau, const GridSpec& grid);

/// Leave-one-deck-out: per held-out deck, select_and_fit on the rest and
/// predict the held-out pages. Failed folds are recorded and excluded from
/// pooling. Global Pearson/Spearman use raw predictions, RMSE clipped ones.
LodoResult lodo_evaluate(std::span<const RatedPage> dataset, double tau, const GridSpec& grid);

/// lambda_i = b_i / (b1 + b2). Throws Error{weights} if a coefficient is
/// negative or the sum is zero.
std::pair<double, double> weights_from_coefficients(double b1, double b2);

/// (y_raw, y_clipped) for one page's features.
std::pair<double, double> predict(const CalibrationResult& result, double om, double fr);

std::string calibration_result_to_json(const CalibrationResult& r,
                                       const std::optional<std::pair<double, double>>& lambdas,
                                       const std::string& weight_note);
std::string lodo_result_to_json(const LodoResult& r);

} // namespace deckgen
