#pragma once

#include <span>
#include <string>
#include <vector>

#include "deck_model.hpp"

namespace deckgen {

/// GAD hyperparameters. Defaults follow the calibrated operating point.
struct GadParams {
    double a_min = 0.04;   // minimum region area to count toward M_eff
    double tau = 0.55;     // target occupancy fraction
    int m_star = 4;        // preferred effective region count
    double kappa = 6.3;    // quadratic width of the fragmentation reward
    double lambda1 = 0.6;  // occupancy weight
    double lambda2 = 0.4;  // fragmentation weight

    /// Throws Error{bad_arg} unless 0 < a_min < 1, 0 < tau < 1, m_star >= 1,
    /// kappa > 0, lambda1 + lambda2 = 1 with both non-negative.
    void validate() const;
};

struct SlideGeometry {
    int index = 0;
    double rho = 0;
    int m_eff = 0;
    double om = 0;
    double fr = 0;
    double score = 0;
};

struct GadReport {
    std::vector<SlideGeometry> slides;
    double deck_gad = 0;
    bool empty = false; // deck had no scorable slides

    std::string to_json() const;
};

/// Exact area of the union of axis-aligned rectangles, via coordinate
/// compression over x with merged y-intervals per strip. Regions are taken
/// as passed; callers filter title bars if they want them excluded.
double union_area(std::span<const Region> regions);

/// Number of non-title-bar regions whose own area w*h meets the gate
/// (inclusive). The gate tolerates ~1e-12 of float noise on the boundary.
int effective_region_count(std::span<const Region> regions, double a_min);

/// max{0, 1 - (m_eff - m_star)^2 / kappa}
double fragmentation_reward(int m_eff, int m_star, double kappa);

/// 1 - |rho - tau|
double occupancy_match(double rho, double tau);

/// lambda1*om + lambda2*fr
double slide_score(double om, double fr, double lambda1, double lambda2);

/// Scores every content slide (title bars excluded from occupancy and the
/// region count) and averages the per-slide scores. A deck with no content
/// slides reports deck_gad = 0 with the empty flag set.
GadReport score_deck(const Deck& deck, const GadParams& params);

} // namespace deckgen
