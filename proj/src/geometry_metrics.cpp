#include "geometry_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "json_text.hpp"

namespace deckgen {

void GadParams::validate() const {
    if (!(a_min > 0 && a_min < 1)) throw Error(Errc::bad_arg, "a_min must lie in (0,1)");
    if (!(tau > 0 && tau < 1)) throw Error(Errc::bad_arg, "tau must lie in (0,1)");
    if (m_star < 1) throw Error(Errc::bad_arg, "m_star must be >= 1");
    if (!(kappa > 0)) throw Error(Errc::bad_arg, "kappa must be positive");
    if (lambda1 < 0 || lambda2 < 0 || std::abs(lambda1 + lambda2 - 1.0) > 1e-9)
        throw Error(Errc::bad_arg, "lambda weights must be non-negative and sum to 1");
}

double union_area(std::span<const Region> regions) {
    if (regions.empty()) return 0.0;

    std::vector<double> xs;
    xs.reserve(regions.size() * 2);
    for (const Region& r : regions) {
        xs.push_back(r.x);
        xs.push_back(r.x + r.w);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double total = 0.0;
    std::vector<std::pair<double, double>> spans;
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs[i], x1 = xs[i + 1];
        const double mid = 0.5 * (x0 + x1);
        spans.clear();
        for (const Region& r : regions)
            if (r.x <= mid && mid < r.x + r.w) spans.emplace_back(r.y, r.y + r.h);
        if (spans.empty()) continue;
        std::sort(spans.begin(), spans.end());
        double covered = 0.0, lo = spans[0].first, hi = spans[0].second;
        for (size_t k = 1; k < spans.size(); ++k) {
            if (spans[k].first > hi) {
                covered += hi - lo;
                lo = spans[k].first;
                hi = spans[k].second;
            } else {
                hi = std::max(hi, spans[k].second);
            }
        }
        covered += hi - lo;
        total += covered * (x1 - x0);
    }
    return total;
}

int effective_region_count(std::span<const Region> regions, double a_min) {
    if (!(a_min > 0)) throw Error(Errc::bad_arg, "a_min must be positive");
    int count = 0;
    for (const Region& r : regions)
        if (r.kind != RegionKind::title_bar && r.area() >= a_min - 1e-12) ++count;
    return count;
}

double fragmentation_reward(int m_eff, int m_star, double kappa) {
    if (!(kappa > 0)) throw Error(Errc::bad_arg, "kappa must be positive");
    const double d = double(m_eff) - double(m_star);
    return std::max(0.0, 1.0 - d * d / kappa);
}

double occupancy_match(double rho, double tau) {
    return 1.0 - std::abs(rho - tau);
}

double slide_score(double om, double fr, double lambda1, double lambda2) {
    return lambda1 * om + lambda2 * fr;
}

GadReport score_deck(const Deck& deck, const GadParams& params) {
    params.validate();
    GadReport report;
    std::vector<Region> content;
    double sum = 0.0;
    for (const Slide* slide : scorable_slides(deck)) {
        content.clear();
        for (const Region& r : slide->regions)
            if (r.kind != RegionKind::title_bar) content.push_back(r);

        SlideGeometry g;
        g.index = slide->index;
        g.rho = union_area(content);
        g.m_eff = effective_region_count(slide->regions, params.a_min);
        g.om = occupancy_match(g.rho, params.tau);
        g.fr = fragmentation_reward(g.m_eff, params.m_star, params.kappa);
        g.score = slide_score(g.om, g.fr, params.lambda1, params.lambda2);
        sum += g.score;
        report.slides.push_back(g);
    }
    if (report.slides.empty()) {
        report.empty = true;
        report.deck_gad = 0.0;
    } else {
        report.deck_gad = sum / double(report.slides.size());
    }
    return report;
}

std::string GadReport::to_json() const {
    std::string out = "{\n";
    out += "  \"deck_gad\": " + fmt_num6(deck_gad) + ",\n";
    out += "  \"empty\": " + std::string(empty ? "true" : "false") + ",\n";
    out += "  \"slides\": [";
    for (size_t i = 0; i < slides.size(); ++i) {
        const SlideGeometry& g = slides[i];
        out += i ? ",\n    " : "\n    ";
        out += "{ \"index\": " + std::to_string(g.index) + ", \"rho\": " + fmt_num6(g.rho) +
               ", \"m_eff\": " + std::to_string(g.m_eff) + ", \"om\": " + fmt_num6(g.om) +
               ", \"fr\": " + fmt_num6(g.fr) + ", \"score\": " + fmt_num6(g.score) + " }";
    }
    out += slides.empty() ? "]\n" : "\n  ]\n";
    out += "}\n";
    return out;
}

} // namespace deckgen
