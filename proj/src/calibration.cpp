#include "calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "geometry_metrics.hpp"
#include "json_text.hpp"

namespace deckgen {

namespace {

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double population_sd(std::span<const double> v, double mu) {
    double acc = 0;
    for (double x : v) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / double(v.size()));
}

double clip(double v, double lo, double hi) {
    return std::min(hi, std::max(lo, v));
}

struct Key {
    double pearson, spearman, neg_rmse;

    bool operator>(const Key& o) const {
        if (pearson != o.pearson) return pearson > o.pearson;
        if (spearman != o.spearman) return spearman > o.spearman;
        return neg_rmse > o.neg_rmse;
    }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double_field(const std::string& s, size_t line_no, const char* name) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(Errc::parse,
                    "line " + std::to_string(line_no) + ": field " + name + " is not a number: \"" + s + "\"");
    }
}

} // namespace

void GridSpec::validate() const {
    if (m_min > m_max) throw Error(Errc::bad_arg, "grid: m_min must be <= m_max");
    if (m_min < 0) throw Error(Errc::bad_arg, "grid: m_min must be non-negative");
    if (!(kappa_min > 0) || kappa_min > kappa_max)
        throw Error(Errc::bad_arg, "grid: need 0 < kappa_min <= kappa_max");
    if (!(kappa_step > 0)) throw Error(Errc::bad_arg, "grid: kappa_step must be positive");
}

std::vector<double> GridSpec::kappa_values() const {
    std::vector<double> out;
    const long steps = std::lround(std::floor((kappa_max - kappa_min) / kappa_step + 1e-9));
    out.reserve(size_t(steps) + 1);
    for (long i = 0; i <= steps; ++i) out.push_back(kappa_min + double(i) * kappa_step);
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(Errc::bad_arg, "pearson requires two vectors of equal length >= 2");
    const double mx = mean(x), my = mean(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0)
        throw Error(Errc::stats, "pearson undefined for a constant vector");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * (double(i + 1) + double(j + 1)); // 1-based rank range [i+1, j+1]
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size() || y.empty())
        throw Error(Errc::bad_arg, "rmse requires two non-empty vectors of equal length");
    double acc = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        acc += d * d;
    }
    return std::sqrt(acc / double(y.size()));
}

std::array<double, 3> fit_affine(std::span<const double> y, std::span<const double> om,
                                 std::span<const double> fr) {
    const size_t n = y.size();
    if (om.size() != n || fr.size() != n)
        throw Error(Errc::bad_arg, "fit_affine requires equal-length vectors");
    if (n < 3) throw Error(Errc::bad_arg, "fit_affine requires at least 3 rows");

    // Householder QR on the n x 3 design [1, om, fr], applied to y as well.
    std::vector<std::array<double, 3>> a(n);
    std::vector<double> rhs(y.begin(), y.end());
    for (size_t i = 0; i < n; ++i) a[i] = {1.0, om[i], fr[i]};

    static const char* col_names[3] = {"intercept", "om", "fr"};
    double diag_max = 0.0;
    for (size_t k = 0; k < 3; ++k) {
        double norm = 0;
        for (size_t i = k; i < n; ++i) norm += a[i][k] * a[i][k];
        norm = std::sqrt(norm);
        if (a[k][k] > 0) norm = -norm;
        const double alpha = norm;

        std::vector<double> v(n - k, 0.0);
        v[0] = a[k][k] - alpha;
        for (size_t i = k + 1; i < n; ++i) v[i - k] = a[i][k];
        double vnorm2 = 0;
        for (double t : v) vnorm2 += t * t;

        if (vnorm2 > 0) {
            for (size_t col = k; col < 3; ++col) {
                double dot = 0;
                for (size_t i = k; i < n; ++i) dot += v[i - k] * a[i][col];
                const double f = 2.0 * dot / vnorm2;
                for (size_t i = k; i < n; ++i) a[i][col] -= f * v[i - k];
            }
            double dot = 0;
            for (size_t i = k; i < n; ++i) dot += v[i - k] * rhs[i];
            const double f = 2.0 * dot / vnorm2;
            for (size_t i = k; i < n; ++i) rhs[i] -= f * v[i - k];
        }
        diag_max = std::max(diag_max, std::abs(a[k][k]));
        if (std::abs(a[k][k]) <= 1e-10 * std::max(diag_max, 1.0))
            throw Error(Errc::singular,
                        std::string("singular design: column \"") + col_names[k] +
                            "\" is collinear with the preceding columns");
    }

    std::array<double, 3> beta{};
    for (int k = 2; k >= 0; --k) {
        double s = rhs[size_t(k)];
        for (int j = k + 1; j < 3; ++j) s -= a[size_t(k)][size_t(j)] * beta[size_t(j)];
        beta[size_t(k)] = s / a[size_t(k)][size_t(k)];
    }
    return beta;
}

std::vector<RatingRow> zscore_normalize(std::vector<RatingRow> rows, double eps) {
    if (!(eps > 0)) throw Error(Errc::bad_arg, "eps must be positive");
    std::map<std::string, std::vector<size_t>> by_rater;
    for (size_t i = 0; i < rows.size(); ++i) by_rater[rows[i].rater_id].push_back(i);
    for (const auto& [rater, idx] : by_rater) {
        std::vector<double> scores;
        scores.reserve(idx.size());
        for (size_t i : idx) scores.push_back(rows[i].score);
        const double mu = mean(scores);
        const double sd = population_sd(scores, mu);
        for (size_t i : idx) rows[i].score = (rows[i].score - mu) / (sd + eps);
    }
    return rows;
}

std::vector<AggregatedPage> aggregate_ratings(const std::vector<RatingRow>& rows, double eps) {
    if (rows.empty()) throw Error(Errc::empty, "no ratings to aggregate");

    std::vector<double> all_scores;
    all_scores.reserve(rows.size());
    for (const RatingRow& r : rows) all_scores.push_back(r.score);
    const double mu_pool = mean(all_scores);
    const double sd_pool = population_sd(all_scores, mu_pool);

    const std::vector<RatingRow> normalized = zscore_normalize(rows, eps);

    std::vector<AggregatedPage> pages;
    std::map<std::pair<std::string, std::string>, size_t> page_index;
    std::vector<int> counts;
    for (const RatingRow& r : normalized) {
        const auto key = std::make_pair(r.deck_id, r.page_id);
        auto it = page_index.find(key);
        if (it == page_index.end()) {
            it = page_index.emplace(key, pages.size()).first;
            pages.push_back({r.deck_id, r.page_id, 0.0, 0.0});
            counts.push_back(0);
        }
        pages[it->second].z_mean += r.score;
        counts[it->second] += 1;
    }
    for (size_t i = 0; i < pages.size(); ++i) {
        pages[i].z_mean /= double(counts[i]);
        pages[i].y = pages[i].z_mean * sd_pool + mu_pool;
    }
    return pages;
}

std::vector<RatingRow> parse_ratings_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    size_t line_no = 0;
    std::vector<RatingRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (line_no == 1) {
            if (fields != std::vector<std::string>{"rater_id", "deck_id", "page_id", "score"})
                throw Error(Errc::parse, "ratings CSV header must be rater_id,deck_id,page_id,score");
            continue;
        }
        if (fields.size() != 4)
            throw Error(Errc::parse, "line " + std::to_string(line_no) + ": expected 4 fields");
        RatingRow r{fields[0], fields[1], fields[2], parse_double_field(fields[3], line_no, "score")};
        if (r.score < 1.0 || r.score > 5.0)
            throw Error(Errc::validate,
                        "line " + std::to_string(line_no) + ": score " + fields[3] + " outside [1,5]");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error(Errc::empty, "ratings CSV contains no data rows");
    return rows;
}

std::vector<FeatureRow> parse_features_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    size_t line_no = 0;
    std::vector<FeatureRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (line_no == 1) {
            if (fields != std::vector<std::string>{"deck_id", "page_id", "rho", "m_eff"})
                throw Error(Errc::parse, "features CSV header must be deck_id,page_id,rho,m_eff");
            continue;
        }
        if (fields.size() != 4)
            throw Error(Errc::parse, "line " + std::to_string(line_no) + ": expected 4 fields");
        FeatureRow f{fields[0], fields[1], parse_double_field(fields[2], line_no, "rho"),
                     int(std::lround(parse_double_field(fields[3], line_no, "m_eff")))};
        if (f.rho < 0 || f.rho > 1)
            throw Error(Errc::validate, "line " + std::to_string(line_no) + ": rho outside [0,1]");
        if (f.m_eff < 0)
            throw Error(Errc::validate, "line " + std::to_string(line_no) + ": m_eff negative");
        rows.push_back(std::move(f));
    }
    if (rows.empty()) throw Error(Errc::empty, "features CSV contains no data rows");
    return rows;
}

std::vector<RatedPage> build_rated_pages(const std::vector<RatingRow>& ratings,
                                         const std::vector<FeatureRow>& features, double eps) {
    const std::vector<AggregatedPage> pages = aggregate_ratings(ratings, eps);
    std::map<std::pair<std::string, std::string>, const AggregatedPage*> by_page;
    for (const AggregatedPage& p : pages) by_page[{p.deck_id, p.page_id}] = &p;

    std::vector<RatedPage> out;
    std::map<std::pair<std::string, std::string>, bool> seen;
    for (const FeatureRow& f : features) {
        const auto key = std::make_pair(f.deck_id, f.page_id);
        auto it = by_page.find(key);
        if (it == by_page.end()) continue; // unrated page, nothing to learn from
        out.push_back({f.deck_id, f.page_id, it->second->y, f.rho, f.m_eff});
        seen[key] = true;
    }
    for (const AggregatedPage& p : pages)
        if (!seen.count({p.deck_id, p.page_id}))
            throw Error(Errc::validate,
                        "rated page " + p.deck_id + "/" + p.page_id + " has no feature row");
    return out;
}

CalibrationResult select_and_fit(std::span<const RatedPage> train, double tau, const GridSpec& grid) {
    grid.validate();
    const size_t n = train.size();
    if (n < 3) throw Error(Errc::bad_arg, "training set must contain at least 3 pages");
    {
        bool distinct = false;
        for (size_t i = 1; i < n && !distinct; ++i) distinct = train[i].y != train[0].y;
        if (!distinct) throw Error(Errc::bad_arg, "training targets are all identical");
    }

    std::vector<double> y(n), om(n), fr(n), y_raw(n), y_clip(n);
    for (size_t i = 0; i < n; ++i) {
        y[i] = train[i].y;
        om[i] = occupancy_match(train[i].rho, tau);
    }

    const std::vector<double> kappas = grid.kappa_values();
    bool found = false;
    Key best_key{};
    CalibrationResult best;

    for (int m = grid.m_min; m <= grid.m_max; ++m) {
        for (double kappa : kappas) {
            for (size_t i = 0; i < n; ++i)
                fr[i] = fragmentation_reward(train[i].m_eff, m, kappa);
            std::array<double, 3> beta;
            Key key{};
            try {
                beta = fit_affine(y, om, fr);
                for (size_t i = 0; i < n; ++i) {
                    y_raw[i] = beta[0] + beta[1] * om[i] + beta[2] * fr[i];
                    y_clip[i] = clip(y_raw[i], 1.0, 5.0);
                }
                key = {pearson(y, y_raw), spearman(y, y_raw), -rmse(y, y_clip)};
            } catch (const Error& e) {
                if (e.code() == Errc::singular || e.code() == Errc::stats) continue;
                throw;
            }
            if (!found || key > best_key) {
                found = true;
                best_key = key;
                best.m_star = m;
                best.kappa = kappa;
                best.a = beta[0];
                best.b1 = beta[1];
                best.b2 = beta[2];
                best.train = {key.pearson, key.spearman, -key.neg_rmse};
            }
        }
    }
    if (!found)
        throw Error(Errc::singular, "calibration failed: every grid point had a singular fit");
    return best;
}

std::pair<double, double> predict(const CalibrationResult& result, double om, double fr) {
    const double raw = result.a + result.b1 * om + result.b2 * fr;
    return {raw, clip(raw, 1.0, 5.0)};
}

LodoResult lodo_evaluate(std::span<const RatedPage> dataset, double tau, const GridSpec& grid) {
    std::vector<std::string> deck_order;
    for (const RatedPage& p : dataset)
        if (std::find(deck_order.begin(), deck_order.end(), p.deck_id) == deck_order.end())
            deck_order.push_back(p.deck_id);
    if (deck_order.size() < 2)
        throw Error(Errc::bad_arg, "leave-one-deck-out requires at least 2 decks");

    LodoResult result;
    for (const std::string& deck : deck_order) {
        std::vector<RatedPage> train;
        std::vector<const RatedPage*> val;
        for (const RatedPage& p : dataset) {
            if (p.deck_id == deck)
                val.push_back(&p);
            else
                train.push_back(p);
        }

        FoldResult fold;
        fold.deck_id = deck;
        try {
            fold.calib = select_and_fit(train, tau, grid);
        } catch (const Error& e) {
            fold.failed = true;
            fold.failure = e.what();
            result.folds.push_back(std::move(fold));
            continue;
        }
        for (const RatedPage* p : val) {
            const double om = occupancy_match(p->rho, tau);
            const double fr = fragmentation_reward(p->m_eff, fold.calib.m_star, fold.calib.kappa);
            const auto [raw, clipped] = predict(fold.calib, om, fr);
            result.pooled.push_back({p->deck_id, p->page_id, p->y, raw, clipped});
        }
        result.folds.push_back(std::move(fold));
    }

    if (result.pooled.size() >= 2) {
        std::vector<double> y, raw, clipped;
        for (const PagePrediction& p : result.pooled) {
            y.push_back(p.y);
            raw.push_back(p.y_raw);
            clipped.push_back(p.y_clipped);
        }
        result.global.rmse = rmse(y, clipped);
        result.global.pearson = pearson(y, raw);
        result.global.spearman = spearman(y, raw);
    }
    return result;
}

std::pair<double, double> weights_from_coefficients(double b1, double b2) {
    if (b1 < 0 || b2 < 0)
        throw Error(Errc::weights, "cannot derive weights from a negative coefficient");
    const double sum = b1 + b2;
    if (sum == 0) throw Error(Errc::weights, "cannot derive weights when b1 + b2 = 0");
    const double lambda1 = b1 / sum;
    return {lambda1, 1.0 - lambda1}; // sums to 1 exactly
}

namespace {

std::string metrics_json(const TrainMetrics& m) {
    return "{ \"pearson\": " + fmt_num6(m.pearson) + ", \"spearman\": " + fmt_num6(m.spearman) +
           ", \"rmse\": " + fmt_num6(m.rmse) + " }";
}

std::string calib_fields(const CalibrationResult& r) {
    return "\"m_star\": " + std::to_string(r.m_star) + ", \"kappa\": " + fmt_num6(r.kappa) +
           ", \"a\": " + fmt_num6(r.a) + ", \"b1\": " + fmt_num6(r.b1) + ", \"b2\": " + fmt_num6(r.b2);
}

} // namespace

std::string calibration_result_to_json(const CalibrationResult& r,
                                       const std::optional<std::pair<double, double>>& lambdas,
                                       const std::string& weight_note) {
    std::string out = "{\n";
    out += "  \"mode\": \"fit\",\n";
    out += "  " + calib_fields(r) + ",\n";
    if (lambdas) {
        out += "  \"lambda1\": " + fmt_num6(lambdas->first) + ",\n";
        out += "  \"lambda2\": " + fmt_num6(lambdas->second) + ",\n";
    } else {
        out += "  \"weight_note\": " + json_quote(weight_note) + ",\n";
    }
    out += "  \"train\": " + metrics_json(r.train) + "\n";
    out += "}\n";
    return out;
}

std::string lodo_result_to_json(const LodoResult& r) {
    std::string out = "{\n";
    out += "  \"mode\": \"lodo\",\n";
    out += "  \"folds\": [";
    for (size_t i = 0; i < r.folds.size(); ++i) {
        const FoldResult& f = r.folds[i];
        out += i ? ",\n    " : "\n    ";
        if (f.failed) {
            out += "{ \"deck_id\": " + json_quote(f.deck_id) + ", \"failed\": true, \"reason\": " +
                   json_quote(f.failure) + " }";
        } else {
            out += "{ \"deck_id\": " + json_quote(f.deck_id) + ", \"failed\": false, " +
                   calib_fields(f.calib) + ", \"train\": " + metrics_json(f.calib.train) + " }";
        }
    }
    out += r.folds.empty() ? "],\n" : "\n  ],\n";
    out += "  \"global\": " + metrics_json(r.global) + ",\n";
    out += "  \"predictions\": [";
    for (size_t i = 0; i < r.pooled.size(); ++i) {
        const PagePrediction& p = r.pooled[i];
        out += i ? ",\n    " : "\n    ";
        out += "{ \"deck_id\": " + json_quote(p.deck_id) + ", \"page_id\": " + json_quote(p.page_id) +
               ", \"y\": " + fmt_num6(p.y) + ", \"y_raw\": " + fmt_num6(p.y_raw) +
               ", \"y_clipped\": " + fmt_num6(p.y_clipped) + " }";
    }
    out += r.pooled.empty() ? "]\n" : "\n  ]\n";
    out += "}\n";
    return out;
}

} // namespace deckgen
