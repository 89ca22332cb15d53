#include "rande/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rande/rng.hpp"

namespace rande {

double sse(const SpaceTimeField& a, const SpaceTimeField& b,
           std::span<const std::size_t> time_mask) {
    if (a.n_t() != b.n_t() || a.n_x() != b.n_x()) {
        throw std::invalid_argument("sse: field shapes differ");
    }
    if (time_mask.empty()) {
        throw std::invalid_argument("sse: empty time mask");
    }
    double total = 0.0;
    for (std::size_t j : time_mask) {
        if (j >= a.n_t()) {
            throw std::invalid_argument("sse: mask index out of range");
        }
        auto ra = a.row(j);
        auto rb = b.row(j);
        for (std::size_t k = 0; k < ra.size(); ++k) {
            double diff = ra[k] - rb[k];
            total += diff * diff;
        }
    }
    return total;
}

std::optional<double> front_position(std::span<const double> u_row,
                                     const SpatialGrid& grid, double u_star) {
    if (!(u_star > 0.0) || !(u_star < 1.0)) {
        throw std::invalid_argument("front_position: u_star must lie in (0, 1)");
    }
    if (u_row.size() != grid.n_points) {
        throw std::invalid_argument("front_position: row length does not match grid");
    }
    for (std::size_t k = grid.n_points - 1; k > 0; --k) {
        double left = u_row[k - 1] - u_star;
        double right = u_row[k] - u_star;
        if (left == 0.0 && right == 0.0) continue;  // flat at the level: keep scanning
        if (right == 0.0) return grid.x(k);
        if (left == 0.0) return grid.x(k - 1);
        if ((left > 0.0) != (right > 0.0)) {
            double frac = left / (left - right);
            return grid.x(k - 1) + frac * grid.dx();
        }
    }
    return std::nullopt;
}

std::vector<double> default_wave_levels() {
    std::vector<double> levels;
    for (int i = 0; i <= 8; ++i) levels.push_back(0.25 + 0.05 * i);
    return levels;
}

WaveSpeedProfile wave_speed_profile(const SpaceTimeField& field,
                                    std::span<const double> u_stars, double t_lo,
                                    double t_hi) {
    const TimeGrid& tg = field.time;
    const double eps = 1e-9 * (tg.t_max - tg.t_min);
    if (t_lo < tg.t_min - eps || t_hi > tg.t_max + eps || !(t_hi > t_lo)) {
        throw std::invalid_argument("wave_speed_profile: window outside the field's range");
    }
    WaveSpeedProfile profile;
    profile.window_lo = t_lo;
    profile.window_hi = t_hi;
    profile.levels.assign(u_stars.begin(), u_stars.end());
    profile.speeds.assign(u_stars.size(), std::numeric_limits<double>::quiet_NaN());
    profile.missing.assign(u_stars.size(), true);

    std::vector<std::size_t> window_rows;
    for (std::size_t j = 0; j < tg.n_points; ++j) {
        double t = tg.t(j);
        if (t >= t_lo - eps && t <= t_hi + eps) window_rows.push_back(j);
    }

    for (std::size_t li = 0; li < profile.levels.size(); ++li) {
        std::vector<double> ts, xs;
        for (std::size_t j : window_rows) {
            auto pos = front_position(field.row(j), field.space, profile.levels[li]);
            if (pos) {
                ts.push_back(tg.t(j));
                xs.push_back(*pos);
            }
        }
        if (ts.size() < 3) continue;  // level flagged missing
        // Ordinary least squares slope of x(t).
        double n = static_cast<double>(ts.size());
        double mt = 0.0, mx = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            mt += ts[i];
            mx += xs[i];
        }
        mt /= n;
        mx /= n;
        double stx = 0.0, stt = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            stx += (ts[i] - mt) * (xs[i] - mx);
            stt += (ts[i] - mt) * (ts[i] - mt);
        }
        if (stt <= 0.0) continue;
        profile.speeds[li] = stx / stt;
        profile.missing[li] = false;
    }
    return profile;
}

SampleSet normalize_samples(const SampleSet& samples, double D_min, double D_max,
                            double rho_min, double rho_max) {
    if (samples.empty()) {
        throw std::invalid_argument("normalize_samples: empty sample set");
    }
    SampleSet out;
    out.reserve(samples.size());
    for (const Sample& s : samples) {
        out.push_back({2.0 * (s.D - D_min) / (D_max - D_min) - 1.0,
                       2.0 * (s.rho - rho_min) / (rho_max - rho_min) - 1.0});
    }
    return out;
}

std::vector<Sample> denormalize_centers(const std::vector<Sample>& centers,
                                        double D_min, double D_max, double rho_min,
                                        double rho_max) {
    constexpr double slack = 1e-9;
    std::vector<Sample> out;
    out.reserve(centers.size());
    for (const Sample& c : centers) {
        if (std::abs(c.D) > 1.0 + slack || std::abs(c.rho) > 1.0 + slack) {
            throw std::invalid_argument("denormalize_centers: center outside [-1, 1]^2");
        }
        out.push_back({D_min + 0.5 * (c.D + 1.0) * (D_max - D_min),
                       rho_min + 0.5 * (c.rho + 1.0) * (rho_max - rho_min)});
    }
    return out;
}

namespace {

double sq_dist(const Sample& a, const Sample& b) {
    double dD = a.D - b.D;
    double dr = a.rho - b.rho;
    return dD * dD + dr * dr;
}

struct LloydOutcome {
    std::vector<Sample> centers;
    std::vector<std::size_t> assignment;
    double inertia = std::numeric_limits<double>::infinity();
};

// Lloyd iterations from given centers to an assignment fixed point. Empty
// clusters are respawned at the point farthest from its current center.
LloydOutcome lloyd(const SampleSet& samples, std::vector<Sample> centers) {
    const std::size_t n = samples.size();
    const std::size_t k = centers.size();
    LloydOutcome out;
    out.assignment.assign(n, k);
    std::vector<std::size_t> counts(k);
    constexpr std::size_t max_rounds = 300;

    for (std::size_t round = 0; round < max_rounds; ++round) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t bestc = 0;
            double bestd = sq_dist(samples[i], centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                double d2 = sq_dist(samples[i], centers[c]);
                if (d2 < bestd) {
                    bestd = d2;
                    bestc = c;
                }
            }
            if (out.assignment[i] != bestc) {
                out.assignment[i] = bestc;
                changed = true;
            }
        }
        if (!changed && round > 0) break;

        std::vector<Sample> sums(k, {0.0, 0.0});
        std::fill(counts.begin(), counts.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            sums[out.assignment[i]].D += samples[i].D;
            sums[out.assignment[i]].rho += samples[i].rho;
            ++counts[out.assignment[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // respawn on the sample farthest from its own center
                std::size_t far = 0;
                double fard = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d2 = sq_dist(samples[i], centers[out.assignment[i]]);
                    if (d2 > fard) {
                        fard = d2;
                        far = i;
                    }
                }
                centers[c] = samples[far];
                changed = true;
            } else {
                centers[c] = {sums[c].D / static_cast<double>(counts[c]),
                              sums[c].rho / static_cast<double>(counts[c])};
            }
        }
        if (!changed) break;
    }

    out.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.inertia += sq_dist(samples[i], centers[out.assignment[i]]);
    }
    out.centers = std::move(centers);
    return out;
}

std::vector<Sample> kmeanspp_seed(const SampleSet& samples, std::size_t k, Rng& rng) {
    std::vector<Sample> centers;
    centers.reserve(k);
    centers.push_back(samples[static_cast<std::size_t>(rng.uniform() *
                                                       static_cast<double>(samples.size())) %
                              samples.size()]);
    std::vector<double> d2(samples.size());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            double best = sq_dist(samples[i], centers[0]);
            for (std::size_t j = 1; j < centers.size(); ++j) {
                best = std::min(best, sq_dist(samples[i], centers[j]));
            }
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            centers.push_back(samples[c % samples.size()]);
            continue;
        }
        double u = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = samples.size() - 1;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            acc += d2[i];
            if (acc >= u) {
                pick = i;
                break;
            }
        }
        centers.push_back(samples[pick]);
    }
    return centers;
}

std::size_t count_distinct(const SampleSet& samples) {
    SampleSet sorted = samples;
    std::sort(sorted.begin(), sorted.end(), [](const Sample& a, const Sample& b) {
        return a.D != b.D ? a.D < b.D : a.rho < b.rho;
    });
    std::size_t distinct = sorted.empty() ? 0 : 1;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].D != sorted[i - 1].D || sorted[i].rho != sorted[i - 1].rho) {
            ++distinct;
        }
    }
    return distinct;
}

}  // namespace

KMeansResult kmeans(const SampleSet& samples, std::size_t k, std::size_t restarts,
                    std::uint64_t seed) {
    if (k == 0 || k > samples.size()) {
        throw std::invalid_argument("kmeans: need 1 <= k <= number of samples");
    }
    if (k > count_distinct(samples)) {
        throw std::invalid_argument("kmeans: k exceeds the number of distinct points");
    }
    restarts = std::max<std::size_t>(restarts, 1);

    LloydOutcome best;
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, "kmeans_restart:" + std::to_string(r)));
        LloydOutcome run = lloyd(samples, kmeanspp_seed(samples, k, rng));
        if (run.inertia < best.inertia) best = std::move(run);
    }

    KMeansResult result;
    result.centers = std::move(best.centers);
    result.inertia = best.inertia;
    result.assignment = std::move(best.assignment);
    return result;
}

ElbowResult elbow_select(std::span<const double> inertias, std::size_t k_min) {
    const std::size_t n = inertias.size();
    if (n < 3) {
        throw std::invalid_argument("elbow_select: need at least 3 k values");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (inertias[i] > inertias[i - 1] * (1.0 + 1e-9)) {
            throw std::invalid_argument("elbow_select: inertia curve must be nonincreasing");
        }
    }
    double y0 = inertias.front();
    double yN = inertias.back();
    ElbowResult result;
    result.k = k_min;
    if (!(y0 > yN)) {
        return result;  // flat curve: no knee
    }

    // Normalized vertical distance below the chord from (0, 1) to (1, 0).
    double best_gap = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(n - 1);
        double y = (inertias[i] - yN) / (y0 - yN);
        double gap = (1.0 - x) - y;
        if (gap > best_gap) {
            best_gap = gap;
            best_i = i;
        }
    }
    // Kneedle significance threshold at sensitivity 1: one mean x-spacing.
    const double threshold = 1.0 / static_cast<double>(n - 1);
    if (best_gap > threshold) {
        result.k = k_min + best_i;
        result.knee_found = true;
    }
    return result;
}

ClusterResult cluster_parameter_samples(const SampleSet& samples, double D_min,
                                        double D_max, double rho_min, double rho_max,
                                        std::size_t k_max, std::size_t restarts,
                                        std::uint64_t seed) {
    SampleSet normalized =
        normalize_samples(samples, D_min, D_max, rho_min, rho_max);
    k_max = std::min(k_max, count_distinct(normalized));
    if (k_max < 3) {
        throw std::invalid_argument(
            "cluster_parameter_samples: need at least 3 feasible k values");
    }

    ClusterResult result;
    std::vector<KMeansResult> runs;
    runs.reserve(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        KMeansResult run =
            kmeans(normalized, k, restarts, derive_seed(seed, "k:" + std::to_string(k)));
        if (k > 1) {
            // Also try the previous solution with its worst cluster split at its
            // farthest point; keeps the inertia curve nonincreasing.
            const KMeansResult& prev = runs.back();
            std::vector<Sample> seeded = prev.centers;
            std::size_t far = 0;
            double fard = -1.0;
            for (std::size_t i = 0; i < normalized.size(); ++i) {
                double d2 = sq_dist(normalized[i], prev.centers[prev.assignment[i]]);
                if (d2 > fard) {
                    fard = d2;
                    far = i;
                }
            }
            seeded.push_back(normalized[far]);
            LloydOutcome alt = lloyd(normalized, std::move(seeded));
            if (alt.inertia < run.inertia) {
                run.centers = std::move(alt.centers);
                run.inertia = alt.inertia;
                run.assignment = std::move(alt.assignment);
            }
        }
        result.inertia_per_k.push_back(run.inertia);
        runs.push_back(std::move(run));
    }

    ElbowResult elbow = elbow_select(result.inertia_per_k, 1);
    result.chosen_k = elbow.k;
    result.knee_found = elbow.knee_found;
    result.centers = denormalize_centers(runs[result.chosen_k - 1].centers, D_min,
                                         D_max, rho_min, rho_max);
    return result;
}

}  // namespace rande
