#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "beansplit/csv.hpp"
#include "beansplit/error.hpp"

namespace beansplit {

inline double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "input lengths differ");
    const std::size_t n = x.size();
    if (n < 2) fail(ErrorCode::LengthMismatch, "need at least two observations");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        fail(ErrorCode::UndefinedCorrelation, "constant input has no correlation");
    }
    return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// F distribution tail probability
// ---------------------------------------------------------------------------

namespace detail {

// Regularized incomplete beta by the Lentz continued fraction.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

inline double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) fail(ErrorCode::InvalidParameter, "beta parameters must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::betacf(a, b, x) / a;
    }
    return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// P(F_{d1,d2} > f)
inline double f_tail_probability(double f, double d1, double d2) {
    if (f <= 0.0) return 1.0;
    return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

// ---------------------------------------------------------------------------
// Two-way ANOVA (genotype x retort time, balanced with replication)
// ---------------------------------------------------------------------------

struct StudyObservation {
    std::string genotype;
    int retort_min = 0;
    int replicate = 0;
    double value = 0.0;
};

struct AnovaRow {
    std::string source;
    int df = 0;
    double ss = 0.0;
    double ms = 0.0;
    double f = 0.0;  // NaN for the residual row
    double p = 1.0;  // NaN for the residual row
};

struct AnovaTable {
    std::vector<AnovaRow> rows;  // Genotype, Retort, GxT, Residual

    const AnovaRow& operator[](const std::string& source) const {
        for (const auto& r : rows) {
            if (r.source == source) return r;
        }
        fail(ErrorCode::InvalidParameter, "no ANOVA row named " + source);
    }
};

namespace detail {

struct CellGrid {
    std::vector<std::string> genotypes;  // sorted unique
    std::vector<int> retorts;            // sorted unique
    int replicates = 0;                  // r, equal per cell
    std::vector<std::vector<std::vector<double>>> cells;  // [g][t][r]
};

inline CellGrid build_grid(const std::vector<StudyObservation>& obs) {
    std::set<std::string> gset;
    std::set<int> tset;
    for (const auto& o : obs) {
        gset.insert(o.genotype);
        tset.insert(o.retort_min);
    }
    CellGrid grid;
    grid.genotypes.assign(gset.begin(), gset.end());
    grid.retorts.assign(tset.begin(), tset.end());
    const std::size_t G = grid.genotypes.size(), T = grid.retorts.size();
    grid.cells.assign(G, std::vector<std::vector<double>>(T));
    std::map<std::string, std::size_t> gidx;
    std::map<int, std::size_t> tidx;
    for (std::size_t i = 0; i < G; ++i) gidx[grid.genotypes[i]] = i;
    for (std::size_t i = 0; i < T; ++i) tidx[grid.retorts[i]] = i;
    for (const auto& o : obs) {
        grid.cells[gidx[o.genotype]][tidx[o.retort_min]].push_back(o.value);
    }
    std::size_t r = grid.cells[0][0].size();
    for (const auto& row : grid.cells) {
        for (const auto& cell : row) {
            if (cell.size() != r) {
                fail(ErrorCode::UnbalancedDesign, "unequal replication across cells");
            }
        }
    }
    if (r < 2) fail(ErrorCode::InsufficientReplication, "need at least 2 replicates per cell");
    grid.replicates = static_cast<int>(r);
    return grid;
}

}  // namespace detail

// Fixed-effects two-way ANOVA with interaction. F statistics test each
// source against the residual mean square.
inline AnovaTable anova_two_way(const std::vector<StudyObservation>& obs) {
    const detail::CellGrid grid = detail::build_grid(obs);
    const std::size_t G = grid.genotypes.size(), T = grid.retorts.size();
    const int r = grid.replicates;
    const double n = static_cast<double>(G * T * r);

    double grand = 0.0;
    std::vector<double> gmean(G, 0.0), tmean(T, 0.0);
    std::vector<std::vector<double>> cmean(G, std::vector<double>(T, 0.0));
    for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t t = 0; t < T; ++t) {
            for (double v : grid.cells[g][t]) {
                grand += v;
                gmean[g] += v;
                tmean[t] += v;
                cmean[g][t] += v;
            }
        }
    }
    grand /= n;
    for (auto& v : gmean) v /= static_cast<double>(T * r);
    for (auto& v : tmean) v /= static_cast<double>(G * r);
    for (auto& row : cmean) {
        for (auto& v : row) v /= static_cast<double>(r);
    }

    double ss_g = 0.0, ss_t = 0.0, ss_gt = 0.0, ss_e = 0.0;
    for (std::size_t g = 0; g < G; ++g) ss_g += (gmean[g] - grand) * (gmean[g] - grand);
    ss_g *= static_cast<double>(T * r);
    for (std::size_t t = 0; t < T; ++t) ss_t += (tmean[t] - grand) * (tmean[t] - grand);
    ss_t *= static_cast<double>(G * r);
    for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t t = 0; t < T; ++t) {
            const double d = cmean[g][t] - gmean[g] - tmean[t] + grand;
            ss_gt += d * d;
            for (double v : grid.cells[g][t]) ss_e += (v - cmean[g][t]) * (v - cmean[g][t]);
        }
    }
    ss_gt *= static_cast<double>(r);

    const int df_g = static_cast<int>(G) - 1;
    const int df_t = static_cast<int>(T) - 1;
    const int df_gt = df_g * df_t;
    const int df_e = static_cast<int>(G * T) * (r - 1);
    if (df_g < 1 || df_t < 1) {
        fail(ErrorCode::UnbalancedDesign, "need at least two genotypes and two retort levels");
    }

    const double ms_e = ss_e / df_e;
    auto row = [&](const std::string& name, double ss, int df) {
        AnovaRow out;
        out.source = name;
        out.df = df;
        out.ss = ss;
        out.ms = ss / df;
        out.f = out.ms / ms_e;
        out.p = f_tail_probability(out.f, df, df_e);
        return out;
    };

    AnovaTable table;
    table.rows.push_back(row("Genotype", ss_g, df_g));
    table.rows.push_back(row("Retort", ss_t, df_t));
    table.rows.push_back(row("GxT", ss_gt, df_gt));
    AnovaRow resid;
    resid.source = "Residual";
    resid.df = df_e;
    resid.ss = ss_e;
    resid.ms = ms_e;
    resid.f = std::nan("");
    resid.p = std::nan("");
    table.rows.push_back(resid);
    return table;
}

// ---------------------------------------------------------------------------
// Variance components and heritability
// ---------------------------------------------------------------------------

struct VarianceComponents {
    double genotype = 0.0;     // sigma^2_G
    double interaction = 0.0;  // sigma^2_GT
    double residual = 0.0;     // sigma^2_e
    int retort_levels = 0;     // t
    int replicates = 0;        // r
};

// Method of moments from the expected mean squares of the random model;
// negative estimates truncate to zero. Exact for balanced data.
inline VarianceComponents variance_components(const std::vector<StudyObservation>& obs) {
    const detail::CellGrid grid = detail::build_grid(obs);
    const AnovaTable table = anova_two_way(obs);
    const double ms_g = table["Genotype"].ms;
    const double ms_gt = table["GxT"].ms;
    const double ms_e = table["Residual"].ms;
    const int t = static_cast<int>(grid.retorts.size());
    const int r = grid.replicates;

    VarianceComponents vc;
    vc.retort_levels = t;
    vc.replicates = r;
    vc.residual = ms_e;
    vc.interaction = std::max(0.0, (ms_gt - ms_e) / r);
    vc.genotype = std::max(0.0, (ms_g - ms_gt) / (static_cast<double>(r) * t));
    return vc;
}

// Entry-mean heritability H^2 = s2_G / (s2_G + s2_GT/t + s2_e/(t*r)).
inline double heritability(const VarianceComponents& vc) {
    const double denom = vc.genotype + vc.interaction / vc.retort_levels +
                         vc.residual / (static_cast<double>(vc.retort_levels) * vc.replicates);
    if (denom == 0.0) fail(ErrorCode::ZeroVariance, "all variance components are zero");
    return vc.genotype / denom;
}

// ---------------------------------------------------------------------------
// Rater comparison
// ---------------------------------------------------------------------------

// Correlation of each rater with the leave-one-out reference: the mean of
// the other raters' scores on each sample. Used to compare an image trait's
// correlation against the human raters' own agreement.
// ratings[r][i] = rater r's score for sample i.
inline std::vector<double> rater_loo_correlations(
    const std::vector<std::vector<double>>& ratings) {
    if (ratings.size() < 2) fail(ErrorCode::LengthMismatch, "need at least two raters");
    const std::size_t n = ratings[0].size();
    for (const auto& row : ratings) {
        if (row.size() != n) fail(ErrorCode::LengthMismatch, "raters scored different samples");
    }
    std::vector<double> sums(n, 0.0);
    for (const auto& row : ratings) {
        for (std::size_t i = 0; i < n; ++i) sums[i] += row[i];
    }
    std::vector<double> out;
    const double others = static_cast<double>(ratings.size() - 1);
    for (const auto& row : ratings) {
        std::vector<double> reference(n);
        for (std::size_t i = 0; i < n; ++i) reference[i] = (sums[i] - row[i]) / others;
        out.push_back(pearson_r(row, reference));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Study CSV: genotype,retort_min,replicate,trait,value
// ---------------------------------------------------------------------------

struct StudyTable {
    // observations per trait name, manifest order preserved
    std::map<std::string, std::vector<StudyObservation>> traits;
};

inline StudyTable load_study_csv(const std::string& text) {
    const auto rows = csv::parse(text);
    if (rows.empty() || rows[0] != std::vector<std::string>{"genotype", "retort_min", "replicate",
                                                            "trait", "value"}) {
        fail(ErrorCode::MissingColumn,
             "study CSV header must be genotype,retort_min,replicate,trait,value");
    }
    StudyTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 5) fail(ErrorCode::MissingColumn, "study row " + std::to_string(i));
        StudyObservation o;
        o.genotype = f[0];
        o.retort_min = std::stoi(f[1]);
        o.replicate = std::stoi(f[2]);
        o.value = std::stod(f[4]);
        table.traits[f[3]].push_back(std::move(o));
    }
    return table;
}

inline std::string study_to_csv(const StudyTable& table) {
    std::string out = "genotype,retort_min,replicate,trait,value\n";
    char buf[64];
    for (const auto& [trait, obs] : table.traits) {
        for (const auto& o : obs) {
            std::snprintf(buf, sizeof(buf), "%.12g", o.value);
            out += csv::join_row({o.genotype, std::to_string(o.retort_min),
                                  std::to_string(o.replicate), trait, buf});
        }
    }
    return out;
}

}  // namespace beansplit
