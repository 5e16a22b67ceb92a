#include "ordo/regression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace ordo {

// ----------------------------------------------------------------- dataset

void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "query_id,node_id," << feature_csv_header() << "\n";
    for (const auto& r : d.rows) {
        if (!r.x.has(46))
            throw std::runtime_error("dataset row without target (query " +
                                     r.query_id + ")");
        os << r.query_id << "," << r.node_id << "," << feature_csv_row(r.x) << "\n";
    }
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty dataset " + path);
    if (line != "query_id,node_id," + feature_csv_header())
        throw std::runtime_error("unexpected dataset header in " + path);
    Dataset d;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        size_t c1 = line.find(',');
        size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("short dataset row in " + path);
        DataRow r;
        r.query_id = line.substr(0, c1);
        r.node_id = std::atoi(line.c_str() + c1 + 1);
        r.x = feature_row_from_csv(line.substr(c2 + 1));
        if (!r.x.has(46))
            throw std::runtime_error("dataset row without target in " + path);
        d.rows.push_back(std::move(r));
    }
    return d;
}

// ----------------------------------------------------------- normalization

double NormalizationStats::z(int i, const FeatureVector& f) const {
    if (!f.has(i)) return 0;  // missing = the column mean
    double s = stdev[i - 1];
    if (s <= 0) return 0;
    return (f.get(i) - mean[i - 1]) / s;
}

NormalizationStats compute_normalization(const Dataset& d,
                                         const std::array<bool, kNumPredictors>& mask) {
    NormalizationStats st;
    for (int i = 1; i <= kNumPredictors; ++i) {
        if (!mask[i - 1]) continue;
        double sum = 0;
        long n = 0;
        for (const auto& r : d.rows)
            if (r.x.has(i)) {
                sum += r.x.get(i);
                ++n;
            }
        if (n == 0) continue;
        double mu = sum / static_cast<double>(n);
        double ss = 0;
        for (const auto& r : d.rows)
            if (r.x.has(i)) {
                double dv = r.x.get(i) - mu;
                ss += dv * dv;
            }
        st.mean[i - 1] = mu;
        st.stdev[i - 1] = std::sqrt(ss / static_cast<double>(n));  // population
        st.count[i - 1] = n;
    }
    return st;
}

double transform_target(double answers) { return std::log10(1.0 + answers); }

// ------------------------------------------------------------------ solver

namespace {

// Gram accumulation over [1 | Z | y]: slot 0 is the intercept, slots
// 1..m the z-scored predictors in `feats` order, slot m+1 the target.
struct Gram {
    std::vector<std::vector<double>> a;
    std::vector<int> feats;  // feature id per predictor slot (1-based ids)
    long n = 0;
    double sst = 0;  // total sum of squares of y around its mean
};

Gram build_gram(const Dataset& d, const NormalizationStats& st,
                const std::vector<int>& feats) {
    Gram g;
    g.feats = feats;
    size_t m = feats.size();
    g.a.assign(m + 2, std::vector<double>(m + 2, 0));
    g.n = static_cast<long>(d.rows.size());
    double ysum = 0;
    std::vector<double> row(m + 2);
    for (const auto& r : d.rows) {
        row[0] = 1;
        for (size_t j = 0; j < m; ++j) row[j + 1] = st.z(feats[j], r.x);
        row[m + 1] = transform_target(r.x.get(46));
        ysum += row[m + 1];
        for (size_t i = 0; i < m + 2; ++i)
            for (size_t j = i; j < m + 2; ++j) g.a[i][j] += row[i] * row[j];
    }
    for (size_t i = 0; i < m + 2; ++i)
        for (size_t j = 0; j < i; ++j) g.a[i][j] = g.a[j][i];
    double ybar = g.n ? ysum / static_cast<double>(g.n) : 0;
    g.sst = g.a[m + 1][m + 1] - static_cast<double>(g.n) * ybar * ybar;
    if (g.sst < 0) g.sst = 0;
    return g;
}

// Gaussian elimination with partial pivoting; false on a singular system.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& out) {
    size_t n = a.size();
    double scale = 0;
    for (size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a[i][i]));
    if (scale <= 0) scale = 1;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-10 * scale) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            if (f == 0) continue;
            for (size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    out.assign(n, 0);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a[i][j] * out[j];
        out[i] = s / a[i][i];
    }
    return true;
}

struct GramFit {
    std::vector<double> w;  // per selected slot, w[0] = intercept
    double ssres = 0;
    bool ridge = false;
};

// Solve the normal equations restricted to `slots` (subset of 1..m, always
// with the intercept slot 0 prepended).
GramFit fit_from_gram(const Gram& g, const std::vector<size_t>& slots) {
    size_t m = slots.size() + 1;
    size_t yi = g.a.size() - 1;
    std::vector<size_t> idx(m);
    idx[0] = 0;
    for (size_t j = 0; j < slots.size(); ++j) idx[j + 1] = slots[j];
    std::vector<std::vector<double>> A(m, std::vector<double>(m));
    std::vector<double> b(m);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) A[i][j] = g.a[idx[i]][idx[j]];
        b[i] = g.a[idx[i]][yi];
    }
    GramFit fit;
    if (!solve_linear(A, b, fit.w)) {
        fit.ridge = true;
        double tr = 0;
        for (size_t i = 0; i < m; ++i) tr += A[i][i];
        double lambda = 1e-8 * tr / static_cast<double>(m);
        if (lambda <= 0) lambda = 1e-12;
        for (size_t i = 0; i < m; ++i) A[i][i] += lambda;
        if (!solve_linear(A, b, fit.w))
            throw std::runtime_error("normal equations unsolvable even with ridge");
    }
    // ssres = y'y - w'X'y for the least-squares solution
    double wxy = 0;
    for (size_t i = 0; i < m; ++i) wxy += fit.w[i] * b[i];
    fit.ssres = g.a[yi][yi] - wxy;
    if (fit.ssres < 0) fit.ssres = 0;
    return fit;
}

std::vector<int> mask_to_feats(const std::array<bool, kNumPredictors>& mask) {
    std::vector<int> feats;
    for (int i = 1; i <= kNumPredictors; ++i)
        if (mask[i - 1]) feats.push_back(i);
    return feats;
}

}  // namespace

RegressionModel fit_ols(const Dataset& d,
                        const std::array<bool, kNumPredictors>& mask) {
    RegressionModel m;
    m.mask = mask;
    m.norm = compute_normalization(d, mask);
    std::vector<int> feats;
    for (int i : mask_to_feats(mask))
        if (m.norm.count[i - 1] > 0 && m.norm.stdev[i - 1] > 0)
            feats.push_back(i);  // constant/all-missing columns keep weight 0
    if (static_cast<long>(d.rows.size()) <= static_cast<long>(feats.size()))
        throw std::invalid_argument("need more rows than predictors");
    Gram g = build_gram(d, m.norm, feats);
    std::vector<size_t> slots(feats.size());
    std::iota(slots.begin(), slots.end(), 1);
    GramFit fit = fit_from_gram(g, slots);
    m.intercept = fit.w[0];
    for (size_t j = 0; j < feats.size(); ++j) m.w[feats[j] - 1] = fit.w[j + 1];
    m.ridge_fallback = fit.ridge;
    double n = static_cast<double>(d.rows.size());
    m.train_rmse = std::sqrt(fit.ssres / n);
    m.r2 = g.sst > 0 ? 1.0 - fit.ssres / g.sst : 1.0;
    double p = static_cast<double>(feats.size());
    m.adj_r2 = (n - p - 1) > 0 ? 1.0 - (1.0 - m.r2) * (n - 1) / (n - p - 1) : m.r2;
    return m;
}

double predict(const RegressionModel& m, const FeatureVector& f) {
    double s = m.intercept;
    for (int i = 1; i <= kNumPredictors; ++i)
        if (m.mask[i - 1] && m.w[i - 1] != 0) s += m.w[i - 1] * m.norm.z(i, f);
    return s;
}

double rmse(const RegressionModel& m, const Dataset& d) {
    if (d.rows.empty()) return 0;
    double ss = 0;
    for (const auto& r : d.rows) {
        double e = predict(m, r.x) - transform_target(r.x.get(46));
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(d.rows.size()));
}

// -------------------------------------------------------- cross-validation

namespace {

Dataset take(const Dataset& d, const std::vector<size_t>& idx, size_t from,
             size_t to) {
    Dataset out;
    for (size_t k = from; k < to; ++k) out.rows.push_back(d.rows[idx[k]]);
    return out;
}

}  // namespace

CvResult cross_validate_subsample(const Dataset& d,
                                  const std::array<bool, kNumPredictors>& mask,
                                  double fraction, int repeats, uint64_t seed) {
    if (d.rows.size() < 2) throw std::invalid_argument("need at least 2 rows");
    CvResult cv;
    std::mt19937_64 rng(seed);
    std::vector<size_t> idx(d.rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    size_t ntrain = static_cast<size_t>(fraction * static_cast<double>(idx.size()));
    ntrain = std::min(std::max<size_t>(ntrain, 1), idx.size() - 1);
    for (int rep = 0; rep < repeats; ++rep) {
        std::shuffle(idx.begin(), idx.end(), rng);
        RegressionModel m = fit_ols(take(d, idx, 0, ntrain), mask);
        cv.fold_rmse.push_back(rmse(m, take(d, idx, ntrain, idx.size())));
    }
    for (double r : cv.fold_rmse) cv.mean_rmse += r;
    if (!cv.fold_rmse.empty())
        cv.mean_rmse /= static_cast<double>(cv.fold_rmse.size());
    return cv;
}

CvResult cross_validate_kfold(const Dataset& d,
                              const std::array<bool, kNumPredictors>& mask, int k,
                              uint64_t seed) {
    if (k < 2 || d.rows.size() < 2 * static_cast<size_t>(k))
        throw std::invalid_argument("k-fold needs at least 2k rows");
    CvResult cv;
    std::mt19937_64 rng(seed);
    std::vector<size_t> idx(d.rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    size_t n = idx.size();
    for (int f = 0; f < k; ++f) {
        // fold f owns [f*n/k, (f+1)*n/k): disjoint, exhaustive, sizes +-1
        size_t lo = f * n / k, hi = (f + 1) * n / k;
        Dataset train;
        for (size_t j = 0; j < n; ++j)
            if (j < lo || j >= hi) train.rows.push_back(d.rows[idx[j]]);
        RegressionModel m = fit_ols(train, mask);
        cv.fold_rmse.push_back(rmse(m, take(d, idx, lo, hi)));
    }
    for (double r : cv.fold_rmse) cv.mean_rmse += r;
    cv.mean_rmse /= static_cast<double>(cv.fold_rmse.size());
    return cv;
}

// -------------------------------------------------------- subset selection

SubsetResult subset_select(const Dataset& d, const std::vector<int>& candidates,
                           int k, SubsetMethod method) {
    if (k <= 0 || k > static_cast<int>(candidates.size()))
        throw std::invalid_argument("subset size out of range");
    if (method == SubsetMethod::exhaustive && candidates.size() > 20)
        throw std::invalid_argument("exhaustive selection limited to 20 candidates");
    std::array<bool, kNumPredictors> all_mask{};
    for (int c : candidates) {
        if (c < 1 || c > kNumPredictors)
            throw std::invalid_argument("candidate feature id out of range");
        all_mask[c - 1] = true;
    }
    NormalizationStats st = compute_normalization(d, all_mask);
    std::vector<int> feats;  // usable candidates, constant columns excluded
    for (int c : candidates)
        if (st.count[c - 1] > 0 && st.stdev[c - 1] > 0) feats.push_back(c);
    Gram g = build_gram(d, st, feats);
    auto r2_of = [&](const std::vector<size_t>& slots) {
        GramFit f = fit_from_gram(g, slots);
        return g.sst > 0 ? 1.0 - f.ssres / g.sst : 1.0;
    };

    SubsetResult res;
    std::vector<size_t> chosen;
    size_t m = feats.size();
    size_t want = std::min<size_t>(k, m);
    if (method == SubsetMethod::forward) {
        std::vector<bool> used(m + 1, false);
        while (chosen.size() < want) {
            double best = -2;
            size_t best_s = 0;
            for (size_t s = 1; s <= m; ++s) {
                if (used[s]) continue;
                chosen.push_back(s);
                double r2 = r2_of(chosen);
                chosen.pop_back();
                if (r2 > best) {
                    best = r2;
                    best_s = s;
                }
            }
            used[best_s] = true;
            chosen.push_back(best_s);
            res.sizes.push_back(static_cast<int>(chosen.size()));
            res.r2_curve.push_back(best);
        }
    } else if (method == SubsetMethod::backward) {
        chosen.resize(m);
        std::iota(chosen.begin(), chosen.end(), 1);
        res.sizes.push_back(static_cast<int>(m));
        res.r2_curve.push_back(r2_of(chosen));
        while (chosen.size() > want) {
            double best = -2;
            size_t best_j = 0;
            for (size_t j = 0; j < chosen.size(); ++j) {
                std::vector<size_t> trial = chosen;
                trial.erase(trial.begin() + static_cast<long>(j));
                double r2 = r2_of(trial);
                if (r2 > best) {
                    best = r2;
                    best_j = j;
                }
            }
            chosen.erase(chosen.begin() + static_cast<long>(best_j));
            res.sizes.push_back(static_cast<int>(chosen.size()));
            res.r2_curve.push_back(best);
        }
    } else {
        // exhaustive: every subset of size <= k, best R-squared per size
        std::vector<double> best_r2(want + 1, -2);
        std::vector<std::vector<size_t>> best_set(want + 1);
        for (uint64_t bits = 1; bits < (uint64_t(1) << m); ++bits) {
            size_t sz = static_cast<size_t>(__builtin_popcountll(bits));
            if (sz > want) continue;
            std::vector<size_t> slots;
            for (size_t s = 0; s < m; ++s)
                if (bits & (uint64_t(1) << s)) slots.push_back(s + 1);
            double r2 = r2_of(slots);
            if (r2 > best_r2[sz]) {
                best_r2[sz] = r2;
                best_set[sz] = slots;
            }
        }
        double overall = -2;
        for (size_t sz = 1; sz <= want; ++sz) {
            res.sizes.push_back(static_cast<int>(sz));
            res.r2_curve.push_back(best_r2[sz]);
            if (best_r2[sz] > overall) {
                overall = best_r2[sz];
                chosen = best_set[sz];
            }
        }
    }
    for (size_t s : chosen) res.mask[feats[s - 1] - 1] = true;
    return res;
}

// ------------------------------------------------------------------ deploy

std::array<bool, kNumPredictors> default_mask() {
    std::array<bool, kNumPredictors> m{};
    // the nine bold picks plus depth
    for (int i : {5, 8, 9, 12, 16, 26, 29, 31, 32, 36}) m[i - 1] = true;
    return m;
}

double f_sl(const SearchGraph& g, const SearchNode& n, const KnowledgeBase& kb,
            const SearchConfig& cfg, const RegressionModel& m) {
    std::array<bool, kNumFeatures> need{};
    for (int i = 1; i <= kNumPredictors; ++i)
        if (m.mask[i - 1] && m.w[i - 1] != 0) need[i - 1] = true;
    FeatureVector f = extract_features(g, n, kb, cfg, &need);
    return predict(m, f);
}

// ---------------------------------------------------------------- model io

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_model(const RegressionModel& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    const auto& names = FeatureVector::names();
    for (int i = 1; i <= kNumPredictors; ++i)
        os << names[i - 1] << " " << fmt(m.norm.mean[i - 1]) << " "
           << fmt(m.norm.stdev[i - 1]) << " " << fmt(m.w[i - 1]) << " "
           << (m.mask[i - 1] ? 1 : 0) << "\n";
    os << "intercept " << fmt(m.intercept) << "\n";
    os << "diag " << fmt(m.train_rmse) << " " << fmt(m.r2) << " " << fmt(m.adj_r2)
       << "\n";
    os << "ridge " << (m.ridge_fallback ? 1 : 0) << "\n";
}

RegressionModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    const auto& names = FeatureVector::names();
    std::map<std::string, int> by_name;
    for (int i = 1; i <= kNumPredictors; ++i) by_name[names[i - 1]] = i;
    RegressionModel m;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "intercept") {
            ss >> m.intercept;
        } else if (key == "diag") {
            ss >> m.train_rmse >> m.r2 >> m.adj_r2;
        } else if (key == "ridge") {
            int v = 0;
            ss >> v;
            m.ridge_fallback = v != 0;
        } else {
            auto it = by_name.find(key);
            if (it == by_name.end())
                throw std::runtime_error("unknown model line '" + key + "' in " + path);
            int i = it->second;
            int sel = 0;
            ss >> m.norm.mean[i - 1] >> m.norm.stdev[i - 1] >> m.w[i - 1] >> sel;
            m.mask[i - 1] = sel != 0;
            m.norm.count[i - 1] = 1;  // presence marker; counts are not persisted
        }
        if (ss.fail())
            throw std::runtime_error("malformed model line '" + line + "' in " + path);
    }
    return m;
}

}  // namespace ordo
