#include "wxmood/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxmood/csv.hpp"
#include "wxmood/errors.hpp"

namespace wxmood {

std::string_view to_string(Axis axis) { return axis == Axis::Raw ? "raw" : "z"; }

std::vector<double> even_edges(double lo, double hi, int bins) {
    if (bins < 1)
        throw ConfigError("bin count must be positive");
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int k = 0; k <= bins; ++k)
        edges[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / bins;
    edges.back() = hi;
    return edges;
}

std::optional<std::size_t> bin_index(std::span<const double> edges, double x) {
    if (edges.size() < 2 || !(x >= edges.front()) || !(x <= edges.back()))
        return std::nullopt;
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    const auto k = static_cast<std::size_t>(it - edges.begin());
    return std::min(k, edges.size() - 1) - 1;
}

namespace {

// Order-independent mean: values are summed in sorted order.
double stable_mean(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> axis_value(const ScoredTweet& t, Variable v, Axis axis) {
    return axis == Axis::Raw ? t.conditions[v].raw : t.conditions[v].z;
}

std::pair<double, double> value_range(std::span<const std::optional<double>> values) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : values)
        if (v) {
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
    return {lo, hi};
}

ResponseCurve curve_over_range(std::span<const std::optional<double>> values, std::span<const double> sentiments,
                               std::size_t total, const CurveParams& params) {
    const auto [lo, hi] = value_range(values);
    if (!(lo <= hi))
        throw DataError("response curve: no tweet has a valid value");
    if (lo == hi) {
        const std::vector<double> edges{lo, hi};
        auto c = bin_values(values, sentiments, edges, total, params.min_fraction);
        c.degenerate = true;
        return c;
    }
    return bin_values(values, sentiments, even_edges(lo, hi, params.bins), total, params.min_fraction);
}

} // namespace

ResponseCurve bin_values(std::span<const std::optional<double>> values, std::span<const double> sentiments,
                         std::span<const double> edges, std::size_t total, Fraction min_fraction) {
    if (values.size() != sentiments.size())
        throw DataError("bin_values: values and sentiments differ in length");
    if (edges.size() < 2)
        throw DataError("bin_values: need at least two edges");
    ResponseCurve c;
    c.edges.assign(edges.begin(), edges.end());
    c.total = total;
    c.min_count = static_cast<std::size_t>(min_fraction.ceil_of(static_cast<std::int64_t>(total)));
    const std::size_t nb = edges.size() - 1;
    std::vector<std::vector<double>> members(nb);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i])
            continue;
        ++c.valid;
        if (const auto k = bin_index(edges, *values[i]))
            members[*k].push_back(sentiments[i]);
    }
    c.bins.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        auto& b = c.bins[k];
        b.lo = edges[k];
        b.hi = edges[k + 1];
        b.center = (b.lo + b.hi) / 2.0;
        b.count = members[k].size();
        if (b.count)
            b.mean = stable_mean(members[k]);
        b.included = b.count > 0 && b.count >= c.min_count;
    }
    return c;
}

ResponseCurve bin_response(std::span<const ScoredTweet> tweets, Variable variable, Axis axis,
                           const CurveParams& params) {
    std::vector<std::optional<double>> values;
    std::vector<double> sentiments;
    for (const auto& t : tweets) {
        values.push_back(axis_value(t, variable, axis));
        sentiments.push_back(t.sentiment);
    }
    auto c = curve_over_range(values, sentiments, tweets.size(), params);
    c.variable = variable;
    c.axis = axis;
    return c;
}

std::string curve_csv(const ResponseCurve& curve) {
    std::string out = "bin_center,mean_sentiment,count,included\n";
    for (const auto& b : curve.bins)
        out += fmt::format("{},{},{},{}\n", csv::number(b.center), csv::optional_number(b.mean), b.count,
                           b.included ? 1 : 0);
    return out;
}

std::vector<CurveBin> parse_curve_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "bin_center,mean_sentiment,count,included")
        throw DataError("curve CSV: bad header");
    std::vector<CurveBin> out;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = csv::split(line);
        const auto ctx = fmt::format("curve:{}", n);
        if (f.size() != 4)
            throw DataError(fmt::format("{}: expected 4 fields", ctx));
        CurveBin b;
        b.center = csv::parse_double(f[0], ctx);
        if (!f[1].empty())
            b.mean = csv::parse_double(f[1], ctx);
        b.count = static_cast<std::size_t>(csv::parse_int(f[2], ctx));
        b.included = csv::parse_int(f[3], ctx) != 0;
        out.push_back(b);
    }
    return out;
}

std::array<double, 2> Lattice::center(HexCoord c) const {
    if (tiling == Tiling::Rect)
        return {(c.q + 0.5) * size, (c.r + 0.5) * size};
    return {size * std::sqrt(3.0) * (c.q + c.r / 2.0), size * 1.5 * c.r};
}

HexCoord Lattice::cell_of(double a, double b) const {
    HexCoord guess;
    std::vector<HexCoord> around;
    if (tiling == Tiling::Rect) {
        guess = {static_cast<int>(std::floor(a / size)), static_cast<int>(std::floor(b / size))};
        for (int dq = -1; dq <= 1; ++dq)
            for (int dr = -1; dr <= 1; ++dr)
                around.push_back({guess.q + dq, guess.r + dr});
    } else {
        const double fq = (std::sqrt(3.0) / 3.0 * a - b / 3.0) / size;
        const double fr = (2.0 / 3.0 * b) / size;
        const double fs = -fq - fr;
        double q = std::round(fq), r = std::round(fr), s = std::round(fs);
        const double dq = std::abs(q - fq), dr = std::abs(r - fr), ds = std::abs(s - fs);
        if (dq > dr && dq > ds)
            q = -r - s;
        else if (dr > ds)
            r = -q - s;
        guess = {static_cast<int>(q), static_cast<int>(r)};
        around.push_back(guess);
        for (const auto& [oq, orr] : {std::pair{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}})
            around.push_back({guess.q + oq, guess.r + orr});
    }
    HexCoord best = around.front();
    double best_d = INFINITY;
    for (const auto& c : around) {
        const auto [x, y] = center(c);
        const double d = (a - x) * (a - x) + (b - y) * (b - y);
        if (d < best_d || (d == best_d && c < best)) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

PairGrid pair_grid(std::span<const ScoredTweet> tweets, Variable a, Variable b, const PairParams& params) {
    if (!(params.lattice.size > 0.0) || !std::isfinite(params.lattice.size))
        throw ConfigError("pair grid cell size must be positive");
    PairGrid g;
    g.a = a;
    g.b = b;
    g.axis = params.axis;
    g.lattice = params.lattice;
    g.min_count = params.min_count;
    std::map<HexCoord, std::vector<double>> members;
    for (const auto& t : tweets) {
        const auto va = axis_value(t, a, params.axis);
        const auto vb = axis_value(t, b, params.axis);
        if (!va || !vb)
            continue;
        ++g.valid;
        members[params.lattice.cell_of(*va, *vb)].push_back(t.sentiment);
    }
    if (g.valid == 0)
        throw DataError(fmt::format("pair grid: no tweet has both {} and {} valid", to_string(a), to_string(b)));
    for (auto& [coord, s] : members) {
        PairCell c;
        c.coord = coord;
        const auto ctr = params.lattice.center(coord);
        c.center_a = ctr[0];
        c.center_b = ctr[1];
        c.count = s.size();
        c.mean = stable_mean(s);
        c.suppressed = c.count < params.min_count;
        g.cells.push_back(c);
    }
    return g;
}

std::string pair_grid_csv(const PairGrid& grid) {
    std::string out = "hex_q,hex_r,center_a,center_b,mean_sentiment,count,suppressed\n";
    for (const auto& c : grid.cells)
        out += fmt::format("{},{},{},{},{},{},{}\n", c.coord.q, c.coord.r, csv::number(c.center_a),
                           csv::number(c.center_b), csv::number(c.mean), c.count, c.suppressed ? 1 : 0);
    return out;
}

std::vector<PairCell> parse_pair_grid_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != "hex_q,hex_r,center_a,center_b,mean_sentiment,count,suppressed")
        throw DataError("pair grid CSV: bad header");
    std::vector<PairCell> out;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = csv::split(line);
        const auto ctx = fmt::format("pairs:{}", n);
        if (f.size() != 7)
            throw DataError(fmt::format("{}: expected 7 fields", ctx));
        PairCell c;
        c.coord = {static_cast<int>(csv::parse_int(f[0], ctx)), static_cast<int>(csv::parse_int(f[1], ctx))};
        c.center_a = csv::parse_double(f[2], ctx);
        c.center_b = csv::parse_double(f[3], ctx);
        c.mean = csv::parse_double(f[4], ctx);
        c.count = static_cast<std::size_t>(csv::parse_int(f[5], ctx));
        c.suppressed = csv::parse_int(f[6], ctx) != 0;
        out.push_back(c);
    }
    return out;
}

NormalizedGroup normalize_sentiment(std::span<const double> sentiments) {
    if (sentiments.size() < 2)
        throw DataError("normalize_sentiment: need at least two tweets");
    NormalizedGroup g;
    g.params = mean_sd(sentiments);
    const auto [lo, hi] = std::minmax_element(sentiments.begin(), sentiments.end());
    if (*lo == *hi || !(g.params.sd > 0.0))
        throw DataError("normalize_sentiment: sentiments have zero variance");
    g.values.reserve(sentiments.size());
    for (double s : sentiments)
        g.values.push_back((s - g.params.mean) / g.params.sd);
    return g;
}

std::array<std::vector<double>, 2> shared_bin_means(const ResponseCurve& a, const ResponseCurve& b) {
    if (a.edges != b.edges)
        throw DataError("curves do not share bin edges");
    std::array<std::vector<double>, 2> out;
    for (std::size_t k = 0; k < a.bins.size(); ++k)
        if (a.bins[k].included && b.bins[k].included) {
            out[0].push_back(*a.bins[k].mean);
            out[1].push_back(*b.bins[k].mean);
        }
    return out;
}

RegionalComparison regional_compare(std::span<const ScoredTweet> tweets,
                                    std::span<const std::optional<std::string>> groups,
                                    const std::array<std::string, 2>& names, Variable variable,
                                    const CurveParams& params) {
    if (groups.size() != tweets.size())
        throw DataError("regional_compare: group labels are not parallel to the tweets");
    if (names[0] == names[1])
        throw ConfigError("regional_compare: the two group names must differ");

    RegionalComparison cmp;
    cmp.variable = variable;
    std::array<std::vector<std::size_t>, 2> members;
    std::vector<std::optional<double>> pooled_raw, pooled_z;
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        if (!groups[i])
            continue;
        for (std::size_t g = 0; g < 2; ++g)
            if (*groups[i] == names[g]) {
                members[g].push_back(i);
                pooled_raw.push_back(tweets[i].conditions[variable].raw);
                pooled_z.push_back(tweets[i].conditions[variable].z);
            }
    }
    auto edges_of = [&](const std::vector<std::optional<double>>& vals, const char* what) {
        const auto [lo, hi] = value_range(vals);
        if (!(lo <= hi))
            throw DataError(fmt::format("regional_compare: no {} {} values in either group", what, to_string(variable)));
        return lo == hi ? std::vector<double>{lo, hi} : even_edges(lo, hi, params.bins);
    };
    const auto raw_edges = edges_of(pooled_raw, "raw");
    const auto z_edges = edges_of(pooled_z, "z");

    for (std::size_t g = 0; g < 2; ++g) {
        auto& gc = cmp.groups[g];
        gc.name = names[g];
        gc.tweets = members[g].size();
        std::vector<double> sent;
        std::vector<std::optional<double>> raw, z;
        for (const auto i : members[g]) {
            sent.push_back(tweets[i].sentiment);
            raw.push_back(tweets[i].conditions[variable].raw);
            z.push_back(tweets[i].conditions[variable].z);
        }
        const auto norm = normalize_sentiment(sent);
        gc.sentiment = norm.params;
        gc.raw = bin_values(raw, sent, raw_edges, tweets.size(), params.min_fraction);
        gc.raw.variable = variable;
        gc.raw.axis = Axis::Raw;
        gc.raw.degenerate = raw_edges.size() == 2 && raw_edges[0] == raw_edges[1];
        gc.normalized = bin_values(z, norm.values, z_edges, tweets.size(), params.min_fraction);
        gc.normalized.variable = variable;
        gc.normalized.axis = Axis::Z;
        gc.normalized.degenerate = z_edges.size() == 2 && z_edges[0] == z_edges[1];
    }
    const auto raw_pairs = shared_bin_means(cmp.groups[0].raw, cmp.groups[1].raw);
    const auto norm_pairs = shared_bin_means(cmp.groups[0].normalized, cmp.groups[1].normalized);
    cmp.raw_shared_bins = raw_pairs[0].size();
    cmp.normalized_shared_bins = norm_pairs[0].size();
    cmp.raw = pearson_r_p(raw_pairs[0], raw_pairs[1]);
    cmp.normalized = pearson_r_p(norm_pairs[0], norm_pairs[1]);
    return cmp;
}

namespace {

nlohmann::ordered_json curve_json(const ResponseCurve& c) {
    nlohmann::ordered_json j;
    j["variable"] = to_string(c.variable);
    j["axis"] = to_string(c.axis);
    j["degenerate"] = c.degenerate;
    j["valid"] = c.valid;
    j["min_count"] = c.min_count;
    j["edges"] = c.edges;
    auto bins = nlohmann::ordered_json::array();
    for (const auto& b : c.bins) {
        nlohmann::ordered_json jb;
        jb["bin_center"] = b.center;
        jb["mean_sentiment"] = b.mean ? nlohmann::ordered_json(*b.mean) : nlohmann::ordered_json(nullptr);
        jb["count"] = b.count;
        jb["included"] = b.included;
        bins.push_back(std::move(jb));
    }
    j["bins"] = std::move(bins);
    return j;
}

nlohmann::ordered_json opt(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace

std::string regional_json(const RegionalComparison& cmp) {
    nlohmann::ordered_json j;
    j["variable"] = to_string(cmp.variable);
    j["raw_r"] = opt(cmp.raw ? std::optional(cmp.raw->r) : std::nullopt);
    j["raw_p"] = opt(cmp.raw ? std::optional(cmp.raw->p) : std::nullopt);
    j["norm_r"] = opt(cmp.normalized ? std::optional(cmp.normalized->r) : std::nullopt);
    j["norm_p"] = opt(cmp.normalized ? std::optional(cmp.normalized->p) : std::nullopt);
    j["shared_bins"] = {{"raw", cmp.raw_shared_bins}, {"normalized", cmp.normalized_shared_bins}};
    auto groups = nlohmann::ordered_json::array();
    for (const auto& g : cmp.groups) {
        nlohmann::ordered_json jg;
        jg["name"] = g.name;
        jg["tweets"] = g.tweets;
        jg["sentiment_mean"] = g.sentiment.mean;
        jg["sentiment_sd"] = g.sentiment.sd;
        jg["raw_curve"] = curve_json(g.raw);
        jg["normalized_curve"] = curve_json(g.normalized);
        groups.push_back(std::move(jg));
    }
    j["groups"] = std::move(groups);
    return j.dump(2) + "\n";
}

} // namespace wxmood
