#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wxmood/fraction.hpp"
#include "wxmood/scorer.hpp"
#include "wxmood/stats.hpp"
#include "wxmood/weather_grid.hpp"

namespace wxmood {

enum class Axis { Raw, Z };

std::string_view to_string(Axis axis);

struct CurveBin {
    double lo = 0.0;
    double hi = 0.0;
    double center = 0.0;
    std::optional<double> mean; // nullopt for empty bins
    std::size_t count = 0;
    bool included = false;
};

struct ResponseCurve {
    Variable variable = Variable::Tmax;
    Axis axis = Axis::Z;
    std::vector<double> edges; // bins + 1 values
    std::vector<CurveBin> bins;
    bool degenerate = false;   // every valid value identical: one bin
    std::size_t total = 0;     // tweets passed in (denominator for inclusion)
    std::size_t valid = 0;     // tweets with a value on the axis
    std::size_t min_count = 0; // ceil(min_fraction * total)
};

struct CurveParams {
    int bins = 30;
    Fraction min_fraction = Fraction::from_double(0.001);
};

/// Equal-width edges from lo to hi (last edge exactly hi).
std::vector<double> even_edges(double lo, double hi, int bins);

/// Bin index for x under right-open bins with the last one closed; nullopt
/// outside [edges.front(), edges.back()].
std::optional<std::size_t> bin_index(std::span<const double> edges, double x);

/// Core of bin_response: values (nullopt = invalid) against sentiments, with
/// explicit edges. `total` is the inclusion denominator.
ResponseCurve bin_values(std::span<const std::optional<double>> values, std::span<const double> sentiments,
                         std::span<const double> edges, std::size_t total, Fraction min_fraction);

/// Mean sentiment per equal-width bin over [min, max] of the valid values.
/// Throws DataError when no tweet has a valid value.
ResponseCurve bin_response(std::span<const ScoredTweet> tweets, Variable variable, Axis axis,
                           const CurveParams& params = {});

std::string curve_csv(const ResponseCurve& curve);
/// Reads back bin centers, means, counts and inclusion flags.
std::vector<CurveBin> parse_curve_csv(std::string_view text);

enum class Tiling { Hex, Rect };

struct HexCoord {
    int q = 0;
    int r = 0;
    friend auto operator<=>(const HexCoord&, const HexCoord&) = default;
};

/// Pointy-top axial lattice with hex radius `size`; Rect uses squares of side
/// `size` with q = column and r = row.
struct Lattice {
    Tiling tiling = Tiling::Hex;
    double size = 0.25;

    std::array<double, 2> center(HexCoord c) const;
    /// Cell whose center is nearest (ties go to the smaller (q, r)).
    HexCoord cell_of(double a, double b) const;
};

struct PairCell {
    HexCoord coord;
    double center_a = 0.0;
    double center_b = 0.0;
    double mean = 0.0;
    std::size_t count = 0;
    bool suppressed = false;
};

struct PairGrid {
    Variable a = Variable::Tmax;
    Variable b = Variable::Humidity;
    Axis axis = Axis::Z;
    Lattice lattice;
    std::size_t min_count = 5;
    std::vector<PairCell> cells; // sorted by (q, r)
    std::size_t valid = 0;
};

struct PairParams {
    Lattice lattice;
    std::size_t min_count = 5;
    Axis axis = Axis::Z;
};

/// Throws DataError when no tweet has both variables valid.
PairGrid pair_grid(std::span<const ScoredTweet> tweets, Variable a, Variable b, const PairParams& params = {});

std::string pair_grid_csv(const PairGrid& grid);
std::vector<PairCell> parse_pair_grid_csv(std::string_view text);

struct NormalizedGroup {
    std::vector<double> values;
    MeanSd params;
};

/// (s - mean) / sd with the population sd. Throws DataError for fewer than two
/// values or zero variance.
NormalizedGroup normalize_sentiment(std::span<const double> sentiments);

struct GroupCurves {
    std::string name;
    std::size_t tweets = 0;
    ResponseCurve raw;        // raw variable, raw sentiment
    ResponseCurve normalized; // z variable, group-normalised sentiment
    MeanSd sentiment;
};

struct RegionalComparison {
    Variable variable = Variable::Tmax;
    std::array<GroupCurves, 2> groups;
    std::optional<Correlation> raw;
    std::optional<Correlation> normalized;
    std::size_t raw_shared_bins = 0;
    std::size_t normalized_shared_bins = 0;
};

/// Means of the bins included in both curves (same edges required).
std::array<std::vector<double>, 2> shared_bin_means(const ResponseCurve& a, const ResponseCurve& b);

/// Curves for two named groups over edges pooled from both groups; the
/// inclusion denominator is every tweet passed in. `groups` is parallel to
/// `tweets`.
RegionalComparison regional_compare(std::span<const ScoredTweet> tweets,
                                    std::span<const std::optional<std::string>> groups,
                                    const std::array<std::string, 2>& names, Variable variable,
                                    const CurveParams& params = {});

std::string regional_json(const RegionalComparison& cmp);

} // namespace wxmood
