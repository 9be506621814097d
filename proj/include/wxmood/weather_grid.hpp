#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wxmood/corpus.hpp"
#include "wxmood/geometry.hpp"
#include "wxmood/regions.hpp"
#include "wxmood/time.hpp"

namespace wxmood {

/// Daily maxima of the five studied conditions.
enum class Variable : std::uint8_t { Tmax, Precip, Wind, Humidity, Pressure };

inline constexpr std::array<Variable, 5> kVariables{Variable::Tmax, Variable::Precip, Variable::Wind,
                                                    Variable::Humidity, Variable::Pressure};
inline constexpr std::size_t kVariableCount = kVariables.size();

std::string_view to_string(Variable v);
std::optional<Variable> parse_variable(std::string_view name);
inline std::size_t index_of(Variable v) { return static_cast<std::size_t>(v); }

/// Regular lat/lon lattice; node (i, j) sits at (lat_origin + i*dlat, lon_origin + j*dlon).
struct GridSpec {
    double lat_origin = 0.0;
    double lon_origin = 0.0;
    double dlat = 0.25;
    double dlon = 0.25;
    int n_lat = 1;
    int n_lon = 1;

    std::size_t cell_count() const { return static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lon); }
    std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i) * n_lon + j; }
    double node_lat(int i) const { return lat_origin + i * dlat; }
    double node_lon(int j) const { return lon_origin + j * dlon; }

    /// Throws DataError unless dlat, dlon > 0 and n_lat, n_lon >= 1.
    void validate() const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

GridSpec parse_grid_spec(std::string_view json_text);
std::string grid_spec_json(const GridSpec& spec);

/// One day of one variable across the grid; NaN marks a missing cell.
struct DailyField {
    Date date;
    Variable variable;
    std::vector<double> values;
};

/// Dense daily store, indexed by (variable, day offset, cell).
class GridDataset {
public:
    GridDataset(GridSpec spec, Date first, Date last);

    const GridSpec& spec() const { return spec_; }
    Date first_date() const { return first_; }
    Date last_date() const { return last_; }
    std::size_t day_count() const { return days_; }
    bool covers(Date d) const { return first_ <= d && d <= last_; }

    /// Stores a field; throws DataError on a shape mismatch or a humidity/precip
    /// value outside its physical range.
    void set_field(const DailyField& field);
    void set_value(Variable v, Date d, std::size_t cell, double value);

    bool has_field(Variable v, Date d) const;
    /// Missing, absent-field or out-of-range dates give nullopt.
    std::optional<double> value(Variable v, Date d, std::size_t cell) const;

    std::size_t field_count() const;
    /// Dates inside [first, last] with no field for any variable.
    std::vector<Date> gaps() const;
    /// Fraction of (day, cell) slots holding a value, over the full date range.
    double coverage(Variable v) const;

private:
    std::size_t slot(Variable v, Date d) const;

    GridSpec spec_;
    Date first_;
    Date last_;
    std::size_t days_;
    std::vector<std::vector<double>> values_;   // per variable: days * cells
    std::vector<std::vector<std::uint8_t>> present_; // per variable: days
};

/// Reads grid CSV files ("date,variable,lat_idx,lon_idx,value"; empty value =
/// missing). Each file's GridSpec comes from "<stem>.grid.json" beside it, or
/// "grid.json" in its directory; specs must agree across files.
GridDataset load_grid(std::span<const std::filesystem::path> csv_files);
/// All *.csv files in a directory, in name order.
GridDataset load_grid_directory(const std::filesystem::path& dir);

/// Writes dataset rows in the grid CSV format (all variables, date order).
std::string grid_csv(const GridDataset& dataset, std::optional<int> only_year = std::nullopt);

struct YearWindow {
    int start_year = 2011;
    int end_year = 2020;

    bool contains(Date d) const {
        const int y = year_of(d);
        return start_year <= y && y <= end_year;
    }
};

struct ClimatologyCell {
    double mu = 0.0;
    double sigma = 0.0;
    std::int64_t n_obs = 0;
    bool usable = false;
};

/// Per-cell, per-variable mean and population standard deviation over a
/// reference window of years.
class Climatology {
public:
    Climatology(GridSpec spec, YearWindow window, std::int64_t min_obs);

    const GridSpec& spec() const { return spec_; }
    const YearWindow& window() const { return window_; }
    std::int64_t min_obs() const { return min_obs_; }

    const ClimatologyCell& at(Variable v, std::size_t cell) const { return cells_[index_of(v)][cell]; }
    ClimatologyCell& at(Variable v, std::size_t cell) { return cells_[index_of(v)][cell]; }

    /// Recomputes the usable flag: n_obs >= min_obs and sigma > 0.
    void refresh_usable();

private:
    GridSpec spec_;
    YearWindow window_;
    std::int64_t min_obs_;
    std::array<std::vector<ClimatologyCell>, kVariableCount> cells_;
};

inline constexpr std::int64_t kDefaultMinObs = 100;

Climatology compute_climatology(const GridDataset& dataset, YearWindow window,
                                std::int64_t min_obs = kDefaultMinObs);

/// CSV "variable,lat_idx,lon_idx,mu,sigma,n_obs" preceded by a "# window:"
/// comment line; cells without observations have empty mu/sigma.
std::string climatology_csv(const Climatology& clim);
Climatology parse_climatology_csv(std::string_view text, const GridSpec& spec);

/// (value - mu) / sigma, or nullopt when sigma <= 0.
std::optional<double> z_score(double value, double mu, double sigma);

/// Grid cells a geometry samples: every node inside a bbox (boundary
/// included), else the single node nearest to the point / bbox center.
std::vector<std::size_t> sample_cells(const Geometry& geometry, const GridSpec& spec);

using RawConditions = std::array<std::optional<double>, kVariableCount>;

/// Unweighted mean of the non-missing values over sample_cells; all
/// variables invalid when the date is outside the dataset.
RawConditions conditions_at(const Geometry& geometry, Date date, const GridDataset& dataset);

struct ConditionValue {
    std::optional<double> raw;
    std::optional<double> z;
    double mu = 0.0;    // baseline used for z (meaningful when z is set)
    double sigma = 0.0;
};

struct ConditionAnnotation {
    std::array<ConditionValue, kVariableCount> values;

    const ConditionValue& operator[](Variable v) const { return values[index_of(v)]; }
    ConditionValue& operator[](Variable v) { return values[index_of(v)]; }
    /// False when no variable carries a raw value; such records are excluded.
    bool usable() const;
};

/// Raw value as conditions_at; the baseline is the mean mu and mean sigma of
/// the same cells, and z is only set when every contributing cell has a
/// usable climatology.
ConditionAnnotation annotate(const Geometry& geometry, Date date, const GridDataset& dataset,
                             const Climatology& climatology);

struct AnnotationResult {
    std::vector<ConditionAnnotation> annotations; // parallel to the records
    std::size_t unusable_records = 0;
    std::size_t records_not_after_window = 0; // timestamps not later than the climatology window
};

/// Grid cells whose node lies inside (or on the boundary of) a region.
std::vector<std::size_t> cells_in_region(const GridSpec& spec, const Region& region);

/// Mean of all non-missing values of `v` over `cells` on dates whose month is
/// listed (1-12), optionally restricted to one year. nullopt when no values.
std::optional<double> seasonal_mean(const GridDataset& dataset, Variable v, std::span<const std::size_t> cells,
                                    std::span<const unsigned> months, std::optional<int> year = std::nullopt);

AnnotationResult annotate_tweets(std::span<const TweetRecord> records, const GridDataset& dataset,
                                 const Climatology& climatology, unsigned threads = 1);

} // namespace wxmood
