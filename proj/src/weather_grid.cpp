#include "wxmood/weather_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxmood/csv.hpp"
#include "wxmood/errors.hpp"
#include "wxmood/parallel.hpp"

namespace wxmood {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
constexpr double kIndexEps = 1e-9;
} // namespace

std::string_view to_string(Variable v) {
    switch (v) {
    case Variable::Tmax: return "tmax";
    case Variable::Precip: return "precip";
    case Variable::Wind: return "wind";
    case Variable::Humidity: return "humidity";
    case Variable::Pressure: return "pressure";
    }
    return "unknown";
}

std::optional<Variable> parse_variable(std::string_view name) {
    for (Variable v : kVariables)
        if (to_string(v) == name)
            return v;
    return std::nullopt;
}

void GridSpec::validate() const {
    if (!(dlat > 0.0) || !(dlon > 0.0) || !std::isfinite(dlat) || !std::isfinite(dlon))
        throw DataError("grid spacing must be positive");
    if (n_lat < 1 || n_lon < 1)
        throw DataError("grid must have at least one node per axis");
    if (!std::isfinite(lat_origin) || !std::isfinite(lon_origin))
        throw DataError("grid origin must be finite");
}

GridSpec parse_grid_spec(std::string_view text) {
    auto doc = nlohmann::json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw DataError("grid spec is not a JSON object");
    GridSpec spec;
    try {
        spec.lat_origin = doc.at("lat_origin").get<double>();
        spec.lon_origin = doc.at("lon_origin").get<double>();
        spec.dlat = doc.value("dlat", 0.25);
        spec.dlon = doc.value("dlon", 0.25);
        spec.n_lat = doc.at("n_lat").get<int>();
        spec.n_lon = doc.at("n_lon").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("grid spec: {}", e.what()));
    }
    spec.validate();
    return spec;
}

std::string grid_spec_json(const GridSpec& spec) {
    nlohmann::ordered_json doc = {{"lat_origin", spec.lat_origin}, {"lon_origin", spec.lon_origin},
                                  {"dlat", spec.dlat},             {"dlon", spec.dlon},
                                  {"n_lat", spec.n_lat},           {"n_lon", spec.n_lon}};
    return doc.dump(2) + "\n";
}

// --- GridDataset -----------------------------------------------------------

GridDataset::GridDataset(GridSpec spec, Date first, Date last) : spec_(spec), first_(first), last_(last) {
    spec_.validate();
    if (last < first)
        throw DataError("grid dataset date range is empty");
    days_ = static_cast<std::size_t>((last - first).count()) + 1;
    values_.assign(kVariableCount, std::vector<double>(days_ * spec_.cell_count(), kMissing));
    present_.assign(kVariableCount, std::vector<std::uint8_t>(days_, 0));
}

std::size_t GridDataset::slot(Variable v, Date d) const {
    (void)v;
    return static_cast<std::size_t>((d - first_).count());
}

void GridDataset::set_value(Variable v, Date d, std::size_t cell, double value) {
    if (!covers(d))
        throw DataError(fmt::format("date {} outside dataset range", format_date(d)));
    if (cell >= spec_.cell_count())
        throw DataError("cell index outside grid");
    if (!std::isnan(value)) {
        if (!std::isfinite(value))
            throw DataError(fmt::format("non-finite {} value on {}", to_string(v), format_date(d)));
        if (v == Variable::Humidity && (value < 0.0 || value > 100.0))
            throw DataError(fmt::format("humidity {} outside [0, 100] on {}", value, format_date(d)));
        if (v == Variable::Precip && value < 0.0)
            throw DataError(fmt::format("negative precipitation {} on {}", value, format_date(d)));
    }
    const std::size_t day = slot(v, d);
    present_[index_of(v)][day] = 1;
    values_[index_of(v)][day * spec_.cell_count() + cell] = value;
}

void GridDataset::set_field(const DailyField& field) {
    if (field.values.size() != spec_.cell_count())
        throw DataError(fmt::format("field for {} on {} has {} values, grid has {} cells", to_string(field.variable),
                                    format_date(field.date), field.values.size(), spec_.cell_count()));
    for (std::size_t c = 0; c < field.values.size(); ++c)
        set_value(field.variable, field.date, c, field.values[c]);
}

bool GridDataset::has_field(Variable v, Date d) const { return covers(d) && present_[index_of(v)][slot(v, d)] != 0; }

std::optional<double> GridDataset::value(Variable v, Date d, std::size_t cell) const {
    if (!has_field(v, d) || cell >= spec_.cell_count())
        return std::nullopt;
    const double x = values_[index_of(v)][slot(v, d) * spec_.cell_count() + cell];
    if (std::isnan(x))
        return std::nullopt;
    return x;
}

std::size_t GridDataset::field_count() const {
    std::size_t n = 0;
    for (const auto& p : present_)
        n += static_cast<std::size_t>(std::count(p.begin(), p.end(), std::uint8_t{1}));
    return n;
}

std::vector<Date> GridDataset::gaps() const {
    std::vector<Date> out;
    for (std::size_t day = 0; day < days_; ++day) {
        bool any = false;
        for (const auto& p : present_)
            any = any || p[day] != 0;
        if (!any)
            out.push_back(first_ + std::chrono::days{static_cast<long>(day)});
    }
    return out;
}

double GridDataset::coverage(Variable v) const {
    const auto& vals = values_[index_of(v)];
    const auto have = std::count_if(vals.begin(), vals.end(), [](double x) { return !std::isnan(x); });
    return static_cast<double>(have) / static_cast<double>(vals.size());
}

// --- grid files --------------------------------------------------------------

namespace {

struct GridRow {
    Date date;
    Variable variable;
    int i;
    int j;
    double value;
};

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError(fmt::format("cannot open '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path spec_path_for(const std::filesystem::path& csv_file) {
    auto own = csv_file;
    own.replace_extension(".grid.json");
    if (std::filesystem::exists(own))
        return own;
    auto shared = csv_file.parent_path() / "grid.json";
    if (std::filesystem::exists(shared))
        return shared;
    throw DataError(fmt::format("no grid spec (grid.json) found for '{}'", csv_file.string()));
}

} // namespace

GridDataset load_grid(std::span<const std::filesystem::path> csv_files) {
    if (csv_files.empty())
        throw DataError("no grid files given");

    std::optional<GridSpec> spec;
    std::vector<GridRow> rows;
    for (const auto& file : csv_files) {
        const auto spec_file = spec_path_for(file);
        const GridSpec this_spec = parse_grid_spec(read_text(spec_file));
        if (spec && !(*spec == this_spec))
            throw DataError(fmt::format("grid spec of '{}' differs from earlier files", file.string()));
        spec = this_spec;

        const auto lines = csv::read_lines(file);
        if (lines.empty() || lines.front() != "date,variable,lat_idx,lon_idx,value")
            throw DataError(fmt::format("'{}': expected header date,variable,lat_idx,lon_idx,value", file.string()));
        for (std::size_t n = 1; n < lines.size(); ++n) {
            if (lines[n].empty())
                continue;
            const auto ctx = fmt::format("{}:{}", file.string(), n + 1);
            const auto f = csv::split(lines[n]);
            if (f.size() != 5)
                throw DataError(fmt::format("{}: expected 5 fields", ctx));
            const auto date = parse_date(f[0]);
            if (!date)
                throw DataError(fmt::format("{}: bad date '{}'", ctx, f[0]));
            const auto var = parse_variable(f[1]);
            if (!var)
                throw DataError(fmt::format("{}: unknown variable '{}'", ctx, f[1]));
            const auto i = csv::parse_int(f[2], ctx);
            const auto j = csv::parse_int(f[3], ctx);
            if (i < 0 || i >= spec->n_lat || j < 0 || j >= spec->n_lon)
                throw DataError(fmt::format("{}: cell ({}, {}) outside grid", ctx, i, j));
            const double value = f[4].empty() ? kMissing : csv::parse_double(f[4], ctx);
            rows.push_back({*date, *var, static_cast<int>(i), static_cast<int>(j), value});
        }
    }
    if (rows.empty())
        throw DataError("grid files contain no rows");

    const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                              [](const GridRow& a, const GridRow& b) { return a.date < b.date; });
    GridDataset dataset(*spec, lo->date, hi->date);
    std::vector<std::uint8_t> seen(kVariableCount * dataset.day_count() * spec->cell_count(), 0);
    for (const auto& r : rows) {
        const std::size_t cell = spec->cell(r.i, r.j);
        const std::size_t key = (index_of(r.variable) * dataset.day_count() +
                                 static_cast<std::size_t>((r.date - dataset.first_date()).count())) *
                                    spec->cell_count() +
                                cell;
        if (seen[key])
            throw DataError(fmt::format("duplicate grid value for {} {} ({}, {})", format_date(r.date),
                                        to_string(r.variable), r.i, r.j));
        seen[key] = 1;
        dataset.set_value(r.variable, r.date, cell, r.value);
    }
    return dataset;
}

GridDataset load_grid_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw DataError(fmt::format("grid directory '{}' does not exist", dir.string()));
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw DataError(fmt::format("grid directory '{}' has no .csv files", dir.string()));
    return load_grid(files);
}

std::string grid_csv(const GridDataset& dataset, std::optional<int> only_year) {
    const GridSpec& spec = dataset.spec();
    std::string out = "date,variable,lat_idx,lon_idx,value\n";
    for (std::size_t day = 0; day < dataset.day_count(); ++day) {
        const Date d = dataset.first_date() + std::chrono::days{static_cast<long>(day)};
        if (only_year && year_of(d) != *only_year)
            continue;
        const std::string date = format_date(d);
        for (Variable v : kVariables) {
            if (!dataset.has_field(v, d))
                continue;
            for (int i = 0; i < spec.n_lat; ++i)
                for (int j = 0; j < spec.n_lon; ++j)
                    out += fmt::format("{},{},{},{},{}\n", date, to_string(v), i, j,
                                       csv::optional_number(dataset.value(v, d, spec.cell(i, j))));
        }
    }
    return out;
}

// --- climatology -------------------------------------------------------------

Climatology::Climatology(GridSpec spec, YearWindow window, std::int64_t min_obs)
    : spec_(spec), window_(window), min_obs_(min_obs) {
    for (auto& v : cells_)
        v.assign(spec_.cell_count(), ClimatologyCell{});
}

void Climatology::refresh_usable() {
    for (auto& per_var : cells_)
        for (auto& c : per_var)
            c.usable = c.n_obs >= min_obs_ && c.n_obs > 0 && c.sigma > 0.0;
}

Climatology compute_climatology(const GridDataset& dataset, YearWindow window, std::int64_t min_obs) {
    if (window.end_year < window.start_year)
        throw ConfigError("climatology window is empty");
    Climatology clim(dataset.spec(), window, min_obs);

    std::vector<Date> days;
    for (std::size_t day = 0; day < dataset.day_count(); ++day) {
        const Date d = dataset.first_date() + std::chrono::days{static_cast<long>(day)};
        if (window.contains(d))
            days.push_back(d);
    }
    if (days.empty())
        throw DataError(fmt::format("grid dataset ({} to {}) does not cover climatology window {}-{}",
                                    format_date(dataset.first_date()), format_date(dataset.last_date()),
                                    window.start_year, window.end_year));

    for (Variable v : kVariables) {
        for (std::size_t cell = 0; cell < dataset.spec().cell_count(); ++cell) {
            double sum = 0.0;
            std::int64_t n = 0;
            for (Date d : days) {
                if (auto x = dataset.value(v, d, cell)) {
                    sum += *x;
                    ++n;
                }
            }
            ClimatologyCell& c = clim.at(v, cell);
            c.n_obs = n;
            if (n == 0)
                continue;
            c.mu = sum / static_cast<double>(n);
            double ss = 0.0;
            for (Date d : days)
                if (auto x = dataset.value(v, d, cell))
                    ss += (*x - c.mu) * (*x - c.mu);
            c.sigma = std::sqrt(ss / static_cast<double>(n));
        }
    }
    clim.refresh_usable();
    return clim;
}

std::string climatology_csv(const Climatology& clim) {
    const GridSpec& spec = clim.spec();
    std::string out = fmt::format("# window: {}-{} min_obs: {}\nvariable,lat_idx,lon_idx,mu,sigma,n_obs\n",
                                  clim.window().start_year, clim.window().end_year, clim.min_obs());
    for (Variable v : kVariables)
        for (int i = 0; i < spec.n_lat; ++i)
            for (int j = 0; j < spec.n_lon; ++j) {
                const auto& c = clim.at(v, spec.cell(i, j));
                if (c.n_obs == 0)
                    out += fmt::format("{},{},{},,,0\n", to_string(v), i, j);
                else
                    out += fmt::format("{},{},{},{},{},{}\n", to_string(v), i, j, csv::number(c.mu),
                                       csv::number(c.sigma), c.n_obs);
            }
    return out;
}

Climatology parse_climatology_csv(std::string_view text, const GridSpec& spec) {
    std::istringstream in{std::string(text)};
    std::string line;
    YearWindow window;
    std::int64_t min_obs = kDefaultMinObs;
    if (!std::getline(in, line) ||
        std::sscanf(line.c_str(), "# window: %d-%d min_obs: %ld", &window.start_year, &window.end_year, &min_obs) != 3)
        throw DataError("climatology CSV: missing '# window:' comment line");
    if (!std::getline(in, line) || line != "variable,lat_idx,lon_idx,mu,sigma,n_obs")
        throw DataError("climatology CSV: bad header");

    Climatology clim(spec, window, min_obs);
    std::size_t n = 2;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto ctx = fmt::format("climatology:{}", n);
        const auto f = csv::split(line);
        if (f.size() != 6)
            throw DataError(fmt::format("{}: expected 6 fields", ctx));
        const auto v = parse_variable(f[0]);
        if (!v)
            throw DataError(fmt::format("{}: unknown variable '{}'", ctx, f[0]));
        const auto i = csv::parse_int(f[1], ctx);
        const auto j = csv::parse_int(f[2], ctx);
        if (i < 0 || i >= spec.n_lat || j < 0 || j >= spec.n_lon)
            throw DataError(fmt::format("{}: cell outside grid", ctx));
        ClimatologyCell& c = clim.at(*v, spec.cell(static_cast<int>(i), static_cast<int>(j)));
        c.n_obs = csv::parse_int(f[5], ctx);
        if (c.n_obs > 0) {
            c.mu = csv::parse_double(f[3], ctx);
            c.sigma = csv::parse_double(f[4], ctx);
        }
    }
    clim.refresh_usable();
    return clim;
}

std::optional<double> z_score(double value, double mu, double sigma) {
    if (!(sigma > 0.0))
        return std::nullopt;
    return (value - mu) / sigma;
}

// --- sampling ----------------------------------------------------------------

namespace {

std::size_t nearest_cell(const LonLat& p, const GridSpec& spec) {
    // The lattice is rectangular and the cos(lat)-scaled metric is diagonal,
    // so the nearest node is found by rounding each axis independently.
    const auto i = std::clamp<long>(std::lround((p.lat - spec.lat_origin) / spec.dlat), 0, spec.n_lat - 1);
    const auto j = std::clamp<long>(std::lround((p.lon - spec.lon_origin) / spec.dlon), 0, spec.n_lon - 1);
    return spec.cell(static_cast<int>(i), static_cast<int>(j));
}

} // namespace

std::vector<std::size_t> sample_cells(const Geometry& geometry, const GridSpec& spec) {
    if (const auto* p = std::get_if<LonLat>(&geometry))
        return {nearest_cell(*p, spec)};

    const BBox& b = std::get<BBox>(geometry);
    const long i_lo = std::max<long>(0, static_cast<long>(std::ceil((b.lat_min - spec.lat_origin) / spec.dlat - kIndexEps)));
    const long i_hi = std::min<long>(spec.n_lat - 1,
                                     static_cast<long>(std::floor((b.lat_max - spec.lat_origin) / spec.dlat + kIndexEps)));
    const long j_lo = std::max<long>(0, static_cast<long>(std::ceil((b.lon_min - spec.lon_origin) / spec.dlon - kIndexEps)));
    const long j_hi = std::min<long>(spec.n_lon - 1,
                                     static_cast<long>(std::floor((b.lon_max - spec.lon_origin) / spec.dlon + kIndexEps)));
    if (i_lo > i_hi || j_lo > j_hi)
        return {nearest_cell(b.center(), spec)};
    std::vector<std::size_t> cells;
    for (long i = i_lo; i <= i_hi; ++i)
        for (long j = j_lo; j <= j_hi; ++j)
            cells.push_back(spec.cell(static_cast<int>(i), static_cast<int>(j)));
    return cells;
}

RawConditions conditions_at(const Geometry& geometry, Date date, const GridDataset& dataset) {
    RawConditions out{};
    if (!dataset.covers(date))
        return out;
    const auto cells = sample_cells(geometry, dataset.spec());
    for (Variable v : kVariables) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t c : cells)
            if (auto x = dataset.value(v, date, c)) {
                sum += *x;
                ++n;
            }
        if (n > 0)
            out[index_of(v)] = sum / static_cast<double>(n);
    }
    return out;
}

bool ConditionAnnotation::usable() const {
    return std::any_of(values.begin(), values.end(), [](const ConditionValue& v) { return v.raw.has_value(); });
}

ConditionAnnotation annotate(const Geometry& geometry, Date date, const GridDataset& dataset,
                             const Climatology& climatology) {
    ConditionAnnotation out;
    if (!dataset.covers(date))
        return out;
    const auto cells = sample_cells(geometry, dataset.spec());
    for (Variable v : kVariables) {
        double sum = 0.0, mu = 0.0, sigma = 0.0;
        std::size_t n = 0;
        bool baseline_ok = true;
        for (std::size_t c : cells) {
            auto x = dataset.value(v, date, c);
            if (!x)
                continue;
            sum += *x;
            ++n;
            const ClimatologyCell& base = climatology.at(v, c);
            baseline_ok = baseline_ok && base.usable;
            mu += base.mu;
            sigma += base.sigma;
        }
        if (n == 0)
            continue;
        ConditionValue& cv = out[v];
        const double count = static_cast<double>(n);
        cv.raw = sum / count;
        if (baseline_ok) {
            cv.mu = mu / count;
            cv.sigma = sigma / count;
            cv.z = z_score(*cv.raw, cv.mu, cv.sigma);
        }
    }
    return out;
}

std::vector<std::size_t> cells_in_region(const GridSpec& spec, const Region& region) {
    std::vector<std::size_t> cells;
    for (int i = 0; i < spec.n_lat; ++i)
        for (int j = 0; j < spec.n_lon; ++j)
            if (locate(LonLat{spec.node_lon(j), spec.node_lat(i)}, region) != Containment::Outside)
                cells.push_back(spec.cell(i, j));
    return cells;
}

std::optional<double> seasonal_mean(const GridDataset& dataset, Variable v, std::span<const std::size_t> cells,
                                    std::span<const unsigned> months, std::optional<int> year) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t day = 0; day < dataset.day_count(); ++day) {
        const Date d = dataset.first_date() + std::chrono::days{static_cast<long>(day)};
        const std::chrono::year_month_day ymd{d};
        if (year && static_cast<int>(ymd.year()) != *year)
            continue;
        if (std::find(months.begin(), months.end(), static_cast<unsigned>(ymd.month())) == months.end())
            continue;
        for (std::size_t c : cells)
            if (auto x = dataset.value(v, d, c)) {
                sum += *x;
                ++n;
            }
    }
    if (n == 0)
        return std::nullopt;
    return sum / static_cast<double>(n);
}

AnnotationResult annotate_tweets(std::span<const TweetRecord> records, const GridDataset& dataset,
                                 const Climatology& climatology, unsigned threads) {
    AnnotationResult out;
    out.annotations.resize(records.size());
    parallel_for(records.size(), threads, [&](std::size_t k) {
        out.annotations[k] = annotate(records[k].geometry, date_of(records[k].timestamp), dataset, climatology);
    });
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (!out.annotations[k].usable())
            ++out.unusable_records;
        if (year_of(date_of(records[k].timestamp)) <= climatology.window().end_year)
            ++out.records_not_after_window;
    }
    return out;
}

} // namespace wxmood
