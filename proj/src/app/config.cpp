#include "wxmood/app/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "wxmood/csv.hpp"
#include "wxmood/errors.hpp"

namespace wxmood::app {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"paths", {"corpus", "grid_dir", "regions", "sentiment_seeds", "scale_seeds", "rules", "out"}},
        {"study", {"start", "end"}},
        {"ingest", {"high_volume_fraction"}},
        {"climatology", {"start_year", "end_year", "min_obs"}},
        {"regions", {"overlap_fraction", "groups", "compare_variable"}},
        {"lexicon", {"window", "min_count", "k_neighbors", "walk_continue", "tol", "max_iter"}},
        {"scales", {"band_fraction", "bands", "min_records", "scatter_min_frequency"}},
        {"curves", {"bins", "min_fraction"}},
        {"pairs", {"cell_size", "min_count", "tiling", "axis", "pairs"}},
        {"run", {"seed", "threads"}},
        {"synth",
         {"tweets", "study_year", "climatology_start", "climatology_end", "peak_z", "peak", "floor", "rise_width",
          "fall_width", "response_scale", "north_intensity", "south_shift", "missing_fraction"}},
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.size() - start : comma - start));
        if (!item.empty())
            out.push_back(item);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

class Reader {
public:
    Reader(const pt::ptree& tree, fs::path base) : tree_(tree), base_(std::move(base)) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto sec = tree_.get_child_optional(section);
        if (!sec)
            return std::nullopt;
        const auto v = sec->get_optional<std::string>(key);
        if (!v)
            return std::nullopt;
        return trim(*v);
    }

    void read(const std::string& s, const std::string& k, double& out) const {
        if (const auto v = raw(s, k)) {
            double d = 0.0;
            const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), d);
            if (ec != std::errc{} || p != v->data() + v->size() || !std::isfinite(d))
                throw ConfigError(fmt::format("[{}] {}: '{}' is not a number", s, k, *v));
            out = d;
        }
    }

    template <typename Int>
    void read_int(const std::string& s, const std::string& k, Int& out) const {
        if (const auto v = raw(s, k)) {
            Int n{};
            const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), n);
            if (ec != std::errc{} || p != v->data() + v->size())
                throw ConfigError(fmt::format("[{}] {}: '{}' is not an integer in range", s, k, *v));
            out = n;
        }
    }

    void read_path(const std::string& s, const std::string& k, fs::path& out) const {
        if (const auto v = raw(s, k); v && !v->empty()) {
            fs::path p(*v);
            out = p.is_absolute() || base_.empty() ? p : base_ / p;
        }
    }

    void read_fraction(const std::string& s, const std::string& k, Fraction& out) const {
        double d = out.value();
        read(s, k, d);
        if (d < 0.0 || d > 1.0)
            throw ConfigError(fmt::format("[{}] {} must lie in [0, 1]", s, k));
        out = Fraction::from_double(d);
    }

private:
    const pt::ptree& tree_;
    fs::path base_;
};

Variable variable_or_throw(const std::string& name, std::string_view where) {
    const auto v = parse_variable(name);
    if (!v)
        throw ConfigError(fmt::format("{}: unknown variable '{}'", where, name));
    return *v;
}

} // namespace

std::vector<std::pair<Variable, Variable>> all_variable_pairs() {
    std::vector<std::pair<Variable, Variable>> out;
    for (std::size_t i = 0; i < kVariableCount; ++i)
        for (std::size_t j = i + 1; j < kVariableCount; ++j)
            out.emplace_back(kVariables[i], kVariables[j]);
    return out;
}

Config parse_config(std::string_view text, const fs::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config: {}", e.message()));
    }
    // Empty sections never reach the tree, so check the headers directly.
    {
        std::istringstream lines{std::string(text)};
        for (std::string line; std::getline(lines, line);) {
            const auto b = line.find_first_not_of(" \t");
            const auto e = line.find_last_not_of(" \t\r");
            if (b == std::string::npos || line[b] != '[' || line[e] != ']')
                continue;
            const auto name = line.substr(b + 1, e - b - 1);
            if (!known_keys().contains(name))
                throw ConfigError(fmt::format("config: unknown section [{}]", name));
        }
    }
    for (const auto& [section, child] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end())
            throw ConfigError(fmt::format("config: unknown section [{}]", section));
        if (child.empty() && !child.data().empty())
            throw ConfigError(fmt::format("config: key '{}' outside any section", section));
        for (const auto& [key, value] : child)
            if (!it->second.contains(key))
                throw ConfigError(fmt::format("config: unknown key '{}' in [{}]", key, section));
    }

    Config c;
    c.pair_list = all_variable_pairs();
    const Reader r(tree, base_dir);
    r.read_path("paths", "corpus", c.corpus);
    r.read_path("paths", "grid_dir", c.grid_dir);
    r.read_path("paths", "regions", c.regions);
    r.read_path("paths", "sentiment_seeds", c.sentiment_seeds);
    r.read_path("paths", "scale_seeds", c.scale_seeds);
    r.read_path("paths", "rules", c.rules);
    r.read_path("paths", "out", c.out);

    for (const auto& [key, target] : {std::pair{"start", &c.study.first}, std::pair{"end", &c.study.last}})
        if (const auto v = r.raw("study", key)) {
            const auto d = parse_date(*v);
            if (!d)
                throw ConfigError(fmt::format("[study] {}: '{}' is not a YYYY-MM-DD date", key, *v));
            *target = *d;
        }
    if (c.study.last < c.study.first)
        throw ConfigError("[study] end precedes start");

    r.read("ingest", "high_volume_fraction", c.high_volume_fraction);
    if (c.high_volume_fraction < 0.0 || c.high_volume_fraction > 1.0)
        throw ConfigError("[ingest] high_volume_fraction must lie in [0, 1]");

    r.read_int("climatology", "start_year", c.window.start_year);
    r.read_int("climatology", "end_year", c.window.end_year);
    r.read_int("climatology", "min_obs", c.min_obs);
    if (c.window.end_year < c.window.start_year)
        throw ConfigError("[climatology] end_year precedes start_year");
    if (c.min_obs < 1)
        throw ConfigError("[climatology] min_obs must be at least 1");

    r.read("regions", "overlap_fraction", c.overlap_fraction);
    if (c.overlap_fraction < 0.0 || c.overlap_fraction > 1.0)
        throw ConfigError("[regions] overlap_fraction must lie in [0, 1]");
    if (const auto v = r.raw("regions", "groups")) {
        const auto g = split_list(*v);
        if (g.size() != 2 || g[0] == g[1])
            throw ConfigError("[regions] groups must name two distinct groups");
        c.groups = {g[0], g[1]};
    }
    if (const auto v = r.raw("regions", "compare_variable"))
        c.compare_variable = variable_or_throw(*v, "[regions] compare_variable");

    r.read_int("lexicon", "window", c.graph.window);
    r.read_int("lexicon", "min_count", c.graph.min_count);
    r.read_int("lexicon", "k_neighbors", c.graph.k_neighbors);
    r.read("lexicon", "walk_continue", c.walk.beta);
    r.read("lexicon", "tol", c.walk.tol);
    r.read_int("lexicon", "max_iter", c.walk.max_iter);
    if (c.graph.window < 1 || c.graph.k_neighbors < 1)
        throw ConfigError("[lexicon] window and k_neighbors must be positive");
    if (!(c.walk.beta > 0.0 && c.walk.beta < 1.0))
        throw ConfigError("[lexicon] walk_continue must lie in (0, 1)");
    if (!(c.walk.tol > 0.0) || c.walk.max_iter < 1)
        throw ConfigError("[lexicon] tol and max_iter must be positive");

    r.read_fraction("scales", "band_fraction", c.tags.band);
    r.read_int("scales", "bands", c.tags.bands);
    r.read_int("scales", "min_records", c.tags.min_records);
    r.read_int("scales", "scatter_min_frequency", c.scatter_min_frequency);
    if (c.tags.bands < 1 || c.tags.bands > 3)
        throw ConfigError("[scales] bands must be 1, 2 or 3");

    r.read_int("curves", "bins", c.curves.bins);
    r.read_fraction("curves", "min_fraction", c.curves.min_fraction);
    if (c.curves.bins < 1)
        throw ConfigError("[curves] bins must be positive");

    r.read("pairs", "cell_size", c.pairs.lattice.size);
    r.read_int("pairs", "min_count", c.pairs.min_count);
    if (!(c.pairs.lattice.size > 0.0))
        throw ConfigError("[pairs] cell_size must be positive");
    if (const auto v = r.raw("pairs", "tiling")) {
        if (*v == "hex")
            c.pairs.lattice.tiling = Tiling::Hex;
        else if (*v == "rect")
            c.pairs.lattice.tiling = Tiling::Rect;
        else
            throw ConfigError(fmt::format("[pairs] tiling: '{}' is neither hex nor rect", *v));
    }
    if (const auto v = r.raw("pairs", "axis")) {
        if (*v == "z")
            c.pairs.axis = Axis::Z;
        else if (*v == "raw")
            c.pairs.axis = Axis::Raw;
        else
            throw ConfigError(fmt::format("[pairs] axis: '{}' is neither z nor raw", *v));
    }
    if (const auto v = r.raw("pairs", "pairs")) {
        c.pair_list.clear();
        for (const auto& item : split_list(*v)) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError(fmt::format("[pairs] pairs: '{}' is not a:b", item));
            const auto a = variable_or_throw(trim(item.substr(0, colon)), "[pairs] pairs");
            const auto b = variable_or_throw(trim(item.substr(colon + 1)), "[pairs] pairs");
            if (a == b)
                throw ConfigError(fmt::format("[pairs] pairs: '{}' pairs a variable with itself", item));
            c.pair_list.emplace_back(a, b);
        }
    }

    r.read_int("run", "seed", c.seed);
    r.read_int("run", "threads", c.threads);
    c.synth.seed = c.seed;

    r.read_int("synth", "tweets", c.synth.tweets);
    r.read_int("synth", "study_year", c.synth.study_year);
    r.read_int("synth", "climatology_start", c.synth.climatology_start);
    r.read_int("synth", "climatology_end", c.synth.climatology_end);
    r.read("synth", "peak_z", c.synth.peak_z);
    r.read("synth", "peak", c.synth.peak);
    r.read("synth", "floor", c.synth.floor);
    r.read("synth", "rise_width", c.synth.rise_width);
    r.read("synth", "fall_width", c.synth.fall_width);
    r.read("synth", "response_scale", c.synth.response_scale);
    r.read("synth", "north_intensity", c.synth.north_intensity);
    r.read("synth", "south_shift", c.synth.south_shift);
    r.read("synth", "missing_fraction", c.synth.missing_fraction);
    return c;
}

Config load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

std::string config_ini(const Config& c) {
    using csv::number;
    std::string pairs;
    for (const auto& [a, b] : c.pair_list)
        pairs += fmt::format("{}{}:{}", pairs.empty() ? "" : ",", to_string(a), to_string(b));
    std::string out;
    out += fmt::format("[study]\nstart = {}\nend = {}\n\n", format_date(c.study.first), format_date(c.study.last));
    out += fmt::format("[ingest]\nhigh_volume_fraction = {}\n\n", number(c.high_volume_fraction));
    out += fmt::format("[climatology]\nstart_year = {}\nend_year = {}\nmin_obs = {}\n\n", c.window.start_year,
                       c.window.end_year, c.min_obs);
    out += fmt::format("[regions]\noverlap_fraction = {}\ngroups = {},{}\ncompare_variable = {}\n\n",
                       number(c.overlap_fraction), c.groups[0], c.groups[1], to_string(c.compare_variable));
    out += fmt::format("[lexicon]\nwindow = {}\nmin_count = {}\nk_neighbors = {}\nwalk_continue = {}\ntol = {}\n"
                       "max_iter = {}\n\n",
                       c.graph.window, c.graph.min_count, c.graph.k_neighbors, number(c.walk.beta),
                       number(c.walk.tol), c.walk.max_iter);
    out += fmt::format("[scales]\nband_fraction = {}\nbands = {}\nmin_records = {}\nscatter_min_frequency = {}\n\n",
                       number(c.tags.band.value()), c.tags.bands, c.tags.min_records, c.scatter_min_frequency);
    out += fmt::format("[curves]\nbins = {}\nmin_fraction = {}\n\n", c.curves.bins,
                       number(c.curves.min_fraction.value()));
    out += fmt::format("[pairs]\ncell_size = {}\nmin_count = {}\ntiling = {}\naxis = {}\npairs = {}\n\n",
                       number(c.pairs.lattice.size), c.pairs.min_count,
                       c.pairs.lattice.tiling == Tiling::Hex ? "hex" : "rect", to_string(c.pairs.axis), pairs);
    out += fmt::format("[run]\nseed = {}\n", c.seed);
    return out;
}

} // namespace wxmood::app
