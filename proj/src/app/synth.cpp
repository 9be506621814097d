#include "wxmood/app/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "wxmood/csv.hpp"
#include "wxmood/errors.hpp"
#include "wxmood/lexicon.hpp"

namespace wxmood::app {

using namespace std::chrono;

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = uniform();
    while (u <= 0.0)
        u = uniform();
    const double v = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u));
    spare_ = mag * std::sin(2.0 * std::numbers::pi * v);
    has_spare_ = true;
    return mag * std::cos(2.0 * std::numbers::pi * v);
}

const SynthVocabulary& synth_vocabulary() {
    static const SynthVocabulary vocab = [] {
        SynthVocabulary v;
        const auto seeds = default_sentiment_seeds();
        for (const auto& [t, w] : seeds.positive.weights)
            v.positive_seeds.push_back(t);
        for (const auto& [t, w] : seeds.negative.weights)
            v.negative_seeds.push_back(t);
        v.positive_planted = {"brilliant", "happy",   "glad",    "cheerful",  "wonderful", "fab",      "smashing",
                              "chuffed",   "superb",  "joy",     "fantastic", "thrilled",  "yay",      "delighted",
                              "stunning",  "fun",     "blessed", "grateful",  "proud",     "lush",     "cracking",
                              "magic",     "smiling", "bliss",   "\U0001F600", "\U0001F60D", "\U0001F389"};
        v.negative_planted = {"miserable", "annoying", "grim",     "rubbish",    "gutted",     "dreadful", "horrid",
                              "gloomy",    "angry",    "upset",    "ugh",        "pathetic",   "disgusting", "painful",
                              "grumpy",    "depressing", "ruined", "lousy",      "annoyed",    "bleak",    "fed-up",
                              "moaning",   "knackered", "sulking", "\U0001F621", "\U0001F62D", "\U0001F629"};
        v.hot = {"sweating", "scorching", "sunburn",   "ice-cream", "heatwave", "sizzling", "boiling",
                 "roasting", "melting",   "suncream",  "bbq",       "paddling", "shorts",   "sunbathing"};
        v.cold = {"freezing", "frost",     "snowman", "icy",    "chilly",  "gloves",  "scarf",
                  "shivering", "thermals", "frosty",  "blizzard", "numb",  "defrost", "sledging"};
        v.filler = {"today",   "just",    "going",   "out",     "with",    "my",       "mum",      "dad",
                    "walk",    "dog",     "town",    "bus",     "work",    "weekend",  "morning",  "evening",
                    "tonight", "home",    "back",    "kids",    "school",  "garden",   "park",     "beach",
                    "shop",    "tea",     "lunch",   "dinner",  "train",   "car",      "road",     "office",
                    "friends", "night",   "day",     "week",    "now",     "still",    "again",    "really",
                    "the",     "a",       "and",     "to",      "in",      "on",       "at",       "for",
                    "this",    "that",    "it",      "is",      "was",     "we",       "i",        "you",
                    "all",     "some",    "off",     "up",      "down",    "over",     "after",    "before",
                    "football", "match",  "pub",     "city",    "village", "river",    "hill",     "field",
                    "coffee",  "bread",   "milk",    "post",    "phone",   "laptop",   "telly",    "film",
                    "book",    "music",   "gig",     "band",    "station", "platform", "queue",    "traffic",
                    "meeting", "email",   "cat",     "neighbour", "street", "corner",  "window",   "door",
                    "kitchen", "sofa",    "bed",     "shower",  "jacket",  "shoes",    "bag",      "keys",
                    "sister",  "brother", "nan",     "grandad", "mate",    "boss",     "class",    "exam",
                    "holiday", "trip",    "drive",   "ride",    "run",     "gym",      "swim",     "cycle",
                    "market",  "cafe",    "chips",   "pizza",   "cake",    "sandwich", "breakfast", "supper",
                    "monday",  "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday", "later",
                    "soon",    "yesterday", "tomorrow", "outside", "inside", "around",  "near",     "far"};
        return v;
    }();
    return vocab;
}

double planted_response(const SynthParams& p, double z) {
    double f = p.floor;
    if (z <= p.peak_z) {
        if (z > p.peak_z - p.rise_width)
            f = p.peak + (p.peak - p.floor) * (z - p.peak_z) / p.rise_width;
    } else if (z < p.peak_z + p.fall_width) {
        f = p.peak - (p.peak - p.floor) * (z - p.peak_z) / p.fall_width;
    }
    return p.response_scale * f;
}

namespace {

constexpr int kRows = 8;
constexpr int kCols = 4;

GridSpec synth_grid() {
    GridSpec spec;
    spec.lat_origin = 50.0;
    spec.lon_origin = -3.0;
    spec.dlat = 0.25;
    spec.dlon = 0.25;
    spec.n_lat = kRows;
    spec.n_lon = kCols;
    return spec;
}

bool is_north_row(int i) { return i >= kRows / 2; }

// Regions are 2 x 2 blocks of nodes, bounded half-way between nodes.
std::vector<Region> synth_regions(const GridSpec& g) {
    struct Block {
        const char* name;
        const char* group;
        int row;
        int col;
    };
    const Block blocks[] = {
        {"South West England", "South", 0, 0}, {"South East England", "South", 0, 2},
        {"East of England", "South", 2, 0},    {"London", "South", 2, 2},
        {"North West England", "North", 4, 0}, {"Yorkshire and The Humber", "North", 4, 2},
        {"Scotland", "North", 6, 0},           {"North East England", "North", 6, 2},
    };
    std::vector<Region> out;
    for (const auto& b : blocks) {
        const double lon0 = g.lon_origin + (b.col - 0.5) * g.dlon, lon1 = g.lon_origin + (b.col + 1.5) * g.dlon;
        const double lat0 = g.lat_origin + (b.row - 0.5) * g.dlat, lat1 = g.lat_origin + (b.row + 1.5) * g.dlat;
        Region r;
        r.name = b.name;
        r.group = b.group;
        r.parts.push_back({{{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}}, {}});
        out.push_back(std::move(r));
    }
    return out;
}

// Daily anomaly processes shared by all cells, AR(1) per variable.
struct Anomalies {
    std::array<double, kVariableCount> value{};
};

GridDataset synth_weather(const SynthParams& p, Rng& rng) {
    const GridSpec spec = synth_grid();
    const Date first{year{p.climatology_start} / 1 / 1};
    const Date last{year{p.study_year} / 12 / 31};
    GridDataset ds(spec, first, last);
    constexpr std::array<double, kVariableCount> phi{0.7, 0.3, 0.6, 0.6, 0.8};
    constexpr std::array<double, kVariableCount> sd{3.0, 1.0, 2.5, 7.0, 10.0};
    Anomalies a;
    for (Date d = first; d <= last; d += days{1}) {
        const year_month_day ymd{d};
        const double doy = static_cast<double>((d - Date{ymd.year() / 1 / 1}).count());
        const double summer = std::cos(2.0 * std::numbers::pi * (doy - 200.0) / 365.25);
        for (std::size_t k = 0; k < kVariableCount; ++k)
            a.value[k] = phi[k] * a.value[k] + std::sqrt(1.0 - phi[k] * phi[k]) * sd[k] * rng.normal();
        for (const auto v : kVariables) {
            DailyField field{d, v, std::vector<double>(spec.cell_count())};
            const double an = a.value[index_of(v)];
            for (int i = 0; i < spec.n_lat; ++i)
                for (int j = 0; j < spec.n_lon; ++j) {
                    const double noise = rng.normal();
                    double x = 0.0;
                    switch (v) {
                    case Variable::Tmax:
                        x = 12.0 + (is_north_row(i) ? 0.0 : p.south_shift) + 7.0 * summer + an + 0.5 * noise;
                        break;
                    case Variable::Precip: {
                        const double wet = an + 0.4 * noise - 0.2 * summer;
                        x = wet > 0.3 ? 4.0 * (wet - 0.3) * (wet - 0.3) + 0.1 : 0.0;
                        break;
                    }
                    case Variable::Wind:
                        x = std::max(0.0, 7.0 - 2.0 * summer + an + 0.8 * noise);
                        break;
                    case Variable::Humidity:
                        x = std::clamp(80.0 - 8.0 * summer + an + 2.0 * noise, 20.0, 100.0);
                        break;
                    case Variable::Pressure:
                        x = 1013.0 + an + 1.0 * noise;
                        break;
                    }
                    field.values[spec.cell(i, j)] = rng.chance(p.missing_fraction) ? std::nan("") : x;
                }
            ds.set_field(field);
        }
    }
    return ds;
}

Timestamp random_time(int study_year, Rng& rng) {
    const Date first{year{study_year} / 1 / 1};
    const auto n_days = static_cast<std::size_t>((Date{year{study_year} / 12 / 31} - first).count() + 1);
    return Timestamp{first + days{static_cast<int>(rng.below(n_days))}} +
           seconds{static_cast<int>(rng.below(86'400))};
}

Geometry random_geometry(const GridSpec& g, Rng& rng) {
    const double u = rng.uniform();
    const int i = static_cast<int>(rng.below(static_cast<std::size_t>(g.n_lat)));
    const int j = static_cast<int>(rng.below(static_cast<std::size_t>(g.n_lon)));
    const double lat = g.node_lat(i), lon = g.node_lon(j);
    if (u < 0.80)
        return LonLat{lon + (rng.uniform() - 0.5) * 0.2, lat + (rng.uniform() - 0.5) * 0.2};
    if (u < 0.95)
        return BBox{lon - 0.1, lat - 0.1, lon + 0.1, lat + 0.1};
    return BBox{g.lon_origin - 0.125, g.lat_origin - 0.125, g.node_lon(g.n_lon - 1) + 0.125,
                g.node_lat(g.n_lat - 1) + 0.125};
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
    return v[rng.below(v.size())];
}

void shuffle(std::vector<std::string>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.below(i)]);
}

std::string compose(std::vector<std::string> words, Rng& rng) {
    shuffle(words, rng);
    if (!words.empty() && !words[0].empty() && words[0][0] >= 'a' && words[0][0] <= 'z')
        words[0][0] = static_cast<char>(words[0][0] - 'a' + 'A');
    std::string text;
    for (const auto& w : words)
        text += (text.empty() ? "" : " ") + w;
    if (rng.chance(0.1))
        text += "!";
    return text;
}

} // namespace

SynthData generate_synthetic(const SynthParams& p) {
    if (p.tweets < 1000)
        throw ConfigError("synth: need at least 1000 tweets");
    if (p.climatology_end < p.climatology_start || p.study_year <= p.climatology_end)
        throw ConfigError("synth: the study year must follow the climatology window");
    if (!(p.rise_width > 0.0) || !(p.fall_width > 0.0))
        throw ConfigError("synth: rise_width and fall_width must be positive");
    if (p.missing_fraction < 0.0 || p.missing_fraction > 0.2)
        throw ConfigError("synth: missing_fraction must lie in [0, 0.2]");

    Rng weather_rng(p.seed * 2 + 1);
    Rng rng(p.seed * 2 + 2);
    SynthData data{p, synth_weather(p, weather_rng), synth_regions(synth_grid()), {}, {}, {}, 0, 0, 0, {}};
    const auto& spec = data.dataset.spec();
    const auto clim = compute_climatology(data.dataset, {p.climatology_start, p.climatology_end});
    const RegionSet regions(data.regions);
    const auto& vocab = synth_vocabulary();

    // Genuine tweets: place and date first, then text from the weather there.
    std::vector<TweetRecord> genuine(p.tweets);
    for (std::size_t k = 0; k < p.tweets; ++k) {
        auto& r = genuine[k];
        r.id = fmt::format("g{:07}", k);
        r.timestamp = random_time(p.study_year, rng);
        r.geometry = random_geometry(spec, rng);
        const auto author = rng.below(5000);
        r.author_handle = fmt::format("user{}", author);
        r.author_display = fmt::format("User {}", author);
    }
    const auto ann = annotate_tweets(genuine, data.dataset, clim).annotations;
    std::vector<double> ranked;
    for (const auto& a : ann)
        if (a[Variable::Tmax].z)
            ranked.push_back(*a[Variable::Tmax].z);
    std::sort(ranked.begin(), ranked.end(), std::greater<>());
    const std::size_t top_n = ranked.size() / 100;
    const double top_cut = top_n ? ranked[top_n - 1] : INFINITY;
    const double low_cut = top_n ? ranked[ranked.size() - top_n] : -INFINITY;

    std::vector<double> planted(p.tweets);
    std::size_t top_only_count = 0, low_only_count = 0, uniform_count = 0;
    for (std::size_t k = 0; k < p.tweets; ++k) {
        const auto z = ann[k][Variable::Tmax].z;
        const auto region = assign_region(genuine[k].geometry, regions);
        const auto group = region ? regions.group_of(*region) : std::nullopt;
        const double intensity = group && *group == "North" ? p.north_intensity : 1.0;
        const double s = std::clamp(z ? intensity * planted_response(p, *z) : 0.0, -1.0, 1.0);
        planted[k] = s;
        const bool positive = rng.chance((1.0 + s) / 2.0);

        std::vector<std::string> words;
        const std::size_t n_fill = 5 + rng.below(6);
        for (std::size_t w = 0; w < n_fill; ++w)
            words.push_back(pick(vocab.filler, rng));
        const std::size_t n_pol = 2 + rng.below(3);
        for (std::size_t w = 0; w < n_pol; ++w) {
            const bool pos_word = rng.chance(0.9) == positive;
            const auto& seeds = pos_word ? vocab.positive_seeds : vocab.negative_seeds;
            const auto& planted_words = pos_word ? vocab.positive_planted : vocab.negative_planted;
            const std::size_t idx = rng.below(seeds.size() + planted_words.size());
            words.push_back(idx < seeds.size() ? seeds[idx] : planted_words[idx - seeds.size()]);
        }
        const double zt = z.value_or(0.0);
        if (rng.chance(0.6 / (1.0 + std::exp(-2.5 * (zt - 1.0)))))
            words.push_back(pick(vocab.hot, rng));
        if (rng.chance(0.6 / (1.0 + std::exp(2.5 * (zt + 1.0)))))
            words.push_back(pick(vocab.cold, rng));
        if (z && *z >= top_cut && rng.chance(0.6)) {
            words.push_back(vocab.top_only);
            ++top_only_count;
        }
        if (z && *z <= low_cut && rng.chance(0.6)) {
            words.push_back(vocab.low_only);
            ++low_only_count;
        }
        if (rng.chance(0.3)) {
            words.push_back(vocab.uniform);
            ++uniform_count;
        }
        genuine[k].text = compose(std::move(words), rng);
    }

    // Noise the ingest filters should remove.
    std::vector<TweetRecord> noise;
    auto noise_record = [&](std::string handle, std::string display, std::string text) {
        TweetRecord r;
        r.id = fmt::format("n{:07}", noise.size());
        r.timestamp = random_time(p.study_year, rng);
        r.geometry = random_geometry(spec, rng);
        r.author_handle = std::move(handle);
        r.author_display = std::move(display);
        r.text = std::move(text);
        noise.push_back(std::move(r));
    };
    const std::size_t bot = p.tweets / 50;
    for (std::size_t k = 0; k < bot; ++k)
        noise_record("bodathome", "BodatHome",
                     fmt::format("Temp {:.1f}C, wind {} mph, pressure {} hPa", 5.0 + rng.uniform() * 20.0,
                                 rng.below(30), 990 + rng.below(40)));
    const char* stations[][2] = {{"favershamwx", "Faversham Weather"}, {"northamptonwx", "Northampton Weather"},
                                 {"raynewx", "Rayne Weather"},         {"sigginstone", "Sigginstone Weather"},
                                 {"weatherbod", "Bod"},                {"exeterweather", "Exeter"}};
    const std::size_t per_station = p.tweets / 1000;
    for (const auto& st : stations)
        for (std::size_t k = 0; k < per_station; ++k)
            noise_record(st[0], st[1], fmt::format("Max temp today {:.1f}C and {} showers", 5.0 + rng.uniform() * 20.0,
                                                   pick(vocab.filler, rng)));
    const std::size_t units = p.tweets / 100;
    for (std::size_t k = 0; k < units; ++k) {
        const auto author = 5000 + rng.below(5000);
        const auto unit = k % 3 == 0 ? std::string("hPa") : k % 3 == 1 ? std::string("mph") : std::string("MPH");
        noise_record(fmt::format("user{}", author), fmt::format("User {}", author),
                     fmt::format("Gusts of {}{}{} along the {} {}", 20 + rng.below(40), k % 2 ? " " : "", unit,
                                 pick(vocab.filler, rng), pick(vocab.filler, rng)));
    }
    const std::size_t under = p.tweets / 200;
    for (std::size_t k = 0; k < under; ++k) {
        const auto author = 5000 + rng.below(5000);
        noise_record(fmt::format("user{}", author), fmt::format("User {}", author),
                     fmt::format("Feeling a bit Under  the weather {} {}", pick(vocab.filler, rng),
                                 pick(vocab.filler, rng)));
    }
    data.bot_posts = bot;
    data.weather_account_posts = per_station * std::size(stations);
    data.report_posts = units + under;

    std::vector<std::size_t> order(genuine.size() + noise.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rec = [&](std::size_t i) -> const TweetRecord& {
        return i < genuine.size() ? genuine[i] : noise[i - genuine.size()];
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rec(a).timestamp != rec(b).timestamp)
            return rec(a).timestamp < rec(b).timestamp;
        return rec(a).id < rec(b).id;
    });
    for (const auto i : order) {
        data.records.push_back(rec(i));
        data.planted.push_back(i < genuine.size() ? planted[i] : std::nan(""));
        data.genuine.push_back(i < genuine.size());
    }

    nlohmann::ordered_json truth;
    truth["seed"] = p.seed;
    truth["genuine_tweets"] = p.tweets;
    truth["records"] = data.records.size();
    truth["cascade"] = {data.records.size(), data.records.size() - bot,
                        data.records.size() - bot - data.weather_account_posts, p.tweets};
    truth["response"] = {{"variable", "tmax"},     {"axis", "z"},
                         {"peak_z", p.peak_z},     {"peak", p.peak},
                         {"floor", p.floor},       {"rise_width", p.rise_width},
                         {"fall_width", p.fall_width}, {"response_scale", p.response_scale}};
    truth["groups"] = {{"North", {{"intensity", p.north_intensity}, {"tmax_shift", 0.0}}},
                       {"South", {{"intensity", 1.0}, {"tmax_shift", p.south_shift}}}};
    truth["climatology_window"] = {p.climatology_start, p.climatology_end};
    truth["study_year"] = p.study_year;
    truth["vocabulary"] = {{"positive_planted", vocab.positive_planted},
                           {"negative_planted", vocab.negative_planted},
                           {"hot", vocab.hot},
                           {"cold", vocab.cold}};
    truth["top_only_token"] = {{"token", vocab.top_only}, {"count", top_only_count}, {"z_cut", top_cut}};
    truth["low_only_token"] = {{"token", vocab.low_only}, {"count", low_only_count}, {"z_cut", low_cut}};
    truth["uniform_token"] = {{"token", vocab.uniform}, {"count", uniform_count}};
    data.ground_truth = truth.dump(2) + "\n";
    return data;
}

std::string regions_geojson(const std::vector<Region>& regions) {
    nlohmann::ordered_json fc;
    fc["type"] = "FeatureCollection";
    fc["features"] = nlohmann::ordered_json::array();
    for (const auto& r : regions) {
        auto polys = nlohmann::ordered_json::array();
        for (const auto& part : r.parts) {
            auto rings = nlohmann::ordered_json::array();
            for (const Ring* ring : [&] {
                     std::vector<const Ring*> all{&part.outer};
                     for (const auto& h : part.holes)
                         all.push_back(&h);
                     return all;
                 }()) {
                auto coords = nlohmann::ordered_json::array();
                for (const auto& pt : *ring)
                    coords.push_back({pt.lon, pt.lat});
                coords.push_back({ring->front().lon, ring->front().lat});
                rings.push_back(std::move(coords));
            }
            polys.push_back(std::move(rings));
        }
        nlohmann::ordered_json f;
        f["type"] = "Feature";
        f["properties"] = {{"name", r.name}, {"group", r.group}};
        f["geometry"] = {{"type", "MultiPolygon"}, {"coordinates", std::move(polys)}};
        fc["features"].push_back(std::move(f));
    }
    return fc.dump(1) + "\n";
}

void write_synthetic(const SynthData& data, const std::filesystem::path& dir) {
    const auto& p = data.params;
    std::string corpus;
    for (const auto& r : data.records)
        corpus += to_json_line(r) + "\n";
    csv::write_file(dir / "corpus.jsonl", corpus);
    csv::write_file(dir / "grid" / "grid.json", grid_spec_json(data.dataset.spec()));
    for (int y = p.climatology_start; y <= p.study_year; ++y)
        csv::write_file(dir / "grid" / fmt::format("weather_{}.csv", y), grid_csv(data.dataset, y));
    csv::write_file(dir / "regions.geojson", regions_geojson(data.regions));
    csv::write_file(dir / "ground_truth.json", data.ground_truth);
    std::string planted = "id,planted_sentiment\n";
    for (std::size_t i = 0; i < data.records.size(); ++i)
        if (data.genuine[i])
            planted += fmt::format("{},{}\n", data.records[i].id, csv::number(data.planted[i]));
    csv::write_file(dir / "planted.csv", planted);
    csv::write_file(dir / "wxmood.ini",
                    fmt::format("[paths]\ncorpus = corpus.jsonl\ngrid_dir = grid\nregions = regions.geojson\n"
                                "out = out\n\n[study]\nstart = {0}-01-01\nend = {0}-12-31\n\n"
                                "[climatology]\nstart_year = {1}\nend_year = {2}\n\n[run]\nseed = {3}\n",
                                p.study_year, p.climatology_start, p.climatology_end, p.seed));
}

} // namespace wxmood::app
