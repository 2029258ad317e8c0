#include "run_config.hpp"

#include <array>
#include <fstream>
#include <set>

#include "pvgp/error.hpp"

namespace pvgp::cli {

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// anything left over can be reported as unknown.
class Section {
 public:
  Section(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(child(key) + ": wrong type");
    }
  }

  void read_optional(const char* key, std::optional<SystemId>& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end() || it->is_null()) return;
    if (!it->is_number_integer()) throw ConfigError(child(key) + ": wrong type");
    out = it->get<SystemId>();
  }

  const Json* sub(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.contains(it.key()))
        throw ConfigError("unknown configuration key '" + child(it.key()) + "'");
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  std::string where() const { return path_.empty() ? "configuration" : path_; }

 private:
  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void one_of(const std::string& key, const std::string& value,
            std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return;
  std::string list;
  for (const char* a : allowed) list += list.empty() ? a : std::string(", ") + a;
  throw ConfigError(key + ": '" + value + "' is not one of " + list);
}

void positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
}

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal().string();
}

void parse_model(Section& s, ModelSection& m) {
  s.read("kernel", m.kernel);
  s.read("periodic", m.periodic);
  s.read("training_days", m.training_days);
  s.read("patch_px", m.patch_px);
  s.read("training_stride", m.training_stride);
  s.read("restarts", m.restarts);
  s.read("use_hrv", m.use_hrv);
  one_of(s.child("kernel"), m.kernel, {"matern12", "matern32", "matern52", "se", "rq"});
  if (m.training_days < 1) throw ConfigError(s.child("training_days") + " must be >= 1");
  if (m.patch_px < 1) throw ConfigError(s.child("patch_px") + " must be >= 1");
  if (m.training_stride < 1) throw ConfigError(s.child("training_stride") + " must be >= 1");
  if (m.restarts < 1) throw ConfigError(s.child("restarts") + " must be >= 1");
}

Json model_json(const ModelSection& m) {
  return Json{{"kernel", m.kernel},
              {"periodic", m.periodic},
              {"training_days", m.training_days},
              {"patch_px", m.patch_px},
              {"training_stride", m.training_stride},
              {"restarts", m.restarts},
              {"use_hrv", m.use_hrv}};
}

Json geometry_json(const RasterGeometry& g) {
  return Json{{"origin_easting", g.origin_easting},
              {"origin_northing", g.origin_northing},
              {"pixel_size", g.pixel_size},
              {"width", g.width},
              {"height", g.height}};
}

}  // namespace

RunConfig parse_run_config(const Json& doc, const std::filesystem::path& base_dir) {
  RunConfig c;
  Section root(doc, "");
  root.read("seed", c.seed);
  root.read("jobs", c.jobs);
  root.read("output_dir", c.output_dir);
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  c.output_dir = resolve(c.output_dir, base_dir);

  if (const Json* n = root.sub("projection")) {
    Section s(*n, "projection");
    ProjectionParams& p = c.projection;
    s.read("semi_major", p.semi_major);
    s.read("semi_minor", p.semi_minor);
    s.read("scale_factor", p.scale_factor);
    s.read("origin_latitude", p.origin_latitude);
    s.read("origin_longitude", p.origin_longitude);
    s.read("false_easting", p.false_easting);
    s.read("false_northing", p.false_northing);
    s.finish();
    if (!(p.semi_minor > 0.0 && p.semi_major >= p.semi_minor))
      throw ConfigError("projection: need semi_major >= semi_minor > 0");
    positive("projection.scale_factor", p.scale_factor);
  }

  if (const Json* n = root.sub("data")) {
    Section s(*n, "data");
    DataSection& d = c.data;
    s.read("metadata", d.metadata);
    s.read("power", d.power);
    s.read("hrv", d.hrv);
    s.read("hrv_format", d.hrv_format);
    s.read("sensor_max", d.sensor_max);
    if (const Json* g = s.sub("hrv_csv_geometry")) {
      Section gs(*g, "data.hrv_csv_geometry");
      gs.read("origin_easting", d.hrv_csv_geometry.origin_easting);
      gs.read("origin_northing", d.hrv_csv_geometry.origin_northing);
      gs.read("pixel_size", d.hrv_csv_geometry.pixel_size);
      gs.read("width", d.hrv_csv_geometry.width);
      gs.read("height", d.hrv_csv_geometry.height);
      gs.finish();
    }
    s.finish();
    one_of("data.hrv_format", d.hrv_format, {"auto", "binary", "csv"});
    positive("data.sensor_max", d.sensor_max);
    d.metadata = resolve(d.metadata, base_dir);
    d.power = resolve(d.power, base_dir);
    d.hrv = resolve(d.hrv, base_dir);
  }

  if (const Json* n = root.sub("filter")) {
    Section s(*n, "filter");
    FilterSection& f = c.filter;
    std::vector<std::array<double, 2>> boundary;
    s.read("boundary", boundary);
    s.read("night_threshold_deg", f.night_threshold_deg);
    s.read("overnight_fraction", f.overnight_fraction);
    s.read("overnight_nights", f.overnight_nights);
    s.finish();
    if (!boundary.empty() && boundary.size() < 3)
      throw ConfigError("filter.boundary needs at least three vertices");
    for (const auto& v : boundary) f.boundary.push_back({v[0], v[1]});
    if (f.overnight_nights < 1) throw ConfigError("filter.overnight_nights must be >= 1");
  }

  if (const Json* n = root.sub("synth")) {
    Section s(*n, "synth");
    SynthSection& y = c.synth;
    s.read("scenario", y.scenario);
    s.read("days", y.days);
    s.read("start", y.start);
    s.read("attenuation", y.attenuation);
    s.read("overcast_fraction", y.overcast_fraction);
    s.read("clear_hrv", y.clear_hrv);
    s.read("cloud_hrv", y.cloud_hrv);
    s.read("margin_px", y.margin_px);
    s.read("pixel_size", y.pixel_size);
    s.read("block_px", y.block_px);
    s.read("local_px", y.local_px);
    s.read("min_segment_steps", y.min_segment_steps);
    s.read("max_segment_steps", y.max_segment_steps);
    s.read("noise_fraction", y.noise_fraction);
    s.read("hrv_format", y.hrv_format);
    if (const Json* list = s.sub("systems")) {
      if (!list->is_array()) throw ConfigError("synth.systems must be an array");
      for (std::size_t i = 0; i < list->size(); ++i) {
        Section e((*list)[i], "synth.systems[" + std::to_string(i) + "]");
        SystemEntry entry;
        e.read("system_id", entry.system_id);
        e.read("latitude", entry.latitude);
        e.read("longitude", entry.longitude);
        e.read("capacity_w", entry.capacity_w);
        e.finish();
        positive(e.child("capacity_w"), entry.capacity_w);
        y.systems.push_back(entry);
      }
    }
    s.finish();
    parse_scenario(y.scenario);
    parse_utc(y.start);
    one_of("synth.hrv_format", y.hrv_format, {"binary", "csv"});
    if (y.days < 1) throw ConfigError("synth.days must be >= 1");
    if (y.block_px < 1 || y.local_px < 1 || y.margin_px < 0)
      throw ConfigError("synth: block_px, local_px must be >= 1 and margin_px >= 0");
    positive("synth.pixel_size", y.pixel_size);
  }
  if (c.synth.systems.empty()) c.synth.systems.push_back({709, 52.2, 0.12, 2460.0});

  if (const Json* n = root.sub("forecast")) {
    Section s(*n, "forecast");
    ForecastSection& f = c.forecast;
    s.read_optional("system_id", f.system_id);
    s.read("start", f.start);
    s.read("horizon", f.horizon);
    s.read("cloud_mode", f.cloud_mode);
    parse_model(s, f.model);
    s.finish();
    parse_horizon(f.horizon);
    parse_cloud_mode(f.cloud_mode);
    if (!f.start.empty()) parse_utc(f.start);
  }

  if (const Json* n = root.sub("experiment")) {
    Section s(*n, "experiment");
    ExperimentSection& e = c.experiment;
    s.read("source", e.source);
    s.read("grid", e.grid);
    s.read("forecast_start", e.forecast_start);
    s.read("launch_hour", e.launch_hour);
    s.read("test_days", e.test_days);
    s.read("training_stride", e.training_stride);
    s.read("restarts", e.restarts);
    s.read("system_ids", e.system_ids);
    s.read("title", e.title);
    if (const Json* list = s.sub("rows")) {
      if (!list->is_array()) throw ConfigError("experiment.rows must be an array");
      for (std::size_t i = 0; i < list->size(); ++i) {
        Section r((*list)[i], "experiment.rows[" + std::to_string(i) + "]");
        GridRow row;
        row.model.training_stride = e.training_stride;
        row.model.restarts = e.restarts;
        r.read("horizon", row.horizon);
        r.read("cloud_mode", row.cloud_mode);
        r.read("block", row.block);
        parse_model(r, row.model);
        r.finish();
        parse_horizon(row.horizon);
        parse_cloud_mode(row.cloud_mode);
        e.rows.push_back(row);
      }
    }
    s.finish();
    one_of("experiment.source", e.source, {"files", "synthetic"});
    one_of("experiment.grid", e.grid, {"set-one", "set-two", "custom"});
    if (e.launch_hour < -1 || e.launch_hour > 23)
      throw ConfigError("experiment.launch_hour must be in 0..23");
    if (e.test_days < 1) throw ConfigError("experiment.test_days must be >= 1");
    if (e.training_stride < 1) throw ConfigError("experiment.training_stride must be >= 1");
    if (e.restarts < 1) throw ConfigError("experiment.restarts must be >= 1");
    if (!e.forecast_start.empty()) parse_utc(e.forecast_start);
  }

  if (const Json* n = root.sub("report")) {
    Section s(*n, "report");
    s.read("input", c.report.input);
    s.read("group_by", c.report.group_by);
    s.finish();
    one_of("report.group_by", c.report.group_by, {"testing-day", "system"});
    c.report.input = resolve(c.report.input, base_dir);
  }

  root.finish();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open configuration " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_run_config(doc, std::filesystem::absolute(path).parent_path());
}

Json to_json(const RunConfig& c) {
  Json j;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["output_dir"] = c.output_dir;
  const ProjectionParams& p = c.projection;
  j["projection"] = {{"semi_major", p.semi_major},
                     {"semi_minor", p.semi_minor},
                     {"scale_factor", p.scale_factor},
                     {"origin_latitude", p.origin_latitude},
                     {"origin_longitude", p.origin_longitude},
                     {"false_easting", p.false_easting},
                     {"false_northing", p.false_northing}};
  j["data"] = {{"metadata", c.data.metadata},
               {"power", c.data.power},
               {"hrv", c.data.hrv},
               {"hrv_format", c.data.hrv_format},
               {"hrv_csv_geometry", geometry_json(c.data.hrv_csv_geometry)},
               {"sensor_max", c.data.sensor_max}};
  Json boundary = Json::array();
  for (const auto& v : c.filter.boundary) boundary.push_back({v.easting, v.northing});
  j["filter"] = {{"boundary", boundary},
                 {"night_threshold_deg", c.filter.night_threshold_deg},
                 {"overnight_fraction", c.filter.overnight_fraction},
                 {"overnight_nights", c.filter.overnight_nights}};
  const SynthSection& y = c.synth;
  Json systems = Json::array();
  for (const auto& s : y.systems)
    systems.push_back({{"system_id", s.system_id},
                       {"latitude", s.latitude},
                       {"longitude", s.longitude},
                       {"capacity_w", s.capacity_w}});
  j["synth"] = {{"scenario", y.scenario},
                {"days", y.days},
                {"start", y.start},
                {"systems", systems},
                {"attenuation", y.attenuation},
                {"overcast_fraction", y.overcast_fraction},
                {"clear_hrv", y.clear_hrv},
                {"cloud_hrv", y.cloud_hrv},
                {"margin_px", y.margin_px},
                {"pixel_size", y.pixel_size},
                {"block_px", y.block_px},
                {"local_px", y.local_px},
                {"min_segment_steps", y.min_segment_steps},
                {"max_segment_steps", y.max_segment_steps},
                {"noise_fraction", y.noise_fraction},
                {"hrv_format", y.hrv_format}};
  Json forecast = {{"system_id", c.forecast.system_id ? Json(*c.forecast.system_id) : Json()},
                   {"start", c.forecast.start},
                   {"horizon", c.forecast.horizon},
                   {"cloud_mode", c.forecast.cloud_mode}};
  forecast.update(model_json(c.forecast.model));
  j["forecast"] = forecast;
  const ExperimentSection& e = c.experiment;
  Json rows = Json::array();
  for (const GridRow& r : e.rows) {
    Json row = {{"horizon", r.horizon}, {"cloud_mode", r.cloud_mode}, {"block", r.block}};
    row.update(model_json(r.model));
    rows.push_back(row);
  }
  j["experiment"] = {{"source", e.source},
                     {"grid", e.grid},
                     {"rows", rows},
                     {"forecast_start", e.forecast_start},
                     {"launch_hour", e.launch_hour},
                     {"test_days", e.test_days},
                     {"training_stride", e.training_stride},
                     {"restarts", e.restarts},
                     {"system_ids", e.system_ids},
                     {"title", e.title}};
  j["report"] = {{"input", c.report.input}, {"group_by", c.report.group_by}};
  return j;
}

KernelSpec kernel_template(const ModelSection& m) {
  KernelFamily family = KernelFamily::Matern;
  MaternNu nu = MaternNu::Half;
  if (m.kernel == "matern32") nu = MaternNu::ThreeHalves;
  else if (m.kernel == "matern52") nu = MaternNu::FiveHalves;
  else if (m.kernel == "se") family = KernelFamily::SquaredExponential;
  else if (m.kernel == "rq") family = KernelFamily::RationalQuadratic;
  return make_kernel_template(family, nu, m.periodic, m.use_hrv ? 2 : 1);
}

Horizon parse_horizon(const std::string& text) {
  if (text == "48h") return Horizon::FortyEightHours;
  if (text == "4h") return Horizon::FourHours;
  throw ConfigError("horizon: '" + text + "' is not one of 48h, 4h");
}

CloudMode parse_cloud_mode(const std::string& text) {
  if (text == "given") return CloudMode::Given;
  if (text == "persistence") return CloudMode::Persistence;
  throw ConfigError("cloud_mode: '" + text + "' is not one of given, persistence");
}

FilterOptions filter_options(const FilterSection& f) {
  FilterOptions o;
  if (!f.boundary.empty()) o.boundary = Boundary(f.boundary);
  o.night_threshold_deg = f.night_threshold_deg;
  o.overnight_fraction = f.overnight_fraction;
  o.overnight_nights = f.overnight_nights;
  return o;
}

SyntheticOptions synthetic_options(const SynthSection& y) {
  SyntheticOptions o;
  o.start = parse_utc(y.start);
  o.attenuation = y.attenuation;
  o.overcast_fraction = y.overcast_fraction;
  o.clear_hrv = y.clear_hrv;
  o.cloud_hrv = y.cloud_hrv;
  o.margin_px = y.margin_px;
  o.pixel_size = y.pixel_size;
  o.block_px = y.block_px;
  o.local_px = y.local_px;
  o.min_segment_steps = y.min_segment_steps;
  o.max_segment_steps = y.max_segment_steps;
  o.noise_fraction = y.noise_fraction;
  return o;
}

std::vector<PvSystem> synthetic_systems(const SynthSection& y,
                                        const TransverseMercator& projection) {
  std::vector<PvSystem> out;
  for (const SystemEntry& e : y.systems) {
    PvSystem s;
    s.system_id = e.system_id;
    s.location = GeoPoint::project(e.latitude, e.longitude, projection);
    s.capacity_w = e.capacity_w;
    s.provenance = "synthetic";
    out.push_back(s);
  }
  return out;
}

}  // namespace pvgp::cli
