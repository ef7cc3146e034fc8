#include "crosstune/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace crosstune {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::optional<double> to_number(const std::string& tok, bool* integral) {
  if (tok.empty()) return std::nullopt;
  const bool is_int = tok.find_first_of(".eE") == std::string::npos ||
                      (tok.size() > 1 && tok[0] == '0' && tok[1] == 'x');
  if (integral) *integral = is_int;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

}  // namespace

TomlTable TomlTable::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

TomlTable TomlTable::parse_string(const std::string& text,
                                  const std::string& origin) {
  TomlTable table;
  table.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) -> void {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
    };

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) fail("bad section name '" + section + "'");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value_str = trim(line.substr(eq + 1));
    if (!valid_key(key)) fail("bad key '" + key + "'");
    if (section.empty()) fail("key '" + key + "' outside any section");
    if (value_str.empty()) fail("missing value for '" + key + "'");

    Value v;
    v.line = line_no;
    if (value_str.front() == '"') {
      if (value_str.size() < 2 || value_str.back() != '"')
        fail("unterminated string for '" + key + "'");
      v.kind = Value::Kind::kString;
      v.str = value_str.substr(1, value_str.size() - 2);
    } else if (value_str == "true" || value_str == "false") {
      v.kind = Value::Kind::kBool;
      v.boolean = value_str == "true";
    } else if (value_str.front() == '[') {
      if (value_str.back() != ']') fail("unterminated array for '" + key + "'");
      v.kind = Value::Kind::kArray;
      v.array_is_integral = true;
      std::string body = value_str.substr(1, value_str.size() - 2);
      std::istringstream items(body);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) fail("empty array element for '" + key + "'");
        bool integral = false;
        const auto num = to_number(item, &integral);
        if (!num) fail("array element '" + item + "' is not a number");
        if (!integral) v.array_is_integral = false;
        v.array.push_back(*num);
      }
    } else {
      bool integral = false;
      const auto num = to_number(value_str, &integral);
      if (!num) fail("value '" + value_str + "' for '" + key + "' is not valid");
      if (integral) {
        v.kind = Value::Kind::kInt;
        v.integer = static_cast<std::int64_t>(*num);
        v.real = *num;
      } else {
        v.kind = Value::Kind::kFloat;
        v.real = *num;
      }
    }
    const auto slot = std::make_pair(section, key);
    if (table.values_.count(slot) != 0)
      fail("duplicate key '" + section + "." + key + "'");
    table.values_.emplace(slot, std::move(v));
  }
  return table;
}

bool TomlTable::has(const std::string& section, const std::string& key) const {
  return values_.count({section, key}) != 0;
}

const TomlTable::Value* TomlTable::find(const std::string& section,
                                        const std::string& key) const {
  const auto it = values_.find({section, key});
  return it == values_.end() ? nullptr : &it->second;
}

void TomlTable::fail(const std::string& section, const std::string& key,
                     const Value& value, const std::string& expected) const {
  throw ConfigError(origin_ + ":" + std::to_string(value.line) + ": field " +
                    section + "." + key + " must be " + expected);
}

std::int64_t TomlTable::get_int(const std::string& section,
                                const std::string& key,
                                std::int64_t fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (v->kind != Value::Kind::kInt) fail(section, key, *v, "an integer");
  return v->integer;
}

std::uint64_t TomlTable::get_uint(const std::string& section,
                                  const std::string& key,
                                  std::uint64_t fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (v->kind != Value::Kind::kInt || v->integer < 0)
    fail(section, key, *v, "a non-negative integer");
  return static_cast<std::uint64_t>(v->integer);
}

double TomlTable::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (v->kind == Value::Kind::kInt) return static_cast<double>(v->integer);
  if (v->kind != Value::Kind::kFloat) fail(section, key, *v, "a number");
  return v->real;
}

std::string TomlTable::get_string(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (v->kind != Value::Kind::kString) fail(section, key, *v, "a string");
  return v->str;
}

std::pair<int, int> TomlTable::get_int_range(const std::string& section,
                                             const std::string& key,
                                             std::pair<int, int> fallback) const {
  const Value* v = find(section, key);
  if (!v) return fallback;
  if (v->kind != Value::Kind::kArray || v->array.size() != 2 ||
      !v->array_is_integral)
    fail(section, key, *v, "a two-element integer array [lo, hi]");
  return {static_cast<int>(v->array[0]), static_cast<int>(v->array[1])};
}

void TomlTable::reject_unknown_keys(const std::string& section,
                                    const std::vector<std::string>& known) const {
  for (const auto& [slot, value] : values_) {
    if (slot.first != section) continue;
    if (std::find(known.begin(), known.end(), slot.second) == known.end())
      throw ConfigError(origin_ + ":" + std::to_string(value.line) +
                        ": unknown field " + section + "." + slot.second);
  }
}

void TomlTable::reject_unknown_sections(const std::vector<std::string>& known) const {
  for (const auto& [slot, value] : values_) {
    if (std::find(known.begin(), known.end(), slot.first) == known.end())
      throw ConfigError(origin_ + ":" + std::to_string(value.line) +
                        ": unknown section [" + slot.first + "]");
  }
}

RunConfig load_config(const std::string& path) {
  return bind_config(TomlTable::parse_file(path));
}

RunConfig bind_config(const TomlTable& table) {
  table.reject_unknown_sections({"hyper", "sim", "train"});
  table.reject_unknown_keys(
      "hyper", {"beta", "gamma", "xi", "lambda_stoc", "g_multipliers",
                "rss_threshold_dbm", "slot_hours", "binarize_threshold",
                "max_iterations", "attendance_estimator", "seed"});
  table.reject_unknown_keys(
      "sim", {"m_poi", "n_nonpoi", "dim", "events", "attend_prob",
              "images_per_attendance", "cluster_spread", "separation",
              "nonpoi_presence_prob", "false_alarm_face_rate",
              "false_alarm_device_rate", "slot_hours", "seed"});
  table.reject_unknown_keys("train", {"epochs", "batch_size", "learning_rate",
                                      "val_fraction", "lambda_stoc", "seed"});

  RunConfig cfg;
  HyperParams& hy = cfg.hyper;
  hy.beta = table.get_double("hyper", "beta", hy.beta);
  hy.gamma = table.get_double("hyper", "gamma", hy.gamma);
  hy.xi = table.get_double("hyper", "xi", hy.xi);
  hy.lambda_stoc = table.get_double("hyper", "lambda_stoc", hy.lambda_stoc);
  std::tie(hy.g_mult_lo, hy.g_mult_hi) =
      table.get_int_range("hyper", "g_multipliers", {hy.g_mult_lo, hy.g_mult_hi});
  hy.rss_threshold_dbm =
      table.get_double("hyper", "rss_threshold_dbm", hy.rss_threshold_dbm);
  hy.slot_hours = static_cast<int>(table.get_int("hyper", "slot_hours", hy.slot_hours));
  hy.binarize_threshold =
      table.get_double("hyper", "binarize_threshold", hy.binarize_threshold);
  hy.max_iterations =
      static_cast<int>(table.get_int("hyper", "max_iterations", hy.max_iterations));
  const std::string estimator = table.get_string(
      "hyper", "attendance_estimator", attendance_estimator_name(hy.attendance_estimator));
  const auto parsed = attendance_estimator_from_name(estimator);
  if (!parsed)
    throw ConfigError("field hyper.attendance_estimator must be one of "
                      "presence|mean_max|mean_sum, got '" + estimator + "'");
  hy.attendance_estimator = *parsed;
  hy.seed = table.get_uint("hyper", "seed", hy.seed);
  hy.validate();

  SimConfig& sim = cfg.sim;
  sim.m_poi = static_cast<int>(table.get_int("sim", "m_poi", sim.m_poi));
  sim.n_nonpoi = static_cast<int>(table.get_int("sim", "n_nonpoi", sim.n_nonpoi));
  sim.dim = static_cast<int>(table.get_int("sim", "dim", sim.dim));
  sim.events = static_cast<int>(table.get_int("sim", "events", sim.events));
  sim.attend_prob = table.get_double("sim", "attend_prob", sim.attend_prob);
  std::tie(sim.images_min, sim.images_max) = table.get_int_range(
      "sim", "images_per_attendance", {sim.images_min, sim.images_max});
  sim.cluster_spread = table.get_double("sim", "cluster_spread", sim.cluster_spread);
  sim.separation = table.get_double("sim", "separation", sim.separation);
  sim.nonpoi_presence_prob =
      table.get_double("sim", "nonpoi_presence_prob", sim.nonpoi_presence_prob);
  sim.false_alarm_face_rate =
      table.get_double("sim", "false_alarm_face_rate", sim.false_alarm_face_rate);
  sim.false_alarm_device_rate = table.get_double("sim", "false_alarm_device_rate",
                                                 sim.false_alarm_device_rate);
  sim.slot_hours = static_cast<int>(table.get_int("sim", "slot_hours", sim.slot_hours));
  sim.seed = table.get_uint("sim", "seed", sim.seed);
  sim.validate();

  TrainConfig& train = cfg.train;
  train.epochs = static_cast<int>(table.get_int("train", "epochs", train.epochs));
  train.batch_size =
      static_cast<int>(table.get_int("train", "batch_size", train.batch_size));
  train.learning_rate =
      table.get_double("train", "learning_rate", train.learning_rate);
  train.val_fraction = table.get_double("train", "val_fraction", train.val_fraction);
  train.lambda_stoc = table.has("train", "lambda_stoc")
                          ? table.get_double("train", "lambda_stoc", train.lambda_stoc)
                          : hy.lambda_stoc;
  train.seed = table.has("train", "seed") ? table.get_uint("train", "seed", train.seed)
                                          : hy.seed;
  train.validate();

  return cfg;
}

}  // namespace crosstune
