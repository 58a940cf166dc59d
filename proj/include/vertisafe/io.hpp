#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vertisafe/model.hpp"

namespace vertisafe {

/// Unreadable or invalid input file, located by line (0 when unknown).
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& source, std::size_t line, const std::string& message)
      : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

/// Forward iterator that publishes how far the JSON lexer has read.
struct TrackedChars {
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* at = nullptr;
  const char** cursor = nullptr;

  reference operator*() const { return *at; }
  TrackedChars& operator++() {
    ++at;
    if (cursor) *cursor = at;
    return *this;
  }
  TrackedChars operator++(int) {
    TrackedChars old = *this;
    ++*this;
    return old;
  }
  bool operator==(const TrackedChars& o) const { return at == o.at; }
  bool operator!=(const TrackedChars& o) const { return at != o.at; }
};

/// Records the line on which every value starts, keyed by element path
/// ("links[3].backups[1]").
class LineRecorder {
 public:
  using json = nlohmann::json;
  using number_integer_t = json::number_integer_t;
  using number_unsigned_t = json::number_unsigned_t;
  using number_float_t = json::number_float_t;
  using string_t = json::string_t;
  using binary_t = json::binary_t;

  LineRecorder(std::string_view text, const char** cursor) : begin_(text.data()), cursor_(cursor) {
    for (std::size_t i = 0; i < text.size(); ++i)
      if (text[i] == '\n') newlines_.push_back(i);
  }

  bool null() { return value(); }
  bool boolean(bool) { return value(); }
  bool number_integer(number_integer_t) { return value(); }
  bool number_unsigned(number_unsigned_t) { return value(); }
  bool number_float(number_float_t, const string_t&) { return value(); }
  bool string(string_t&) { return value(); }
  bool binary(binary_t&) { return value(); }
  bool start_object(std::size_t) {
    value();
    frames_.push_back({path_here_, false, 0, {}});
    return true;
  }
  bool key(string_t& k) {
    frames_.back().key = k;
    return true;
  }
  bool end_object() {
    frames_.pop_back();
    return true;
  }
  bool start_array(std::size_t) {
    value();
    frames_.push_back({path_here_, true, 0, {}});
    return true;
  }
  bool end_array() {
    frames_.pop_back();
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) { return false; }

  const std::map<std::string, std::size_t>& lines() const { return lines_; }

 private:
  struct Frame {
    std::string path;
    bool array;
    std::size_t index;
    std::string key;
  };

  std::size_t current_line() const {
    std::size_t offset = static_cast<std::size_t>(*cursor_ - begin_);
    // The lexer has consumed the first character of the value.
    if (offset > 0) --offset;
    return static_cast<std::size_t>(std::lower_bound(newlines_.begin(), newlines_.end(), offset) - newlines_.begin()) + 1;
  }

  bool value() {
    if (frames_.empty()) {
      path_here_.clear();
    } else {
      Frame& f = frames_.back();
      if (f.array) {
        path_here_ = f.path + "[" + std::to_string(f.index++) + "]";
      } else {
        path_here_ = f.path.empty() ? f.key : f.path + "." + f.key;
      }
    }
    lines_.emplace(path_here_, current_line());
    return true;
  }

  const char* begin_;
  const char** cursor_;
  std::vector<std::size_t> newlines_;
  std::vector<Frame> frames_;
  std::string path_here_;
  std::map<std::string, std::size_t> lines_;
};

/// Parsed JSON document plus a path -> line index for diagnostics.
class SourceDocument {
 public:
  SourceDocument(std::string text, std::string source) : text_(std::move(text)), source_(std::move(source)) {
    try {
      doc_ = nlohmann::json::parse(text_);
    } catch (const nlohmann::json::parse_error& e) {
      std::size_t line = 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + std::min(e.byte, text_.size()), '\n'));
      std::string msg = e.what();
      if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
      throw InputError(source_, line, msg);
    }
    const char* cursor = text_.data();
    LineRecorder rec(text_, &cursor);
    TrackedChars first{text_.data(), &cursor};
    TrackedChars last{text_.data() + text_.size(), nullptr};
    nlohmann::json::sax_parse(first, last, &rec);
    lines_ = rec.lines();
  }

  const nlohmann::json& root() const { return doc_; }
  const std::string& source() const { return source_; }

  /// Line of the element at `path`, falling back to its closest parent.
  std::size_t line_of(std::string path) const {
    for (;;) {
      if (auto it = lines_.find(path); it != lines_.end()) return it->second;
      if (path.empty()) return 1;
      auto cut = path.find_last_of(".[");
      path = cut == std::string::npos ? std::string() : path.substr(0, cut);
    }
  }

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    throw InputError(source_, line_of(path), message);
  }

 private:
  std::string text_;
  std::string source_;
  nlohmann::json doc_;
  std::map<std::string, std::size_t> lines_;
};

inline void expect_keys(const SourceDocument& doc, const nlohmann::json& obj, const std::string& path,
                        std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) doc.fail(path, (path.empty() ? std::string("document") : path) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      doc.fail(path.empty() ? it.key() : path + "." + it.key(), "unexpected key \"" + it.key() + "\"");
  }
}

inline const nlohmann::json& require(const SourceDocument& doc, const nlohmann::json& obj, const std::string& path,
                                     const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) doc.fail(path, "missing key \"" + key + "\"");
  return *it;
}

inline std::string read_string(const SourceDocument& doc, const nlohmann::json& v, const std::string& path) {
  if (!v.is_string()) doc.fail(path, path + " must be a string");
  return v.get<std::string>();
}

inline Time read_time(const SourceDocument& doc, const nlohmann::json& v, const std::string& path) {
  std::optional<Time> t;
  if (v.is_number_integer()) {
    t = Time::parse(std::to_string(v.get<std::int64_t>()));
  } else if (v.is_string()) {
    t = Time::parse(v.get<std::string>());
  } else {
    doc.fail(path, path + " must be a decimal string or an integer");
  }
  if (!t) doc.fail(path, path + " is not a decimal with at most 3 fractional digits");
  return *t;
}

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
inline std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline NetworkDescription read_network_description(const SourceDocument& doc) {
  const auto& root = doc.root();
  expect_keys(doc, root, "", {"w", "nodes", "links", "routes"});
  NetworkDescription d;
  d.ground_time = read_time(doc, require(doc, root, "", "w"), "w");

  const auto& nodes = require(doc, root, "", "nodes");
  if (!nodes.is_array()) doc.fail("nodes", "nodes must be an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string p = index("nodes", i);
    expect_keys(doc, nodes[i], p, {"id", "capacity"});
    NetworkDescription::NodeEntry n;
    n.id = read_string(doc, require(doc, nodes[i], p, "id"), join(p, "id"));
    if (auto it = nodes[i].find("capacity"); it != nodes[i].end()) {
      if (it->is_string() && it->get<std::string>() == "unbounded") {
        n.capacity = Capacity::unbounded();
      } else if (it->is_number_integer()) {
        n.capacity = Capacity::finite(it->get<std::int64_t>());
      } else {
        doc.fail(join(p, "capacity"), "capacity must be an integer or \"unbounded\"");
      }
    }
    d.nodes.push_back(std::move(n));
  }

  const auto& links = require(doc, root, "", "links");
  if (!links.is_array()) doc.fail("links", "links must be an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string p = index("links", i);
    const auto& l = links[i];
    expect_keys(doc, l, p, {"id", "tail", "head", "tmin", "tmax", "backups"});
    NetworkDescription::LinkEntry e;
    e.id = read_string(doc, require(doc, l, p, "id"), join(p, "id"));
    e.tail = read_string(doc, require(doc, l, p, "tail"), join(p, "tail"));
    e.head = read_string(doc, require(doc, l, p, "head"), join(p, "head"));
    e.min_travel = read_time(doc, require(doc, l, p, "tmin"), join(p, "tmin"));
    e.max_travel = read_time(doc, require(doc, l, p, "tmax"), join(p, "tmax"));
    const auto& b = require(doc, l, p, "backups");
    if (!b.is_array()) doc.fail(join(p, "backups"), "backups must be an array");
    for (std::size_t k = 0; k < b.size(); ++k) e.backups.push_back(read_string(doc, b[k], index(join(p, "backups"), k)));
    d.links.push_back(std::move(e));
  }

  const auto& routes = require(doc, root, "", "routes");
  if (!routes.is_array()) doc.fail("routes", "routes must be an array");
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const std::string p = index("routes", i);
    expect_keys(doc, routes[i], p, {"id", "links"});
    NetworkDescription::RouteEntry r;
    r.id = read_string(doc, require(doc, routes[i], p, "id"), join(p, "id"));
    const auto& ls = require(doc, routes[i], p, "links");
    if (!ls.is_array()) doc.fail(join(p, "links"), "links must be an array");
    for (std::size_t k = 0; k < ls.size(); ++k) r.links.push_back(read_string(doc, ls[k], index(join(p, "links"), k)));
    d.routes.push_back(std::move(r));
  }
  return d;
}

inline ScheduleDescription read_schedule_description(const SourceDocument& doc) {
  const auto& root = doc.root();
  expect_keys(doc, root, "", {"flights"});
  ScheduleDescription d;
  const auto& flights = require(doc, root, "", "flights");
  if (!flights.is_array()) doc.fail("flights", "flights must be an array");
  for (std::size_t i = 0; i < flights.size(); ++i) {
    const std::string p = index("flights", i);
    expect_keys(doc, flights[i], p, {"id", "route", "depart"});
    ScheduleDescription::FlightEntry f;
    f.id = read_string(doc, require(doc, flights[i], p, "id"), join(p, "id"));
    f.route = read_string(doc, require(doc, flights[i], p, "route"), join(p, "route"));
    f.departure = read_time(doc, require(doc, flights[i], p, "depart"), join(p, "depart"));
    d.flights.push_back(std::move(f));
  }
  return d;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline UamNetwork parse_network(std::string text, const std::string& source = "<network>") {
  detail::SourceDocument doc(std::move(text), source);
  auto desc = detail::read_network_description(doc);
  try {
    return build_network(desc);
  } catch (const InvalidNetwork& e) {
    doc.fail(e.where(), e.what());
  }
}

inline FlightSchedule parse_schedule(const UamNetwork& net, std::string text, const std::string& source = "<schedule>") {
  detail::SourceDocument doc(std::move(text), source);
  auto desc = detail::read_schedule_description(doc);
  try {
    return build_schedule(net, desc);
  } catch (const InvalidSchedule& e) {
    doc.fail(e.where(), e.what());
  }
}

inline UamNetwork load_network(const std::string& path) { return parse_network(detail::slurp(path), path); }
inline FlightSchedule load_schedule(const UamNetwork& net, const std::string& path) {
  return parse_schedule(net, detail::slurp(path), path);
}

/// Canonical form: fixed key order, times as exact decimal strings.
inline std::string serialize_network(const UamNetwork& net) {
  const NetworkDescription d = net.describe();
  nlohmann::ordered_json j;
  j["w"] = d.ground_time.to_string();
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : d.nodes) {
    nlohmann::ordered_json o;
    o["id"] = n.id;
    if (n.capacity.bounded())
      o["capacity"] = n.capacity.spots();
    else
      o["capacity"] = "unbounded";
    j["nodes"].push_back(std::move(o));
  }
  j["links"] = nlohmann::ordered_json::array();
  for (const auto& l : d.links) {
    nlohmann::ordered_json o;
    o["id"] = l.id;
    o["tail"] = l.tail;
    o["head"] = l.head;
    o["tmin"] = l.min_travel.to_string();
    o["tmax"] = l.max_travel.to_string();
    o["backups"] = l.backups;
    j["links"].push_back(std::move(o));
  }
  j["routes"] = nlohmann::ordered_json::array();
  for (const auto& r : d.routes) {
    nlohmann::ordered_json o;
    o["id"] = r.id;
    o["links"] = r.links;
    j["routes"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

inline std::string serialize_schedule(const UamNetwork& net, const FlightSchedule& schedule) {
  nlohmann::ordered_json j;
  j["flights"] = nlohmann::ordered_json::array();
  for (const auto& f : schedule.describe(net).flights) {
    nlohmann::ordered_json o;
    o["id"] = f.id;
    o["route"] = f.route;
    o["depart"] = f.departure.to_string();
    j["flights"].push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

}  // namespace vertisafe
