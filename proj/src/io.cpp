#include "sleuth/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sleuth {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& token, const std::string& where) {
  if (token == "inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": expected a number, got '" + token + "'");
  }
}

long parse_int(const std::string& token, const std::string& where) {
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": expected an integer, got '" + token + "'");
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

std::string format_time(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

Network read_network(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  int line_no = 0;
  int node_count = -1;
  double shape = 0.0;
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    std::istringstream ss(text);
    const std::string where = path + ":" + std::to_string(line_no);
    if (node_count < 0) {
      std::string n_tok, k_tok, extra;
      ss >> n_tok >> k_tok;
      if (!ss || (ss >> extra)) throw DataError(where + ": expected 'N k' header");
      node_count = static_cast<int>(parse_int(n_tok, where));
      shape = parse_double(k_tok, where);
      if (node_count <= 0) throw DataError(where + ": node count must be positive");
      if (!(shape > 0.0)) throw DataError(where + ": kernel shape must be > 0");
      continue;
    }
    std::string j_tok, i_tok, a_tok, extra;
    ss >> j_tok >> i_tok >> a_tok;
    if (!ss || (ss >> extra)) throw DataError(where + ": expected 'j i alpha'");
    const int j = static_cast<int>(parse_int(j_tok, where));
    const int i = static_cast<int>(parse_int(i_tok, where));
    const double alpha = parse_double(a_tok, where);
    if (j < 0 || j >= node_count || i < 0 || i >= node_count)
      throw DataError(where + ": node id out of range");
    if (j == i) throw DataError(where + ": self-loop");
    if (!(alpha > 0.0)) throw DataError(where + ": alpha must be > 0");
    edges.push_back({j, i, alpha});
  }
  if (node_count < 0) throw DataError(path + ": missing 'N k' header");
  try {
    return Network(node_count, std::move(edges), shape);
  } catch (const std::invalid_argument& err) {
    throw DataError(path + ": " + err.what());
  }
}

void write_network(const Network& net, const std::string& path,
                   const std::string& manifest_id) {
  std::ofstream out = open_output(path);
  out << "# network v" << kNetworkFormatVersion << "\n";
  if (!manifest_id.empty()) out << "# manifest: " << manifest_id << "\n";
  out << net.node_count() << " " << format_time(net.kernel_shape()) << "\n";
  for (const Edge& e : net.edges())
    out << e.src << " " << e.dst << " " << format_time(e.alpha) << "\n";
}

std::vector<CascadeRecord> read_cascades(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<CascadeRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::string where =
        path + ":" + std::to_string(line_no) + " (cascade " +
        std::to_string(records.size()) + ")";

    const std::size_t p1 = text.find(';');
    const std::size_t p2 = p1 == std::string::npos ? p1 : text.find(';', p1 + 1);
    if (p2 == std::string::npos)
      throw DataError(where + ": expected 'src_hint;window;events'");

    CascadeRecord rec;
    rec.source_hint = static_cast<int>(parse_int(trim(text.substr(0, p1)), where));
    rec.window = parse_double(trim(text.substr(p1 + 1, p2 - p1 - 1)), where);
    if (!(rec.window > 0.0)) throw DataError(where + ": window must be > 0");

    std::string events = trim(text.substr(p2 + 1));
    std::vector<char> seen;
    while (!events.empty()) {
      const std::size_t comma = events.find(',');
      const std::string pair = trim(events.substr(0, comma));
      events = comma == std::string::npos ? std::string() : trim(events.substr(comma + 1));
      if (pair.empty()) continue;
      const std::size_t colon = pair.find(':');
      if (colon == std::string::npos)
        throw DataError(where + ": expected 'node:time', got '" + pair + "'");
      const int node = static_cast<int>(parse_int(trim(pair.substr(0, colon)), where));
      const double time = parse_double(trim(pair.substr(colon + 1)), where);
      if (node < 0) throw DataError(where + ": negative node id");
      if (static_cast<std::size_t>(node) >= seen.size()) seen.resize(node + 1, 0);
      if (seen[node])
        throw DataError(where + ": duplicate node " + std::to_string(node));
      seen[node] = 1;
      rec.events.emplace_back(node, time);
    }

    double earliest = kInf;
    for (const auto& [node, time] : rec.events) {
      (void)node;
      earliest = std::min(earliest, time);
    }
    for (const auto& [node, time] : rec.events) {
      (void)node;
      if (time - earliest >= rec.window)
        throw DataError(where + ": event time beyond the observation window");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_cascades(const std::vector<CascadeRecord>& records, int node_count,
                    const std::string& path, const std::string& manifest_id) {
  std::ofstream out = open_output(path);
  out << "# cascades v" << kCascadeFormatVersion << " nodes " << node_count << "\n";
  if (!manifest_id.empty()) out << "# manifest: " << manifest_id << "\n";
  for (const CascadeRecord& rec : records) {
    auto events = rec.events;
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    out << rec.source_hint << ";" << format_time(rec.window) << ";";
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (i) out << ",";
      out << events[i].first << ":" << format_time(events[i].second);
    }
    out << "\n";
  }
}

CascadeRecord to_record(const Cascade& cascade) {
  CascadeRecord rec;
  rec.source_hint = cascade.source;
  rec.window = cascade.window;
  for (int v = 0; v < static_cast<int>(cascade.times.size()); ++v)
    if (std::isfinite(cascade.times[v])) rec.events.emplace_back(v, cascade.times[v]);
  std::sort(rec.events.begin(), rec.events.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return rec;
}

CascadeRecord to_record(const ObservedCascade& observed) {
  CascadeRecord rec;
  rec.source_hint = observed.source_hint;
  rec.window = observed.window;
  rec.events = observed.observed;
  std::sort(rec.events.begin(), rec.events.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  return rec;
}

Cascade record_to_cascade(const CascadeRecord& record, int node_count) {
  Cascade cascade;
  cascade.window = record.window;
  cascade.times.assign(node_count, kInf);
  for (const auto& [node, time] : record.events) {
    if (node >= node_count)
      throw DataError("cascade references node " + std::to_string(node) +
                      " outside the network");
    cascade.times[node] = time;
  }
  if (record.events.empty()) throw DataError("cascade has no infected node");
  cascade.source = record.source_hint;
  if (cascade.source < 0) {
    double best = kInf;
    for (int v = 0; v < node_count; ++v)
      if (cascade.times[v] < best) {
        best = cascade.times[v];
        cascade.source = v;
      }
  }
  return cascade;
}

ObservedCascade record_to_observed(const CascadeRecord& record, int node_count) {
  ObservedCascade obs;
  obs.node_count = node_count;
  obs.window = record.window;
  obs.source_hint = record.source_hint;
  obs.observed = record.events;
  for (const auto& [node, time] : obs.observed) {
    (void)time;
    if (node >= node_count)
      throw DataError("cascade references node " + std::to_string(node) +
                      " outside the network");
  }
  std::sort(obs.observed.begin(), obs.observed.end());
  std::erase_if(obs.observed,
                [&](const auto& p) { return p.first == record.source_hint; });
  if (obs.observed.empty())
    throw DataError("cascade has no observed non-source infection");
  return obs;
}

FlatConfig FlatConfig::parse_file(const std::string& path) {
  std::ifstream in = open_input(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

FlatConfig FlatConfig::parse_string(const std::string& text) {
  FlatConfig config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments outside of quotes
    std::string stripped;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      if (ch == '#' && !quoted) break;
      stripped += ch;
    }
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(line_no) +
                      ": expected 'key = value'");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw DataError("config line " + std::to_string(line_no) +
                      ": empty key or value");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    config.values_[key] = value;
  }
  return config;
}

bool FlatConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string FlatConfig::get_string(const std::string& key,
                                   const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double FlatConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback
                             : parse_double(it->second, "config key " + key);
}

std::int64_t FlatConfig::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_int(it->second, "config key " + key);
}

bool FlatConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  throw DataError("config key " + key + ": expected true or false");
}

std::vector<double> FlatConfig::get_double_list(const std::string& key,
                                                std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string body = trim(it->second);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']')
    throw DataError("config key " + key + ": expected a [..] list");
  body = body.substr(1, body.size() - 2);
  std::vector<double> out;
  std::istringstream ss(body);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(parse_double(token, "config key " + key));
  }
  return out;
}

std::string fnv1a_digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

void RunManifest::finalize_id() {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  auto mix = [&hash](const std::string& s) {
    for (unsigned char ch : s) {
      hash ^= ch;
      hash *= 0x100000001b3ull;
    }
  };
  mix(std::to_string(master_seed));
  mix(tool_version);
  // content digests only: renaming an input must not change the id
  for (const auto& [path, digest] : input_digests) {
    (void)path;
    mix(digest);
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  id = hex;
}

std::string RunManifest::to_json() const {
  std::ostringstream out;
  out << "{\n";
  out << "  \"id\": \"" << id << "\",\n";
  out << "  \"master_seed\": " << master_seed << ",\n";
  out << "  \"tool_version\": \"" << tool_version << "\",\n";
  out << "  \"network_format_version\": " << network_format_version << ",\n";
  out << "  \"cascade_format_version\": " << cascade_format_version << ",\n";
  out << "  \"inputs\": [";
  for (std::size_t i = 0; i < input_digests.size(); ++i) {
    if (i) out << ", ";
    out << "{\"path\": \"" << input_digests[i].first << "\", \"fnv64\": \""
        << input_digests[i].second << "\"}";
  }
  out << "],\n";
  out << "  \"wall_seconds\": " << wall_seconds << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace sleuth
