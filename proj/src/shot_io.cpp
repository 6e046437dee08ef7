#include "tqd/shot_io.hpp"

#include "tqd/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tqd {

static_assert(std::endian::native == std::endian::little, "binary shot format assumes a little-endian host");

namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'Q', 'D', 'S', 'H', 'O', 'T', '\0'};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCategory::input, "shot CSV row " + std::to_string(row) + ": bad number '" + s + "'");
  }
}

json tones_to_json(const ToneSet& t) {
  json tones = json::array();
  for (std::size_t k = 0; k < t.tones.size(); ++k)
    tones.push_back({{"f_d_GHz", t.tones[k].f_d},
                     {"amplitude_GHz", t.tones[k].amplitude},
                     {"phase_rad", t.tones[k].phase},
                     {"demod_GHz", t.demod_freqs[k]}});
  return {{"tones", tones}, {"duration_us", t.duration}};
}

ToneSet tones_from_json(const json& j) {
  ToneSet t;
  t.duration = j.at("duration_us").get<double>();
  for (const auto& e : j.at("tones")) {
    t.tones.push_back({e.at("f_d_GHz").get<double>(), e.at("amplitude_GHz").get<double>(),
                       e.at("phase_rad").get<double>()});
    t.demod_freqs.push_back(e.at("demod_GHz").get<double>());
  }
  return t;
}

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) fail(ErrorCategory::input, "truncated binary shot file");
  return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_shots_csv(std::ostream& os, const ShotSet& shots) {
  const std::size_t width = shots.records.empty() ? 2 * shots.tones.tones.size() : shots.records[0].values.size();
  os << "label,decayed";
  for (std::size_t k = 0; k < width / 2; ++k) os << ",I" << k + 1 << ",Q" << k + 1;
  os << "\n" << std::setprecision(17);
  for (std::size_t r = 0; r < shots.records.size(); ++r) {
    const IQRecord& rec = shots.records[r];
    if (rec.values.size() != width) fail(ErrorCategory::input, "records have inconsistent lengths");
    if (rec.true_label) os << *rec.true_label;
    os << "," << (r < shots.decayed.size() && shots.decayed[r] ? 1 : 0);
    for (double v : rec.values) os << "," << v;
    os << "\n";
  }
}

ShotSet read_shots_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCategory::input, "shot CSV is empty");
  const auto header = split(line);
  if (header.size() < 4 || header[0] != "label" || header[1] != "decayed" || header.size() % 2 != 0)
    fail(ErrorCategory::input, "shot CSV header must be label,decayed,I1,Q1,...");
  ShotSet out;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      fail(ErrorCategory::input, "shot CSV row " + std::to_string(row) + " has the wrong column count");
    IQRecord rec;
    if (!cells[0].empty()) rec.true_label = static_cast<int>(parse_double(cells[0], row));
    out.decayed.push_back(cells[1] == "1");
    for (std::size_t k = 2; k < cells.size(); ++k) rec.values.push_back(parse_double(cells[k], row));
    out.records.push_back(std::move(rec));
  }
  return out;
}

void write_shots_binary(std::ostream& os, const ShotSet& shots) {
  const std::size_t width = shots.records.empty() ? 0 : shots.records[0].values.size();
  json meta = tones_to_json(shots.tones);
  meta["noise_sigma"] = shots.noise_sigma;
  meta["seed"] = shots.seed;
  meta["records"] = shots.records.size();
  meta["width"] = width;
  meta["warnings"] = shots.warnings;
  const std::string text = meta.dump();

  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kShotFormatVersion);
  put<std::uint64_t>(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t r = 0; r < shots.records.size(); ++r) {
    const IQRecord& rec = shots.records[r];
    if (rec.values.size() != width) fail(ErrorCategory::input, "records have inconsistent lengths");
    put<std::int32_t>(os, rec.true_label ? *rec.true_label : -1);
    put<std::uint8_t>(os, r < shots.decayed.size() && shots.decayed[r] ? 1 : 0);
    for (double v : rec.values) put<double>(os, v);
  }
}

ShotSet read_shots_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    fail(ErrorCategory::input, "not a binary shot file (bad magic)");
  const auto version = get<std::uint32_t>(is);
  if (version != kShotFormatVersion)
    fail(ErrorCategory::input, "unsupported shot format version " + std::to_string(version));
  const auto length = get<std::uint64_t>(is);
  if (length > (1u << 26)) fail(ErrorCategory::input, "shot metadata block is implausibly large");
  std::string text(length, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(length))) fail(ErrorCategory::input, "truncated metadata");

  ShotSet out;
  std::size_t count = 0, width = 0;
  try {
    const json meta = json::parse(text);
    out.tones = tones_from_json(meta);
    out.noise_sigma = meta.at("noise_sigma").get<double>();
    out.seed = meta.at("seed").get<std::uint64_t>();
    out.warnings = meta.value("warnings", std::vector<std::string>{});
    count = meta.at("records").get<std::size_t>();
    width = meta.at("width").get<std::size_t>();
  } catch (const json::exception& e) {
    fail(ErrorCategory::input, std::string("bad shot metadata: ") + e.what());
  }
  for (std::size_t r = 0; r < count; ++r) {
    IQRecord rec;
    const auto label = get<std::int32_t>(is);
    if (label >= 0) rec.true_label = label;
    out.decayed.push_back(get<std::uint8_t>(is) != 0);
    rec.values.resize(width);
    for (auto& v : rec.values) v = get<double>(is);
    out.records.push_back(std::move(rec));
  }
  return out;
}

void save_shots(const std::string& path, const ShotSet& shots) {
  const bool csv = ends_with(path, ".csv");
  std::ofstream os(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
  if (!os) fail(ErrorCategory::input, "cannot write " + path);
  if (csv)
    write_shots_csv(os, shots);
  else
    write_shots_binary(os, shots);
}

ShotSet load_shots(const std::string& path) {
  const bool csv = ends_with(path, ".csv");
  std::ifstream is(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
  if (!is) fail(ErrorCategory::input, "cannot read " + path);
  return csv ? read_shots_csv(is) : read_shots_binary(is);
}

}  // namespace tqd
