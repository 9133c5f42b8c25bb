#include "k29/reality.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "k29/io.hpp"
#include "k29/rng.hpp"

namespace k29 {

void RealitySpec::validate() const {
  switch (kind) {
    case RealityKind::bernoulli:
      if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("RealitySpec: theta must be in [0, 1]");
      break;
    case RealityKind::regime:
      if (script.empty())
        throw std::invalid_argument("RealitySpec: regime script is empty");
      for (const auto& seg : script) {
        if (seg.count < 1)
          throw std::invalid_argument("RealitySpec: segment count must be >= 1");
        if (!(seg.theta >= 0.0 && seg.theta <= 1.0))
          throw std::invalid_argument("RealitySpec: segment theta must be in [0, 1]");
      }
      break;
    case RealityKind::dawid:
      break;
    case RealityKind::replay:
      if (replay_path.empty())
        throw std::invalid_argument("RealitySpec: replay path is empty");
      break;
  }
}

std::vector<RegimeSegment> parse_regime_script(const std::string& text) {
  std::vector<RegimeSegment> script;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("regime script: expected count:theta, got '" +
                                  part + "'");
    RegimeSegment seg;
    const std::string count_text = part.substr(0, colon);
    try {
      if (count_text.empty() ||
          count_text.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("count must be a positive integer");
      seg.count = std::stoull(count_text);
      std::size_t used = 0;
      seg.theta = std::stod(part.substr(colon + 1), &used);
      if (used != part.size() - colon - 1)
        throw std::invalid_argument("trailing characters after theta");
    } catch (const std::exception&) {
      throw std::invalid_argument("regime script: malformed segment '" + part + "'");
    }
    if (seg.count < 1 || !(seg.theta >= 0.0 && seg.theta <= 1.0))
      throw std::invalid_argument("regime script: invalid segment '" + part + "'");
    script.push_back(seg);
  }
  if (script.empty())
    throw std::invalid_argument("regime script: empty");
  return script;
}

int dawid_label(double forecast) { return forecast < 0.5 ? 1 : 0; }

namespace {

class BernoulliReality final : public RealityStrategy {
 public:
  BernoulliReality(double theta, std::uint64_t seed) : theta_(theta), rng_(seed) {}
  std::string name() const override { return "bernoulli"; }
  void reset(std::uint64_t seed) override { rng_ = SplitMix64(seed); }
  Eigen::VectorXd present_object(std::size_t) override { return {}; }
  int choose_label(std::size_t, const History&, double) override {
    return rng_.next_bernoulli(theta_);
  }

 private:
  double theta_;
  SplitMix64 rng_;
};

class RegimeReality final : public RealityStrategy {
 public:
  RegimeReality(std::vector<RegimeSegment> script, bool expose_theta,
                std::uint64_t seed)
      : script_(std::move(script)), expose_theta_(expose_theta), rng_(seed) {}
  std::string name() const override { return "regime"; }
  void reset(std::uint64_t seed) override { rng_ = SplitMix64(seed); }
  Eigen::VectorXd present_object(std::size_t round_index) override {
    if (!expose_theta_) return {};
    Eigen::VectorXd x(1);
    x[0] = theta_at(round_index);
    return x;
  }
  int choose_label(std::size_t round_index, const History&, double) override {
    return rng_.next_bernoulli(theta_at(round_index));
  }

 private:
  double theta_at(std::size_t round_index) const {
    std::size_t offset = round_index;
    for (const auto& seg : script_) {
      if (offset < seg.count) return seg.theta;
      offset -= seg.count;
    }
    throw std::out_of_range("regime script exhausted at round " +
                            std::to_string(round_index + 1));
  }

  std::vector<RegimeSegment> script_;
  bool expose_theta_;
  SplitMix64 rng_;
};

class DawidReality final : public RealityStrategy {
 public:
  std::string name() const override { return "dawid"; }
  Eigen::VectorXd present_object(std::size_t) override { return {}; }
  int choose_label(std::size_t, const History&, double forecast) override {
    return dawid_label(forecast);
  }
};

class ReplayReality final : public RealityStrategy {
 public:
  explicit ReplayReality(std::vector<ReplayRecord> records)
      : records_(std::move(records)) {}
  std::string name() const override { return "replay"; }
  Eigen::VectorXd present_object(std::size_t round_index) override {
    return record_at(round_index).object;
  }
  int choose_label(std::size_t round_index, const History&, double) override {
    return record_at(round_index).label;
  }

 private:
  const ReplayRecord& record_at(std::size_t i) const {
    if (i >= records_.size())
      throw std::out_of_range("replay exhausted at round " + std::to_string(i + 1));
    return records_[i];
  }

  std::vector<ReplayRecord> records_;
};

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line,
                             const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + what);
}

std::vector<ReplayRecord> replay_from_jsonl(std::istream& in,
                                            const std::string& origin) {
  std::vector<ReplayRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      parse_fail(origin, line_no, e.what());
    }
    ReplayRecord rec;
    if (!j.contains("y") || !j["y"].is_number())
      parse_fail(origin, line_no, "missing numeric field 'y'");
    const double y = j["y"].get<double>();
    if (y != 0.0 && y != 1.0)
      parse_fail(origin, line_no, "label y=" + j["y"].dump() + " not in {0, 1}");
    rec.label = static_cast<int>(y);
    if (j.contains("x")) {
      if (!j["x"].is_array()) parse_fail(origin, line_no, "'x' must be an array");
      rec.object.resize(static_cast<Eigen::Index>(j["x"].size()));
      Eigen::Index i = 0;
      for (const auto& v : j["x"]) {
        if (!v.is_number()) parse_fail(origin, line_no, "'x' entries must be numbers");
        rec.object[i++] = v.get<double>();
      }
      if (!rec.object.allFinite())
        parse_fail(origin, line_no, "'x' entries must be finite");
    }
    if (!records.empty() && records.front().object.size() != rec.object.size())
      parse_fail(origin, line_no, "object dimension changed mid-stream");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ReplayRecord> replay_from_csv(std::istream& in, const std::string& origin) {
  const CsvTable table = read_csv(in, origin);
  const std::size_t y_col = table.column_index("y");
  std::vector<std::size_t> x_cols;
  for (std::size_t d = 0;; ++d) {
    const std::string name = "x" + std::to_string(d);
    bool found = false;
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      if (table.columns[c] == name) {
        x_cols.push_back(c);
        found = true;
        break;
      }
    if (!found) break;
  }
  std::vector<ReplayRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    ReplayRecord rec;
    const double y = table.rows[r][y_col];
    if (y != 0.0 && y != 1.0)
      parse_fail(origin, r + 2, "label y=" + std::to_string(y) + " not in {0, 1}");
    rec.label = static_cast<int>(y);
    rec.object.resize(static_cast<Eigen::Index>(x_cols.size()));
    for (std::size_t d = 0; d < x_cols.size(); ++d)
      rec.object[static_cast<Eigen::Index>(d)] = table.rows[r][x_cols[d]];
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

std::vector<ReplayRecord> read_replay_stream(std::istream& in,
                                             const std::string& origin) {
  // Sniff the format: JSON-lines records start with '{'.
  const int first = [&] {
    int c;
    while ((c = in.peek()) != EOF && (c == ' ' || c == '\t' || c == '\n' || c == '\r'))
      in.get();
    return c;
  }();
  if (first == EOF) return {};
  return first == '{' ? replay_from_jsonl(in, origin) : replay_from_csv(in, origin);
}

std::vector<ReplayRecord> read_replay_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open replay file: " + path);
  return read_replay_stream(in, path);
}

std::unique_ptr<RealityStrategy> make_bernoulli_reality(double theta,
                                                        std::uint64_t seed) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("bernoulli reality: theta must be in [0, 1]");
  return std::make_unique<BernoulliReality>(theta, seed);
}

std::unique_ptr<RealityStrategy> make_regime_reality(std::vector<RegimeSegment> script,
                                                     bool expose_theta_as_object,
                                                     std::uint64_t seed) {
  if (script.empty())
    throw std::invalid_argument("regime reality: empty script");
  return std::make_unique<RegimeReality>(std::move(script), expose_theta_as_object,
                                         seed);
}

std::unique_ptr<RealityStrategy> make_dawid_reality() {
  return std::make_unique<DawidReality>();
}

std::unique_ptr<RealityStrategy> make_replay_reality(std::vector<ReplayRecord> records) {
  return std::make_unique<ReplayReality>(std::move(records));
}

std::unique_ptr<RealityStrategy> make_reality(const RealitySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case RealityKind::bernoulli:
      return make_bernoulli_reality(spec.theta, spec.seed);
    case RealityKind::regime:
      return make_regime_reality(spec.script, spec.expose_theta_as_object, spec.seed);
    case RealityKind::dawid:
      return make_dawid_reality();
    case RealityKind::replay:
      return make_replay_reality(read_replay_file(spec.replay_path));
  }
  throw std::logic_error("make_reality: unknown kind");
}

}  // namespace k29
