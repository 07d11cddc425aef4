#include "mla/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <algorithm>
#include <charconv>

namespace mla::io {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place: " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("line " + std::to_string(line) + ": not a number: '" + tok + "'");
  }
  if (!std::isfinite(v)) throw std::invalid_argument("line " + std::to_string(line) + ": non-finite value");
  return v;
}

}  // namespace

Signal parse_signal_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> v;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (n == 1 && t == "value") continue;
    v.push_back(parse_number(t, n));
  }
  if (v.empty()) throw std::invalid_argument("signal file has no samples");
  return Signal(std::move(v));
}

Signal read_signal(const std::filesystem::path& path) { return parse_signal_csv(read_file(path)); }

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

std::string signal_csv(const std::vector<double>& values) {
  std::string out = "value\n";
  for (double v : values) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<Signal> read_signal_rows(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<Signal> out;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (n == 1 && t == "value") continue;
    std::vector<double> v;
    std::stringstream ss(t);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(parse_number(trim(tok), n));
    out.emplace_back(std::move(v));
  }
  // a single-column file is one signal, not one signal per sample
  if (out.size() > 1 && std::all_of(out.begin(), out.end(), [](const Signal& s) { return s.size() == 1; })) {
    std::vector<double> v;
    for (const auto& s : out) v.push_back(s[0]);
    return {Signal(std::move(v))};
  }
  if (out.empty()) throw std::invalid_argument("no signals in " + path.string());
  return out;
}

json to_json(const IntervalRepresentation& rep) {
  json levels = json::array();
  for (const auto& lv : rep.levels) {
    json l = json::array();
    for (const auto& iv : lv) l.push_back({{"start", iv.start}, {"end", iv.end}});
    levels.push_back(std::move(l));
  }
  return {{"K", rep.K}, {"thresholds", rep.thresholds}, {"levels", levels},
          {"source_length", rep.source_length}};
}

IntervalRepresentation representation_from_json(const json& j) {
  IntervalRepresentation rep;
  rep.K = j.at("K").get<int>();
  rep.thresholds = j.at("thresholds").get<std::vector<double>>();
  rep.source_length = j.at("source_length").get<std::size_t>();
  const auto& levels = j.at("levels");
  if (rep.K < 2 || static_cast<int>(rep.thresholds.size()) != rep.K ||
      static_cast<int>(levels.size()) != rep.K) {
    throw std::invalid_argument("representation: K, thresholds and levels disagree");
  }
  for (int k = 0; k < rep.K; ++k) {
    std::vector<Interval> lv;
    for (const auto& iv : levels[k]) {
      Interval x{iv.at("start").get<double>(), iv.at("end").get<double>(), k + 1, rep.thresholds[k]};
      if (x.start > x.end) throw std::invalid_argument("representation: interval with start > end");
      lv.push_back(x);
    }
    rep.levels.push_back(std::move(lv));
  }
  return rep;
}

namespace {

json tree_node(const IntervalTree& t, std::size_t i) {
  const auto& n = t.nodes[i];
  json kids = json::array();
  for (std::size_t c : n.children) kids.push_back(tree_node(t, c));
  return {{"start", n.start}, {"end", n.end}, {"level", n.level}, {"children", kids}};
}

}  // namespace

json to_json(const IntervalTree& t) {
  if (t.nodes.empty()) return json::object();
  return tree_node(t, 0);
}

json to_json(const Hmm& h) {
  json em = json::array();
  for (const auto& e : h.emissions()) em.push_back({{"mu", e.mu}, {"sigma2", e.sigma2}});
  return {{"labels", h.labels()}, {"A", h.A()}, {"pi", h.pi()}, {"emissions", em}};
}

Hmm hmm_from_json(const json& j) {
  std::vector<Gaussian> em;
  for (const auto& e : j.at("emissions")) em.push_back({e.at("mu").get<double>(), e.at("sigma2").get<double>()});
  return Hmm(j.at("labels").get<std::vector<std::string>>(),
             j.at("A").get<std::vector<std::vector<double>>>(), j.at("pi").get<std::vector<double>>(),
             std::move(em));
}

json to_json(const SvmModel& m) {
  json machines = json::array();
  for (const auto& b : m.machines) {
    machines.push_back({{"positive_class", b.positive_class},
                        {"support", b.support},
                        {"coef", b.coef},
                        {"bias", b.bias},
                        {"iterations", b.iterations}});
  }
  return {{"classes", m.classes}, {"n_train", m.n_train}, {"C", m.params.C},
          {"tol", m.params.tol}, {"machines", machines}};
}

json to_json(const NucleosomeModel& m) {
  return {{"values", m.values}, {"os", m.os}, {"alpha", m.alpha},
          {"train_mean", m.train_mean}, {"train_std", m.train_std},
          {"train_windows", m.train_windows}};
}

NucleosomeModel model_from_json(const json& j) {
  NucleosomeModel m;
  m.values = j.at("values").get<std::vector<double>>();
  m.os = j.at("os").get<int>();
  m.alpha = j.value("alpha", 0.5);
  m.train_mean = j.at("train_mean").get<double>();
  m.train_std = j.at("train_std").get<double>();
  m.train_windows = j.value("train_windows", std::size_t{0});
  if (m.values.size() != 2 * static_cast<std::size_t>(m.os) + 1) {
    throw std::invalid_argument("model: values must have length 2*os+1");
  }
  return m;
}

json to_json(const SynthConfig& c) {
  return {{"nn", c.nn}, {"nl", c.nl}, {"lambda", c.lambda}, {"r", c.r},   {"o", c.o},
          {"nr", c.nr}, {"dp", c.dp}, {"dr", c.dr},         {"nsv", c.nsv}, {"pur", c.pur},
          {"ra", c.ra}, {"SNR", c.snr}, {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& j) {
  static const char* known[] = {"nn", "nl", "lambda", "r", "o", "nr", "dp",
                                "dr", "nsv", "pur", "ra", "SNR", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  SynthConfig c;
  c.nn = j.value("nn", c.nn);
  c.nl = j.value("nl", c.nl);
  c.lambda = j.value("lambda", c.lambda);
  c.r = j.value("r", c.r);
  c.o = j.value("o", c.o);
  c.nr = j.value("nr", c.nr);
  c.dp = j.value("dp", c.dp);
  c.dr = j.value("dr", c.dr);
  c.nsv = j.value("nsv", c.nsv);
  c.pur = j.value("pur", c.pur);
  c.ra = j.value("ra", c.ra);
  c.snr = j.value("SNR", c.snr);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

json to_json(const RandomnessReport& r, const NullParams& p) {
  json levels = json::array();
  for (const auto& l : r.levels) {
    json e = {{"k", l.k}, {"testable", l.testable}};
    if (l.testable) {
      e["skl"] = l.skl;
      e["cdf"] = l.cdf;
      e["decision"] = l.reject ? "reject" : "accept";
    } else {
      e["decision"] = "untestable";
      e["reason"] = l.reason;
    }
    levels.push_back(std::move(e));
  }
  return {{"per_level", levels},
          {"alpha", r.alpha},
          {"null_params",
           {{"N", p.N}, {"l", p.l}, {"K", p.K}, {"nb", p.nb}, {"mu", p.mu}, {"sigma", p.sigma},
            {"seed", p.seed}, {"sample_length_range", p.sample_length_range}}},
          {"untestable_levels", r.untestable_levels()}};
}

std::string matrix_csv(const Eigen::MatrixXd& m, const std::vector<std::string>& ids) {
  if (static_cast<Eigen::Index>(ids.size()) != m.cols()) throw std::invalid_argument("matrix_csv: id count mismatch");
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += ids[i];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd parse_matrix_csv(const std::string& text, std::vector<std::string>* ids) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty matrix file");
  std::vector<std::string> header;
  {
    std::stringstream ss(trim(line));
    std::string tok;
    while (std::getline(ss, tok, ',')) header.push_back(trim(tok));
  }
  std::vector<std::vector<double>> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(parse_number(trim(tok), n));
    if (row.size() != header.size()) throw std::invalid_argument("matrix row " + std::to_string(n) + " has wrong width");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < header.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  if (ids) *ids = std::move(header);
  return m;
}

}  // namespace mla::io
