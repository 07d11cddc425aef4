#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "mla/hmm.hpp"
#include "mla/io.hpp"
#include "mla/kernels.hpp"
#include "mla/parallel.hpp"
#include "mla/pipeline.hpp"
#include "mla/random.hpp"
#include "mla/randomness.hpp"

namespace mla::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

// Thrown for bad flag combinations found after parsing.
struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json meta(const std::string& command, std::uint64_t seed) {
  return {{"command", command}, {"seed", seed}, {"threads", thread_count()}};
}

void ensure_parent(const fs::path& p) {
  const auto dir = p.parent_path();
  if (!dir.empty() && !fs::exists(dir)) throw std::runtime_error("output directory does not exist: " + dir.string());
}

void write_out(const fs::path& p, const std::string& content) {
  ensure_parent(p);
  io::write_atomic(p, content);
}

std::vector<std::uint8_t> read_labels(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  std::vector<std::uint8_t> out;
  bool first = true;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (first && (line == "label" || line == "value")) {
      first = false;
      continue;
    }
    first = false;
    if (line == "0") {
      out.push_back(0);
    } else if (line == "1") {
      out.push_back(1);
    } else {
      throw std::invalid_argument(path.string() + ": labels must be 0 or 1, got '" + line + "'");
    }
  }
  return out;
}

std::string labels_csv(const std::vector<std::uint8_t>& labels) {
  std::string s = "label\n";
  for (auto v : labels) s += v ? "1\n" : "0\n";
  return s;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number in list: '" + tok + "'");
    }
    if (used != tok.size()) throw std::invalid_argument("not a number in list: '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

json pattern_json(const Pattern& p) {
  json iv = json::array();
  for (const auto& x : p.intervals) iv.push_back({{"level", x.level}, {"start", x.start}, {"end", x.end}});
  return {{"base_level", p.base_level}, {"size", p.size()}, {"intervals", iv}};
}

std::vector<std::string> row_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i + 1));
  return ids;
}

struct Options {
  // shared
  std::string input, output, model, train, config, report, labels_out, dir;
  std::uint64_t seed = 0;
  int K = 20;
  int m = 5;
  double alpha = 0.5;
  int os = 4;
  bool no_smooth = false;
  std::string classifier = "rule";
  std::string profile = "peak";
  std::optional<double> phi1, phi2;
  std::string mode = "interpolated";
  int k_max = 64;
  std::string snr_list = "1,2,4";
  std::string k_list = "20,30,40";
  int replicates = 1;
  int max_iters = 100;
  double tol = 1e-6;
  // randtest
  int N = 1000;
  std::size_t l = 20000;
  int nb = 100;
  double confidence = 0.9;
  bool full_range = false;
  // kernels
  std::string kernel = "tree";
  std::string a, b;
  double delta = 0.0;
  double lambda = 1.0;
  bool normalize = false;
  double gamma = 0.5;
  int degree = 2;
  double coef0 = 1.0;
  std::string distance_out;
  // eval
  std::string matrix, gram, pred, truth;
  bool literal = false;
  // bench
  int seeds = 10;
  double snr = 6.0;
};

using Action = std::function<void(const Options&, std::ostream&)>;

void cmd_transform(const Options& o, std::ostream&) {
  const auto s = normalize_unit(io::read_signal(o.input));
  const auto rep = horizontal_sampling(s, o.K);
  json j = io::to_json(rep);
  j["meta"] = meta("mla transform", o.seed);
  write_out(o.output, dump(j));
}

void cmd_reconstruct(const Options& o, std::ostream&) {
  const auto rep = io::representation_from_json(json::parse(io::read_file(o.input)));
  const auto s = reconstruct(rep, parse_reconstruct_mode(o.mode));
  write_out(o.output, io::signal_csv(s.values()));
}

void cmd_calibrate_k(const Options& o, std::ostream& out) {
  const auto frags = io::read_signal_rows(o.input);
  const auto cal = calibrate_k(frags, o.k_max, parse_reconstruct_mode(o.mode));
  std::string csv = "k,rho_bar,ms_bar,score\n";
  for (const auto& r : cal.rows) {
    csv += std::to_string(r.k) + "," + io::format_double(r.rho_bar) + "," + io::format_double(r.ms_bar) + "," +
           io::format_double(r.score) + "\n";
  }
  write_out(o.output, csv);
  if (!o.report.empty()) {
    json j = {{"suggested_k", cal.suggested_k}, {"fragments", frags.size()}, {"meta", meta("mla calibrate-k", o.seed)}};
    write_out(o.report, dump(j));
  }
  out << "suggested K: " << cal.suggested_k << "\n";
}

PipelineParams pipeline_params(const Options& o) {
  PipelineParams p;
  p.K = o.K;
  p.m = o.m;
  p.alpha = o.alpha;
  p.os = o.os;
  p.smooth = !o.no_smooth;
  p.classifier = parse_classifier(o.classifier);
  p.profile = parse_profile_mode(o.profile);
  p.phi1 = o.phi1;
  p.phi2 = o.phi2;
  return p;
}

void cmd_discover(const Options& o, std::ostream& out) {
  const auto p = pipeline_params(o);
  const auto x = preprocess(io::read_signal(o.input), p.smooth);
  const auto rep = horizontal_sampling(x, p.K);
  std::vector<Pattern> kept;
  for (auto& pat : aggregate_patterns(rep)) {
    if (pat.base_level > 1) kept.push_back(std::move(pat));
  }
  const auto sel = select_patterns(kept, p.m);
  json arr = json::array();
  for (const auto& pat : sel) arr.push_back(pattern_json(pat));
  json j = {{"K", p.K}, {"m", p.m}, {"candidates", kept.size()}, {"patterns", arr}, {"meta", meta("nuc discover", o.seed)}};
  write_out(o.output, dump(j));
  out << sel.size() << " patterns\n";
}

void cmd_classify(const Options& o, std::ostream& out) {
  const auto p = pipeline_params(o);
  const auto s = io::read_signal(o.input);
  std::vector<Signal> training;
  if (!o.train.empty()) training = io::read_signal_rows(o.train);
  NucleosomeModel model;
  if (!o.model.empty()) {
    model = io::model_from_json(json::parse(io::read_file(o.model)));
  } else if (!training.empty()) {
    model = model_from_signals(training, p);
  } else {
    throw usage_error("nuc classify needs --model or --train");
  }
  if (model.os != p.os && p.profile == ProfileMode::peak) throw usage_error("--os differs from the model's os");
  const auto res = run_pipeline(s, model, p, training);

  std::string csv = "start,end,label,score\n";
  for (const auto& r : res.regions) {
    csv += io::format_double(r.start) + "," + io::format_double(r.end) + "," + to_string(r.label) + "," +
           io::format_double(r.score) + "\n";
  }
  write_out(o.output, csv);
  if (!o.labels_out.empty()) write_out(o.labels_out, labels_csv(res.probe_labels));
  if (!o.report.empty()) {
    json counts = json::object();
    for (auto lab : {RegionLabel::W, RegionLabel::D, RegionLabel::F}) {
      long long n = 0;
      for (const auto& r : res.regions) n += r.label == lab;
      counts[to_string(lab)] = n;
    }
    json j = {{"regions", res.regions.size()},
              {"patterns", res.patterns.size()},
              {"counts", counts},
              {"phi1", res.params.phi1},
              {"phi2", res.params.phi2},
              {"alpha", p.alpha},
              {"K", p.K},
              {"m", p.m},
              {"classifier", o.classifier},
              {"profile", o.profile},
              {"model", io::to_json(model)},
              {"meta", meta("nuc classify", o.seed)}};
    if (p.classifier == ClassifierKind::ocknn) {
      j["ocknn"] = {{"phi", res.ocknn_phi}, {"K", res.ocknn_k}, {"training_size", res.training_size}};
    }
    write_out(o.report, dump(j));
  }
  out << res.regions.size() << " regions\n";
}

SynthConfig load_config(const Options& o) {
  SynthConfig c;
  if (!o.config.empty()) c = io::synth_config_from_json(json::parse(io::read_file(o.config)));
  return c;
}

void cmd_calibrate_m(const Options& o, std::ostream& out) {
  SynthConfig base = load_config(o);
  MCalibrationOptions opt;
  opt.snr_list = parse_list(o.snr_list);
  opt.k_list.clear();
  for (double k : parse_list(o.k_list)) {
    if (k != std::floor(k) || k < 2) throw std::invalid_argument("K values must be integers >= 2");
    opt.k_list.push_back(static_cast<int>(k));
  }
  if (o.replicates < 1) throw std::invalid_argument("--replicates must be positive");
  opt.replicates = o.replicates;
  opt.seed = o.seed;
  opt.params = pipeline_params(o);
  const auto runs = calibrate_m(base, opt);
  std::string csv = "snr,K,replicate,best_m,best_ra,m_over_K\n";
  std::size_t inside = 0;
  for (const auto& r : runs) {
    const double ratio = static_cast<double>(r.best_m) / r.K;
    inside += ratio >= 0.10 && ratio <= 0.35;
    csv += io::format_double(r.snr) + "," + std::to_string(r.K) + "," + std::to_string(r.replicate) + "," +
           std::to_string(r.best_m) + "," + io::format_double(r.best_ra) + "," + io::format_double(ratio) + "\n";
  }
  write_out(o.output, csv);
  if (!o.report.empty()) {
    json arr = json::array();
    for (const auto& r : runs) {
      arr.push_back({{"snr", r.snr}, {"K", r.K}, {"replicate", r.replicate}, {"best_m", r.best_m},
                     {"best_ra", r.best_ra}, {"ra_by_m", r.ra_by_m}});
    }
    write_out(o.report, dump({{"runs", arr}, {"config", io::to_json(base)}, {"meta", meta("nuc calibrate-m", o.seed)}}));
  }
  out << inside << "/" << runs.size() << " runs with best m/K in [0.10, 0.35]\n";
}

void cmd_synth(const Options& o, std::ostream&) {
  SynthConfig c = load_config(o);
  c.seed = o.seed;
  c.validate();
  const auto mask = generate_mask(c);
  const auto sig = generate_signal(c, mask);
  const fs::path dir = o.dir;
  if (!fs::is_directory(dir)) throw std::runtime_error("output directory does not exist: " + dir.string());
  io::write_atomic(dir / "signal.csv", io::signal_csv(sig.values.values()));
  io::write_atomic(dir / "mask.csv", labels_csv(mask.probes));
  json starts = json::array();
  for (const auto& n : mask.nucleosomes) starts.push_back({{"start", n.start}, {"delocalized", n.delocalized}});
  json j = {{"config", io::to_json(c)},
            {"probes", mask.probes.size()},
            {"base_pairs", mask.bp.size()},
            {"offset", mask.offset},
            {"noise_sd", sig.noise_sd},
            {"nucleosomes", starts},
            {"meta", meta("synth gen", o.seed)}};
  io::write_atomic(dir / "meta.json", dump(j));
}

void cmd_hmm_train(const Options& o, std::ostream& out) {
  std::vector<std::vector<double>> obs;
  for (const auto& s : io::read_signal_rows(o.input)) obs.push_back(s.values());
  std::vector<double> all;
  for (const auto& v : obs) all.insert(all.end(), v.begin(), v.end());
  const auto init = build_nucleosome_topology(init_stats_from(all));
  const auto tr = baum_welch(init, obs, o.max_iters, o.tol);
  json j = io::to_json(tr.model);
  j["training"] = {{"iterations", tr.iterations}, {"trace", tr.trace}, {"variance_floored", tr.variance_floored}};
  j["meta"] = meta("hmm train", o.seed);
  write_out(o.output, dump(j));
  out << "log-likelihood " << tr.trace.back() << " after " << tr.iterations << " iterations\n";
}

void cmd_hmm_decode(const Options& o, std::ostream& out) {
  const auto hmm = io::hmm_from_json(json::parse(io::read_file(o.model)));
  const auto s = io::read_signal(o.input);
  const auto v = viterbi(hmm, s.values());
  write_out(o.output, labels_csv(v.labels));
  out << "log-probability " << v.log_prob << "\n";
}

void cmd_randtest(const Options& o, std::ostream& out) {
  NullParams np;
  np.N = o.N;
  np.l = o.l;
  np.K = o.K;
  np.nb = o.nb;
  np.seed = derive_seed(o.seed, 0);
  np.sample_length_range = o.full_range;
  const auto frags = io::read_signal_rows(o.input);
  const auto null = estimate_null(np);
  const auto rep = run_test(frags, null, o.confidence, derive_seed(o.seed, 1));
  json j = io::to_json(rep, np);
  j["meta"] = meta("randtest run", o.seed);
  write_out(o.output, dump(j));
  if (!o.distance_out.empty()) {
    // null CDF curves, one row per distinct sample
    std::string csv = "k,skl,cdf\n";
    for (const auto& lv : null.levels) {
      for (std::size_t i = 0; i < lv.samples.size(); ++i) {
        csv += std::to_string(lv.k) + "," + io::format_double(lv.samples[i]) + "," +
               io::format_double(static_cast<double>(i + 1) / lv.samples.size()) + "\n";
      }
    }
    write_out(o.distance_out, csv);
  }
  for (const auto& l : rep.levels) {
    out << "k=" << l.k << " " << (l.testable ? (l.reject ? "reject" : "accept") : "untestable") << "\n";
  }
}

GramMatrix compute_gram(const Options& o, const std::vector<Signal>& items) {
  const std::size_t n = items.size();
  auto ids = row_ids(n);
  if (o.kernel == "tree") {
    TreeKernelParams tp{o.delta, o.lambda, o.normalize};
    tp.validate();
    std::vector<IntervalTree> trees;
    for (const auto& s : items) trees.push_back(signal_to_tree(horizontal_sampling(normalize_unit(s), o.K)));
    return gram_matrix(n, [&](std::size_t i, std::size_t j) { return tree_kernel(trees[i], trees[j], tp); }, ids);
  }
  if (o.kernel == "conv") {
    ConvKernelParams cp{o.K, o.gamma};
    std::vector<ConvFeatures> f;
    for (const auto& s : items) f.push_back(conv_features(s, cp));
    return gram_matrix(n, [&](std::size_t i, std::size_t j) { return conv_kernel(f[i], f[j], cp); }, ids);
  }
  for (const auto& s : items) {
    if (s.size() != items.front().size()) throw std::invalid_argument("vector kernels need equal-length signals");
  }
  if (o.kernel == "linear") {
    return gram_matrix(n, [&](std::size_t i, std::size_t j) { return linear_kernel(items[i].samples(), items[j].samples()); }, ids);
  }
  if (o.kernel == "rbf") {
    return gram_matrix(n, [&](std::size_t i, std::size_t j) { return rbf_kernel(items[i].samples(), items[j].samples(), o.gamma); }, ids);
  }
  if (o.kernel == "poly") {
    return gram_matrix(n, [&](std::size_t i, std::size_t j) {
      return polynomial_kernel(items[i].samples(), items[j].samples(), o.degree, o.gamma, o.coef0);
    }, ids);
  }
  throw std::invalid_argument("unknown kernel: " + o.kernel);
}

void cmd_gram(const Options& o, std::ostream& out) {
  const auto items = io::read_signal_rows(o.input);
  const auto g = compute_gram(o, items);
  write_out(o.output, io::matrix_csv(g.values, g.ids));
  const auto psd = psd_diagnostic(g.values);
  if (!o.distance_out.empty()) {
    if (!psd.psd) throw std::runtime_error("kernel not PSD on this set; no induced distance");
    write_out(o.distance_out, io::matrix_csv(induced_distance(g), g.ids));
  }
  if (!o.report.empty()) {
    write_out(o.report, dump({{"kernel", o.kernel}, {"n", g.size()}, {"min_eig", psd.min_eig},
                              {"max_eig", psd.max_eig}, {"psd", psd.psd}, {"meta", meta("kernel gram", o.seed)}}));
  }
  out << "min eigenvalue " << psd.min_eig << (psd.psd ? " (psd)\n" : " (indefinite)\n");
}

void cmd_tree(const Options& o, std::ostream& out) {
  const auto a = io::read_signal(o.a.empty() ? o.input : o.a);
  const auto ta = signal_to_tree(horizontal_sampling(normalize_unit(a), o.K));
  json j = {{"tree", io::to_json(ta)}, {"nodes", ta.size()}, {"depth", ta.depth()}};
  if (!o.b.empty()) {
    const auto tb = signal_to_tree(horizontal_sampling(normalize_unit(io::read_signal(o.b)), o.K));
    const TreeKernelParams tp{o.delta, o.lambda, o.normalize};
    const double k = tree_kernel(ta, tb, tp);
    j["kernel"] = k;
    out << "tree kernel " << io::format_double(k) << "\n";
  }
  j["meta"] = meta("kernel tree", o.seed);
  if (!o.output.empty()) write_out(o.output, dump(j));
}

void cmd_conv(const Options& o, std::ostream& out) {
  const ConvKernelParams cp{o.K, o.gamma};
  const auto a = io::read_signal(o.a);
  const auto b = io::read_signal(o.b);
  const double k = conv_kernel(a, b, cp);
  out << "conv kernel " << io::format_double(k) << "\n";
  if (!o.output.empty()) {
    write_out(o.output, dump({{"kernel", k}, {"K", o.K}, {"gamma", o.gamma}, {"np", cp.np()},
                              {"meta", meta("kernel conv", o.seed)}}));
  }
}

void cmd_do(const Options& o, std::ostream& out) {
  Eigen::MatrixXd D;
  if (!o.matrix.empty()) {
    D = io::parse_matrix_csv(io::read_file(o.matrix));
  } else if (!o.gram.empty()) {
    GramMatrix g;
    g.values = io::parse_matrix_csv(io::read_file(o.gram), &g.ids);
    D = induced_distance(g);
  } else {
    throw usage_error("eval distance-optimality needs --matrix or --gram");
  }
  const double v = distance_optimality(D, o.literal);
  out << io::format_double(v) << "\n";
  if (!o.output.empty()) {
    write_out(o.output, dump({{"do", v}, {"n", D.rows()}, {"literal", o.literal},
                              {"meta", meta("eval distance-optimality", o.seed)}}));
  }
}

void cmd_ra(const Options& o, std::ostream& out) {
  const auto pred = read_labels(o.pred);
  const auto truth = read_labels(o.truth);
  const auto r = recognition_accuracy(pred, truth);
  json j = {{"ra", r.ra},
            {"confusion", {{"L", {r.confusion[0][0], r.confusion[0][1]}}, {"N", {r.confusion[1][0], r.confusion[1][1]}}}},
            {"recall_linker", r.recall(0)},
            {"recall_nucleosome", r.recall(1)},
            {"meta", meta("eval ra", o.seed)}};
  if (!o.output.empty()) write_out(o.output, dump(j));
  out << "RA " << io::format_double(r.ra) << "\n";
}

void cmd_bench(const Options& o, std::ostream& out) {
  if (o.seeds < 1) throw std::invalid_argument("--seeds must be positive");
  using clock = std::chrono::steady_clock;
  std::string csv = "seed,nn,probes,t_mla,t_hmm,ratio,ra_mla,ra_hmm\n";
  const auto p = pipeline_params(o);
  for (int s = 0; s < o.seeds; ++s) {
    SynthConfig c = load_config(o);
    c.snr = o.snr;
    // 10 to 100 nucleosomes across the seeds
    c.nn = o.seeds == 1 ? 10 : 10 + (90 * s) / (o.seeds - 1);
    c.seed = derive_seed(o.seed, static_cast<std::uint64_t>(s));
    const auto sc = make_synth_case(c);

    const auto t0 = clock::now();
    const auto model = model_from_signals({sc.train_signal.values}, p);
    const auto res = run_pipeline(sc.signal.values, model, p, {sc.train_signal.values});
    const auto t1 = clock::now();
    const auto& obs = sc.signal.values.values();
    const auto tr = baum_welch(build_nucleosome_topology(init_stats_from(obs)), {obs}, o.max_iters, o.tol);
    const auto v = viterbi(tr.model, obs);
    const auto t2 = clock::now();

    const double tm = std::chrono::duration<double>(t1 - t0).count();
    const double th = std::chrono::duration<double>(t2 - t1).count();
    const double ra_m = recognition_accuracy(res.probe_labels, sc.mask.probes).ra;
    const double ra_h = recognition_accuracy(v.labels, sc.mask.probes).ra;
    csv += std::to_string(s) + "," + std::to_string(c.nn) + "," + std::to_string(obs.size()) + "," +
           io::format_double(tm) + "," + io::format_double(th) + "," + io::format_double(th / tm) + "," +
           io::format_double(ra_m) + "," + io::format_double(ra_h) + "\n";
  }
  if (o.output.empty()) {
    out << csv;
  } else {
    write_out(o.output, csv);
  }
}

unsigned threads_from_env() {
  const char* env = std::getenv("MLA_KIT_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw usage_error("MLA_KIT_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-threshold interval analysis of 1-D signals", "mlakit"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.fallthrough();
  Options o;
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: MLA_KIT_THREADS or 1)")->check(CLI::PositiveNumber);

  Action action;
  auto bind = [&](CLI::App* sub, Action a) { sub->callback([&action, a] { action = a; }); };
  auto input = [&](CLI::App* sub, const char* help = "input signal CSV") {
    sub->add_option("--input,-i", o.input, help)->required()->check(CLI::ExistingFile);
  };
  auto output = [&](CLI::App* sub, bool required = true) {
    auto opt = sub->add_option("--out,-o", o.output, "output file");
    if (required) opt->required();
  };
  auto seed = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "random seed"); };
  auto pipeline = [&](CLI::App* sub) {
    sub->add_option("--k", o.K, "threshold count")->check(CLI::Range(2, 100000));
    sub->add_option("--m", o.m, "minimum pattern size")->check(CLI::NonNegativeNumber);
    sub->add_option("--alpha", o.alpha, "area/shape weight")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--os", o.os, "model radius in probes")->check(CLI::PositiveNumber);
    sub->add_flag("--no-smooth", o.no_smooth, "skip the [1/4,1/2,1/4] smoothing");
    sub->add_option("--classifier", o.classifier, "rule|ocknn")->check(CLI::IsMember({"rule", "ocknn"}));
    sub->add_option("--profile", o.profile, "peak|widest")->check(CLI::IsMember({"peak", "widest"}));
    sub->add_option("--phi1", o.phi1, "lower threshold override");
    sub->add_option("--phi2", o.phi2, "upper threshold override");
  };

  auto* mla = app.add_subcommand("mla", "interval representation");
  mla->require_subcommand(1);
  {
    auto* s = mla->add_subcommand("transform", "signal -> interval representation JSON");
    input(s);
    output(s);
    seed(s);
    s->add_option("--k", o.K, "threshold count")->check(CLI::Range(2, 100000));
    bind(s, cmd_transform);

    s = mla->add_subcommand("reconstruct", "interval representation JSON -> signal CSV");
    input(s, "representation JSON");
    output(s);
    s->add_option("--mode", o.mode, "interpolated|level_set")->check(CLI::IsMember({"interpolated", "level_set"}));
    bind(s, cmd_reconstruct);

    s = mla->add_subcommand("calibrate-k", "rho/MS table over K for fragments (one per row)");
    input(s, "fragments CSV, one signal per row");
    output(s);
    seed(s);
    s->add_option("--k-max", o.k_max, "largest K")->check(CLI::Range(2, 100000));
    s->add_option("--mode", o.mode, "interpolated|level_set")->check(CLI::IsMember({"interpolated", "level_set"}));
    s->add_option("--report", o.report, "summary JSON");
    bind(s, cmd_calibrate_k);
  }

  auto* nuc = app.add_subcommand("nuc", "nucleosome pipeline");
  nuc->require_subcommand(1);
  {
    auto* s = nuc->add_subcommand("discover", "patterns with more than m intervals");
    input(s);
    output(s);
    seed(s);
    pipeline(s);
    bind(s, cmd_discover);

    s = nuc->add_subcommand("classify", "label regions W/D/F");
    input(s);
    output(s);
    seed(s);
    pipeline(s);
    s->add_option("--model", o.model, "model JSON")->check(CLI::ExistingFile);
    s->add_option("--train", o.train, "training signals CSV, one per row")->check(CLI::ExistingFile);
    s->add_option("--labels", o.labels_out, "per-probe 0/1 labels CSV");
    s->add_option("--report", o.report, "summary JSON");
    bind(s, cmd_classify);

    s = nuc->add_subcommand("calibrate-m", "best m per (SNR, K) on synthetic data");
    output(s);
    seed(s);
    pipeline(s);
    s->add_option("--config", o.config, "generator config JSON")->check(CLI::ExistingFile);
    s->add_option("--snr", o.snr_list, "comma-separated SNR values");
    s->add_option("--ks", o.k_list, "comma-separated K values");
    s->add_option("--replicates", o.replicates, "runs per (SNR, K)");
    s->add_option("--report", o.report, "per-m RA JSON");
    bind(s, cmd_calibrate_m);
  }

  {
    auto* synth = app.add_subcommand("synth", "synthetic nucleosome data");
    synth->require_subcommand(1);
    auto* s = synth->add_subcommand("gen", "write signal.csv, mask.csv and meta.json");
    s->add_option("--config", o.config, "generator config JSON")->check(CLI::ExistingFile);
    seed(s);
    s->add_option("--out-dir", o.dir, "output directory")->default_val(".");
    bind(s, cmd_synth);
  }

  {
    auto* hmm = app.add_subcommand("hmm", "HMM baseline");
    hmm->require_subcommand(1);
    auto* s = hmm->add_subcommand("train", "Baum-Welch on the 18-state topology");
    input(s, "observation CSV, one sequence per row");
    output(s);
    seed(s);
    s->add_option("--max-iters", o.max_iters)->check(CLI::NonNegativeNumber);
    s->add_option("--tol", o.tol)->check(CLI::NonNegativeNumber);
    bind(s, cmd_hmm_train);

    s = hmm->add_subcommand("decode", "Viterbi labels");
    input(s);
    output(s);
    s->add_option("--model", o.model, "HMM JSON")->required()->check(CLI::ExistingFile);
    bind(s, cmd_hmm_decode);
  }

  {
    auto* rt = app.add_subcommand("randtest", "randomness test");
    rt->require_subcommand(1);
    auto* s = rt->add_subcommand("run", "per-level SKL test against a Gaussian null");
    input(s, "signal CSV, one fragment per row");
    output(s);
    seed(s);
    s->add_option("--N", o.N, "null replicates")->check(CLI::Range(2, 1000000));
    s->add_option("--l", o.l, "null replicate length")->check(CLI::Range(2, 100000000));
    s->add_option("--k", o.K, "threshold count")->check(CLI::Range(2, 100000));
    s->add_option("--nb", o.nb, "histogram bins")->check(CLI::PositiveNumber);
    s->add_option("--confidence", o.confidence, "alpha")->check(CLI::Range(0.0, 1.0));
    s->add_flag("--full-range", o.full_range, "bin every level over [0, l]");
    s->add_option("--cdf-out", o.distance_out, "null CDF series CSV");
    bind(s, cmd_randtest);
  }

  {
    auto* kn = app.add_subcommand("kernel", "kernels on interval representations");
    kn->require_subcommand(1);
    auto* s = kn->add_subcommand("gram", "Gram matrix of signals (one per row)");
    input(s, "signals CSV, one per row");
    output(s);
    seed(s);
    s->add_option("--kernel", o.kernel, "tree|conv|linear|rbf|poly")
        ->check(CLI::IsMember({"tree", "conv", "linear", "rbf", "poly"}));
    s->add_option("--k", o.K, "threshold count")->check(CLI::Range(2, 100000));
    s->add_option("--delta", o.delta)->check(CLI::NonNegativeNumber);
    s->add_option("--lambda", o.lambda);
    s->add_flag("--normalize", o.normalize);
    s->add_option("--gamma", o.gamma);
    s->add_option("--degree", o.degree)->check(CLI::PositiveNumber);
    s->add_option("--coef0", o.coef0);
    s->add_option("--distance-out", o.distance_out, "induced distance CSV");
    s->add_option("--report", o.report, "PSD diagnostic JSON");
    bind(s, cmd_gram);

    s = kn->add_subcommand("tree", "interval tree of a signal, kernel against --b");
    s->add_option("--a,--input,-i", o.a, "signal CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--b", o.b, "second signal CSV")->check(CLI::ExistingFile);
    output(s, false);
    seed(s);
    s->add_option("--k", o.K, "threshold count")->check(CLI::Range(2, 100000));
    s->add_option("--delta", o.delta)->check(CLI::NonNegativeNumber);
    s->add_option("--lambda", o.lambda);
    s->add_flag("--normalize", o.normalize);
    bind(s, cmd_tree);

    s = kn->add_subcommand("conv", "convolution kernel of two signals");
    s->add_option("--a", o.a, "signal CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--b", o.b, "signal CSV")->required()->check(CLI::ExistingFile);
    output(s, false);
    seed(s);
    s->add_option("--k", o.K, "threshold count")->check(CLI::Range(2, 100000));
    s->add_option("--gamma", o.gamma);
    bind(s, cmd_conv);
  }

  {
    auto* ev = app.add_subcommand("eval", "metrics");
    ev->require_subcommand(1);
    auto* s = ev->add_subcommand("distance-optimality", "do of a distance (or Gram) matrix");
    s->add_option("--matrix", o.matrix, "distance matrix CSV")->check(CLI::ExistingFile);
    s->add_option("--gram", o.gram, "Gram matrix CSV")->check(CLI::ExistingFile);
    s->add_flag("--literal", o.literal, "unaveraged |i-j-1| form");
    output(s, false);
    seed(s);
    bind(s, cmd_do);

    s = ev->add_subcommand("ra", "recognition accuracy of 0/1 probe labels");
    s->add_option("--pred", o.pred, "predicted labels CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--truth", o.truth, "true labels CSV")->required()->check(CLI::ExistingFile);
    output(s, false);
    seed(s);
    bind(s, cmd_ra);
  }

  {
    auto* bench = app.add_subcommand("bench", "timings");
    bench->require_subcommand(1);
    auto* s = bench->add_subcommand("mla-vs-hmm", "per-seed T_m, T_h and their ratio");
    s->add_option("--seeds", o.seeds, "number of signals (10 to 100 nucleosomes)");
    s->add_option("--snr", o.snr);
    s->add_option("--config", o.config, "generator config JSON")->check(CLI::ExistingFile);
    s->add_option("--max-iters", o.max_iters)->check(CLI::NonNegativeNumber);
    s->add_option("--tol", o.tol)->check(CLI::NonNegativeNumber);
    pipeline(s);
    output(s, false);
    seed(s);
    bind(s, cmd_bench);
  }

  std::vector<std::string> argv_store{"mlakit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const unsigned saved = thread_count();
  try {
    set_thread_count(threads ? threads : threads_from_env());
    action(o, out);
  } catch (const usage_error& e) {
    set_thread_count(saved);
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  } catch (const std::invalid_argument& e) {
    set_thread_count(saved);
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    set_thread_count(saved);
    err << "error: bad JSON: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    set_thread_count(saved);
    err << "error: " << e.what() << "\n";
    return 2;
  }
  set_thread_count(saved);
  return 0;
}

}  // namespace mla::cli
