#include "expint/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/info_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "expint/errors.hpp"

namespace expint {
namespace {

using boost::property_tree::ptree;

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& text, const std::string& where) {
  long long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(where + ": expected an integer, got '" + text + "'");
  }
  return value;
}

std::string format_double(double v) { return fmt::format("{}", v); }

// Typed access to one block that remembers which keys were read, so leftovers
// can be reported as unknown.
class Block {
 public:
  Block(const ptree& node, std::string path) : node_(node), path_(std::move(path)) {
    std::set<std::string> seen;
    for (const auto& [key, child] : node_) {
      if (!seen.insert(key).second) throw ConfigError(where(key) + ": duplicate key");
    }
  }

  bool has(const std::string& key) const { return node_.find(key) != node_.not_found(); }

  std::string text(const std::string& key) {
    used_.insert(key);
    const auto it = node_.find(key);
    if (it == node_.not_found()) throw ConfigError(where(key) + ": required key missing");
    if (!it->second.empty()) throw ConfigError(where(key) + ": expected a value, found a block");
    return it->second.data();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : (used_.insert(key), fallback);
  }

  double number(const std::string& key) { return parse_double(text(key), where(key)); }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (used_.insert(key), fallback);
  }

  long long integer(const std::string& key) { return parse_integer(text(key), where(key)); }
  long long integer(const std::string& key, long long fallback) {
    return has(key) ? integer(key) : (used_.insert(key), fallback);
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    for (const auto& w : split_words(text(key))) out.push_back(parse_double(w, where(key)));
    return out;
  }

  std::optional<Block> child(const std::string& key) {
    used_.insert(key);
    const auto it = node_.find(key);
    if (it == node_.not_found()) return std::nullopt;
    if (!it->second.data().empty() && it->second.empty()) {
      throw ConfigError(where(key) + ": expected a block");
    }
    return Block(it->second, where(key));
  }

  Block required_child(const std::string& key) {
    auto c = child(key);
    if (!c) throw ConfigError(where(key) + ": required block missing");
    return *c;
  }

  /// Reject keys that were never read.
  void finish() const {
    for (const auto& [key, child] : node_) {
      if (used_.count(key) == 0) throw ConfigError(where(key) + ": unknown key");
    }
  }

  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const ptree& node_;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

InitialDataSpec parse_initial(Block b) {
  InitialDataSpec spec;
  spec.kind = parse_initial_kind(b.text("kind"));
  if (spec.kind == InitialKind::fourier_decay) {
    spec.gamma = b.number("gamma");
    require(spec.gamma >= 0.0 && spec.gamma <= 1.0, b.where("gamma") + ": must lie in [0, 1]");
    const long long seed = b.integer("seed", 1);
    require(seed >= 0, b.where("seed") + ": must be nonnegative");
    spec.seed = static_cast<std::uint64_t>(seed);
  }
  b.finish();
  return spec;
}

ProblemConfig parse_problem(Block b) {
  ProblemConfig p;
  p.name = b.text("name");
  require(p.name == "linear_forced" || p.name == "heat" || p.name == "allen_cahn" ||
              p.name == "burgers",
          b.where("name") + ": unknown problem '" + p.name + "'");
  p.dims = static_cast<int>(b.integer("dims", 2));
  require(p.dims == 1 || p.dims == 2, b.where("dims") + ": must be 1 or 2");
  p.N = static_cast<int>(b.integer("N"));
  const int n_max = p.dims == 1 ? 4096 : 512;
  require(p.N >= 2 && p.N <= n_max, b.where("N") + fmt::format(": must lie in [2, {}]", n_max));
  if (p.name == "allen_cahn") {
    p.epsilon = b.number("epsilon", 0.1);
    require(p.epsilon > 0.0, b.where("epsilon") + ": must be positive");
  } else {
    p.nu = b.number("nu", 0.05);
    require(p.nu > 0.0, b.where("nu") + ": must be positive");
  }
  require(p.name != "burgers" || p.dims == 2, b.where("dims") + ": burgers needs a 2D grid");
  p.u0 = parse_initial(b.required_child("u0"));
  if (p.name == "linear_forced") {
    if (auto f = b.child("forcing")) {
      p.g0 = f->number("g0", 0.0);
      p.g1 = f->number("g1", 0.0);
      f->finish();
    }
  }
  b.finish();
  return p;
}

SchemeSpec parse_scheme_block(Block b) {
  SchemeSpec s;
  s.kind = parse_scheme(b.text("name"));
  s.c2 = b.number("c2", 0.5);
  require(s.c2 > 0.0 && s.c2 <= 1.0, b.where("c2") + ": must lie in (0, 1]");
  b.finish();
  return s;
}

std::vector<double> parse_steps(Block& b, const std::string& list_key, const std::string& max_key,
                                double T) {
  std::vector<double> steps;
  if (b.has(list_key)) {
    require(!b.has(max_key) && !b.has("levels"),
            b.where(list_key) + ": give either a list or " + max_key + "/levels, not both");
    steps = b.numbers(list_key);
  } else {
    const double first = b.number(max_key, T / 4.0);
    const long long levels = b.integer("levels", 7);
    require(levels >= 1 && levels <= 30, b.where("levels") + ": must lie in [1, 30]");
    for (long long i = 0; i < levels; ++i) steps.push_back(std::ldexp(first, -static_cast<int>(i)));
  }
  require(!steps.empty(), b.where(list_key) + ": empty list");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    require(steps[i] > 0.0, b.where(list_key) + ": values must be positive");
    require(i == 0 || steps[i] < steps[i - 1], b.where(list_key) + ": values must be strictly decreasing");
  }
  return steps;
}

StudyConfig parse_study(Block b, const ProblemConfig& problem) {
  StudyConfig s;
  s.T = b.number("T", 0.1);
  require(s.T > 0.0, b.where("T") + ": must be positive");
  s.taus = parse_steps(b, "taus", "tau_max", s.T);
  for (double tau : s.taus) step_count(s.T, tau);

  auto holder_block = b.child("holder");
  for (const auto& name : split_words(b.text("norms", "max c1"))) {
    if (name == "max") {
      s.norms.push_back(NormKind::max_norm());
    } else if (name == "c1") {
      s.norms.push_back(NormKind::c1_discrete());
    } else if (name == "holder") {
      double exponent = 1.0;
      long long samples = 2000;
      long long seed = 1;
      if (holder_block) {
        exponent = holder_block->number("exponent", exponent);
        samples = holder_block->integer("samples", samples);
        seed = holder_block->integer("seed", seed);
      }
      require(seed >= 0, b.where("holder.seed") + ": must be nonnegative");
      s.norms.push_back(NormKind::holder(exponent, static_cast<int>(samples),
                                         static_cast<std::uint64_t>(seed)));
    } else {
      throw ConfigError(b.where("norms") + ": unknown norm '" + name + "'");
    }
  }
  require(!s.norms.empty(), b.where("norms") + ": at least one norm is required");
  if (holder_block) holder_block->finish();

  if (auto r = b.child("reference")) {
    const std::string kind = r->text("kind", "fine_step");
    if (kind == "exact") {
      s.reference.kind = ReferenceSpec::Kind::exact;
      require(problem.name == "linear_forced" || problem.name == "heat",
              r->where("kind") + ": problem '" + problem.name + "' has no exact solution");
    } else if (kind == "fine_step") {
      s.reference.kind = ReferenceSpec::Kind::fine_step;
      if (r->has("scheme")) s.reference.scheme = parse_scheme(r->text("scheme"));
      s.reference.refinement = static_cast<int>(r->integer("refinement", 32));
      require(s.reference.refinement >= 16, r->where("refinement") + ": must be at least 16");
    } else {
      throw ConfigError(r->where("kind") + ": must be exact or fine_step");
    }
    r->finish();
  }
  b.finish();
  return s;
}

SolveConfig parse_solve(Block b) {
  SolveConfig s;
  s.T = b.number("T");
  s.tau = b.number("tau");
  require(s.T > 0.0, b.where("T") + ": must be positive");
  require(s.tau > 0.0, b.where("tau") + ": must be positive");
  step_count(s.T, s.tau);
  s.snapshots = static_cast<int>(b.integer("snapshots", 0));
  require(s.snapshots >= 0, b.where("snapshots") + ": must be nonnegative");
  b.finish();
  return s;
}

DefectConfig parse_defect(Block b) {
  DefectConfig d;
  d.N = static_cast<int>(b.integer("N"));
  require(d.N >= 2 && d.N <= 512, b.where("N") + ": must lie in [2, 512]");
  d.nu = b.number("nu", 1.0);
  require(d.nu > 0.0, b.where("nu") + ": must be positive");
  d.k = static_cast<int>(b.integer("k", 1));
  require(d.k == 1 || d.k == 2, b.where("k") + ": must be 1 or 2");
  d.ts = parse_steps(b, "t", "t_max", 2.0);
  for (double t : d.ts) require(t <= 1.0, b.where("t") + ": values must lie in (0, 1]");
  d.v = parse_initial(b.required_child("v"));
  const double default_beta = d.v.kind == InitialKind::fourier_decay ? 2.0 * d.v.gamma : 1.0;
  d.beta1 = b.number("beta1", default_beta);
  require(d.beta1 >= 0.0, b.where("beta1") + ": must be nonnegative");
  b.finish();
  return d;
}

OutputConfig parse_output(std::optional<Block> b) {
  OutputConfig o;
  if (!b) return o;
  o.directory = b->text("directory", "");
  if (b->has("formats")) {
    o.formats = split_words(b->text("formats"));
    for (const auto& f : o.formats) {
      require(f == "csv", b->where("formats") + ": unsupported format '" + f + "'");
    }
  }
  b->finish();
  return o;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

std::string join_numbers(const std::vector<double>& values) {
  std::vector<std::string> words;
  for (double v : values) words.push_back(format_double(v));
  return join(words);
}

ptree echo_initial(const InitialDataSpec& spec) {
  ptree t;
  t.put("kind", to_string(spec.kind));
  if (spec.kind == InitialKind::fourier_decay) {
    t.put("gamma", format_double(spec.gamma));
    t.put("seed", std::to_string(spec.seed));
  }
  return t;
}

ptree echo_problem(const ProblemConfig& p) {
  ptree t;
  t.put("name", p.name);
  t.put("dims", std::to_string(p.dims));
  t.put("N", std::to_string(p.N));
  if (p.name == "allen_cahn") {
    t.put("epsilon", format_double(p.epsilon));
  } else {
    t.put("nu", format_double(p.nu));
  }
  t.add_child("u0", echo_initial(p.u0));
  if (p.name == "linear_forced") {
    ptree f;
    f.put("g0", format_double(p.g0));
    f.put("g1", format_double(p.g1));
    t.add_child("forcing", f);
  }
  return t;
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::converge: return "converge";
    case Command::defect: return "defect";
    case Command::solve: return "solve";
  }
  return "unknown";
}

double ProblemConfig::diffusivity() const { return name == "allen_cahn" ? epsilon * epsilon : nu; }

ExperimentConfig parse_config(const std::string& text, Command command) {
  ptree root;
  try {
    std::istringstream in(text);
    boost::property_tree::read_info(in, root);
  } catch (const boost::property_tree::info_parser_error& e) {
    throw ConfigError(fmt::format("config syntax error at line {}: {}", e.line(), e.message()));
  }

  Block top(root, "");
  ExperimentConfig config;
  config.command = command;
  config.schema_version = static_cast<int>(top.integer("schema_version"));
  require(config.schema_version == kSchemaVersion,
          fmt::format("schema_version: unsupported version {}, expected {}",
                      config.schema_version, kSchemaVersion));

  if (command == Command::defect) {
    config.defect = parse_defect(top.required_child("defect"));
  } else {
    config.problem = parse_problem(top.required_child("problem"));
    config.scheme = parse_scheme_block(top.required_child("scheme"));
    require(!is_split(config.scheme.kind) || config.problem.dims == 2,
            "scheme.name: split schemes need a 2D problem");
    if (command == Command::converge) {
      config.study = parse_study(top.required_child("study"), config.problem);
    } else {
      config.solve = parse_solve(top.required_child("solve"));
    }
  }
  config.output = parse_output(top.child("output"));
  top.finish();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, Command command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading config file '" + path.string() + "'");
  return parse_config(buffer.str(), command);
}

std::string echo_config(const ExperimentConfig& config) {
  ptree root;
  root.put("schema_version", std::to_string(config.schema_version));
  if (config.command == Command::defect) {
    const auto& d = config.defect;
    ptree t;
    t.put("N", std::to_string(d.N));
    t.put("nu", format_double(d.nu));
    t.put("k", std::to_string(d.k));
    t.put("t", join_numbers(d.ts));
    t.add_child("v", echo_initial(d.v));
    t.put("beta1", format_double(d.beta1));
    root.add_child("defect", t);
  } else {
    root.add_child("problem", echo_problem(config.problem));
    ptree scheme;
    scheme.put("name", to_string(config.scheme.kind));
    scheme.put("c2", format_double(config.scheme.c2));
    root.add_child("scheme", scheme);
    if (config.command == Command::converge) {
      const auto& s = config.study;
      ptree t;
      t.put("T", format_double(s.T));
      t.put("taus", join_numbers(s.taus));
      std::vector<std::string> names;
      for (const auto& n : s.norms) {
        names.push_back(n.type == NormType::max ? "max" : n.type == NormType::c1_discrete ? "c1" : "holder");
        if (n.type == NormType::holder) {
          ptree h;
          h.put("exponent", format_double(n.exponent));
          h.put("samples", std::to_string(n.samples));
          h.put("seed", std::to_string(n.seed));
          t.put_child("holder", h);
        }
      }
      t.put("norms", join(names));
      ptree r;
      if (s.reference.kind == ReferenceSpec::Kind::exact) {
        r.put("kind", "exact");
      } else {
        r.put("kind", "fine_step");
        if (s.reference.scheme) r.put("scheme", to_string(*s.reference.scheme));
        r.put("refinement", std::to_string(s.reference.refinement));
      }
      t.add_child("reference", r);
      root.add_child("study", t);
    } else {
      ptree t;
      t.put("T", format_double(config.solve.T));
      t.put("tau", format_double(config.solve.tau));
      t.put("snapshots", std::to_string(config.solve.snapshots));
      root.add_child("solve", t);
    }
  }
  ptree out;
  if (!config.output.directory.empty()) out.put("directory", config.output.directory);
  out.put("formats", join(config.output.formats));
  root.add_child("output", out);

  std::ostringstream text;
  boost::property_tree::write_info(text, root);
  return text.str();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : echo_config(config)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

Problem build_problem(const ProblemConfig& config) {
  const double diffusivity = config.diffusivity();
  if (config.dims == 1) {
    const SpectralOperator op = laplacian_1d_dirichlet(config.N, diffusivity);
    if (config.name == "allen_cahn") return allen_cahn(op, config.u0);
    const State u0 = make_initial_data(config.u0, op.grid());
    if (config.name == "heat") return heat_problem(op, u0);
    if (config.name == "linear_forced") {
      const auto n = static_cast<Eigen::Index>(op.size());
      return linear_forced_problem(op, {State::Constant(n, config.g0), State::Constant(n, config.g1)}, u0);
    }
    throw ConfigError("problem '" + config.name + "' needs a 2D grid");
  }
  const SplitOperator op = split_laplacian_2d(config.N, diffusivity);
  if (config.name == "allen_cahn") return allen_cahn(op, config.u0);
  if (config.name == "burgers") return burgers(op, config.u0);
  const State u0 = make_initial_data(config.u0, op.full.grid());
  if (config.name == "heat") return heat_problem(op, u0);
  if (config.name == "linear_forced") {
    const auto n = static_cast<Eigen::Index>(op.full.size());
    Problem p = linear_forced_problem(op.full, {State::Constant(n, config.g0), State::Constant(n, config.g1)}, u0);
    p.split = op;
    return p;
  }
  throw ConfigError("unknown problem '" + config.name + "'");
}

}  // namespace expint
