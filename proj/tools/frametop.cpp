// frametop: command-line access to targets, frames, certificates, fibers,
// strata and polygons. Exit codes: 0 success, 1 domain failure, 2 usage/I/O.

#include "frametop/certificates.hpp"
#include "frametop/fiber.hpp"
#include "frametop/json_io.hpp"
#include "frametop/polygon.hpp"
#include "frametop/strata.hpp"

#include <CLI11/CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace frametop;

// Usage and I/O problems, reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string d;
  int k = -1;
  int n = -1;
  std::uint64_t seed = 1;
  double tol = tol::path;
  std::string format;  // empty: the command's natural format
  std::string out;
  std::string input;
  std::vector<int> equal_norm;
  int samples = 64;
  int max_blocks = 0;
  int max_nodes = 800;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
}

// Output goes to a temporary file first so a partial write never replaces --out.
void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  const std::string tmp = opt.out + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw UsageError("cannot write '" + opt.out + "'");
    os << text;
    if (!os) throw UsageError("write to '" + opt.out + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, opt.out, ec);
  if (ec) throw UsageError("cannot move output into '" + opt.out + "': " + ec.message());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

DiagonalTarget target_from_options(const Options& opt) {
  if (!opt.input.empty()) {
    try {
      return target_from_json(read_json_file(opt.input));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (opt.d.empty() || opt.k < 0) throw UsageError("need --d and --k (or an input file)");
  try {
    return DiagonalTarget(parse_vector(opt.d), opt.k);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

int cmd_check(const Options& opt) {
  const DiagonalTarget t = target_from_options(opt);
  if (t.k < 1 || t.n() < 1) throw UsageError("need n >= 1 and k >= 1");
  json j{{"target", to_json(t)}};
  const bool member = in_hypersimplex(t);
  j["hypersimplex"] = member;
  if (member) {
    j["smallest_complement_sum"] = smallest_complement_sum(t);
    j["hypothesis"] = satisfies_hypothesis(t);
    const AdmissibilityVerdict v = classify_admissibility(t);
    j["verdict"] = std::string(to_string(v.status));
    j["rule"] = v.rule;
    j["witness"] = to_json(v)["witness"];
    if (t.k == 2) j["km_criterion"] = frame_km_criterion(t);
  } else {
    j["hypothesis"] = nullptr;
    j["verdict"] = nullptr;
  }
  emit(opt, dump(j));
  return 0;
}

int cmd_build(const Options& opt) {
  const BuildResult r = build_ntf_counted(target_from_options(opt));
  json j = to_json(r.frame);
  j["rotations"] = r.rotations;
  j["stiefel_residual"] = r.frame.stiefel_residual();
  emit(opt, dump(j));
  return 0;
}

int cmd_certify(const Options& opt) {
  SearchBudget budget;
  budget.seed = opt.seed;
  budget.max_nodes = opt.max_nodes;
  ConnectivityCertificate cert;
  if (!opt.equal_norm.empty()) {
    if (opt.equal_norm.size() != 2) throw UsageError("--equal-norm takes N K");
    cert = certify_equal_norm(opt.equal_norm[0], opt.equal_norm[1], budget);
  } else {
    cert = certify_target(target_from_options(opt), budget);
  }
  cert.report = verify_certificate(cert, opt.tol, tol::step_max);
  emit(opt, dump(to_json(cert)));
  if (!cert.report.passed) {
    std::cerr << "certificate failed verification: " << cert.report.failure << "\n";
    return 1;
  }
  return 0;
}

int cmd_verify(const Options& opt) {
  if (opt.input.empty()) throw UsageError("verify needs a certificate file");
  ConnectivityCertificate cert;
  try {
    cert = certificate_from_json(read_json_file(opt.input));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const VerificationReport rep = verify_certificate(cert, opt.tol, tol::step_max);
  emit(opt, dump(to_json(rep)));
  return rep.passed ? 0 : 1;
}

int cmd_fiber(const Options& opt) {
  const DiagonalTarget t = target_from_options(opt);
  json j = to_json(count_components(t, opt.samples, 0.05, 6, opt.seed));
  if (auto exact = exact_fiber_special(t)) {
    json pts = json::array();
    for (const auto& p : *exact) pts.push_back(to_json(p));
    j["exact"] = pts;
  }
  emit(opt, dump(j));
  return 0;
}

std::string join_ints(const std::vector<int>& v, const char* sep, int offset = 0) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i] + offset);
  return s;
}

int cmd_strata(const Options& opt) {
  const DiagonalTarget t = target_from_options(opt);
  const int max_blocks = opt.max_blocks > 0 ? opt.max_blocks : t.n();
  const auto cands = enumerate_strata(t, max_blocks);
  if (opt.format == "json") {
    json arr = json::array();
    for (const auto& c : cands) {
      arr.push_back({{"sigma", c.sigma},
                     {"m", c.m},
                     {"c", c.c},
                     {"b", c.b},
                     {"feasible", c.feasible},
                     {"level_codims", c.level_codims},
                     {"codim_one", c.feasible && c.witness_r.has_value()}});
    }
    emit(opt, dump(arr));
    return 0;
  }
  std::ostringstream os;
  os << "blocks,m,c,b,feasible,level_codims,codim_one\n";
  for (const auto& c : cands) {
    // Blocks list 1-based indices with their d values, separated by '|'.
    std::string blocks;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < c.m.size(); ++i) {
      if (i) blocks += '|';
      for (int j = 0; j < c.m[i]; ++j, ++pos) {
        if (j) blocks += ' ';
        blocks += std::to_string(c.sigma[pos] + 1) + ':' + fmt(t[c.sigma[pos]]);
      }
    }
    std::string b;
    for (std::size_t i = 0; i < c.b.size(); ++i) b += (i ? " " : "") + fmt(c.b[i]);
    os << blocks << ',' << join_ints(c.m, " ") << ',' << join_ints(c.c, " ") << ',' << b << ','
       << (c.feasible ? "true" : "false") << ',' << join_ints(c.level_codims, " ") << ','
       << ((c.feasible && c.witness_r) ? "true" : "false") << '\n';
  }
  emit(opt, os.str());
  return 0;
}

int cmd_polygon(const Options& opt) {
  Frame f;
  if (!opt.input.empty()) {
    try {
      f = frame_from_json(read_json_file(opt.input));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  } else {
    f = build_ntf(target_from_options(opt));
  }
  const Polygon poly = frame_to_polygon(f);
  json j = to_json(poly);
  j["closure_residual"] = poly.closure_residual();
  j["km_disconnected"] = km_disconnected(poly.r);
  emit(opt, dump(j));
  return 0;
}

int cmd_reduce(const Options& opt) {
  if (opt.n < 0 || opt.k < 0) throw UsageError("reduce needs --n and --k");
  const auto seq = reduction_sequence(opt.n, opt.k);
  if (opt.format == "json") {
    json arr = json::array();
    for (const auto& [n, k] : seq) arr.push_back({n, k});
    emit(opt, dump(arr));
    return 0;
  }
  std::string s;
  for (std::size_t i = 0; i < seq.size(); ++i)
    s += (i ? " (" : "(") + std::to_string(seq[i].first) + "," + std::to_string(seq[i].second) + ")";
  emit(opt, s + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frames with prescribed norms: admissibility checks, constructions and path certificates"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--d", opt.d, "target vector, comma separated decimals or fractions a/b");
  app.add_option("--k", opt.k, "rank");
  app.add_option("--n", opt.n, "number of vectors");
  app.add_option("--seed", opt.seed, "random seed");
  app.add_option("--tol", opt.tol, "verification tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", opt.format, "output format")->check(CLI::IsMember({"json", "csv", "text"}));  // strata: csv, reduce: text, others: json
  app.add_option("--out", opt.out, "output file (default stdout)");

  auto* check = app.add_subcommand("check", "hypersimplex membership, hypothesis and admissibility verdict");
  check->add_option("input", opt.input, "target JSON file {\"n\", \"k\", \"d\"}");
  auto* build = app.add_subcommand("build", "construct a frame with the given column norms");
  build->add_option("input", opt.input, "target JSON file");
  auto* certify = app.add_subcommand("certify", "emit a connectivity certificate");
  certify->add_option("input", opt.input, "target JSON file");
  certify->add_option("--equal-norm", opt.equal_norm, "equal-norm pair N K")->expected(2);
  certify->add_option("--max-nodes", opt.max_nodes, "roadmap size for the rank-two numerical search");
  auto* verify = app.add_subcommand("verify", "re-verify a certificate file");
  verify->add_option("input", opt.input, "certificate JSON file")->required();
  auto* fiber = app.add_subcommand("fiber", "sample the fiber and estimate its components");
  fiber->add_option("input", opt.input, "target JSON file");
  fiber->add_option("--samples", opt.samples, "number of seeded descents")->check(CLI::PositiveNumber);
  auto* strata = app.add_subcommand("strata", "enumerate critical-stratum candidates (CSV)");
  strata->add_option("input", opt.input, "target JSON file");
  strata->add_option("--max-blocks", opt.max_blocks, "largest number of blocks");
  auto* polygon = app.add_subcommand("polygon", "planar polygon of a rank-two frame");
  polygon->add_option("input", opt.input, "frame JSON file (default: build from --d)");
  auto* reduce = app.add_subcommand("reduce", "equal-norm reduction sequence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check) return cmd_check(opt);
    if (*build) return cmd_build(opt);
    if (*certify) return cmd_certify(opt);
    if (*verify) return cmd_verify(opt);
    if (*fiber) return cmd_fiber(opt);
    if (*strata) return cmd_strata(opt);
    if (*polygon) return cmd_polygon(opt);
    if (*reduce) return cmd_reduce(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ParseError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
