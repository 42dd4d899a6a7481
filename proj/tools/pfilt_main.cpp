#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "pfilt/filter.hpp"
#include "pfilt/liering.hpp"
#include "pfilt/pcgroup.hpp"
#include "pfilt/refine.hpp"

namespace {

using namespace pfilt;
namespace fs = std::filesystem;

struct GroupSpec {
  PcGroupPtr group;
  std::string name;
};

std::vector<unsigned> parse_uint_list(const std::string& s) {
  std::vector<unsigned> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<unsigned>(std::stoul(item)));
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

GroupSpec load_group(const std::string& spec) {
  auto colon = spec.find(':');
  std::string kind = (colon == std::string::npos) ? "" : spec.substr(0, colon);
  if (colon == std::string::npos || kind == "file") {
    std::string path = (colon == std::string::npos) ? spec : spec.substr(colon + 1);
    return {parse_presentation(slurp(path), true), fs::path(path).stem().string()};
  }
  auto args = parse_uint_list(spec.substr(colon + 1));
  auto tag = [&](const char* base) {
    std::string n = base;
    for (unsigned a : args) n += "_" + std::to_string(a);
    return n;
  };
  if (kind == "ut" && args.size() == 2) return {ut_group(args[0], args[1]), tag("ut")};
  if (kind == "sylow-sym" && args.size() == 2)
    return {sylow_symmetric(args[0], args[1]), tag("sylow_sym")};
  if (kind == "sylow-sn" && args.size() == 2)
    return {sylow_symmetric_sym(args[0], args[1]), tag("sylow_sn")};
  if (kind == "elgo" && args.size() == 1) return {elgo_group(args[0]), tag("elgo")};
  throw std::runtime_error(
      "unknown group spec '" + spec +
      "' (expected ut:N,P | sylow-sym:P,K | sylow-sn:P,N | elgo:P | a presentation file)");
}

Filter build_series(const PcGroupPtr& g, const std::string& series) {
  if (series == "lcs") return lower_central_series(g);
  if (series == "epcs") return exponent_p_central_series(g);
  throw std::runtime_error("unknown series '" + series + "' (expected lcs or epcs)");
}

std::string word_str(const PcPresentation& g, const Element& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!e[i]) continue;
    if (!s.empty()) s += ' ';
    s += "g" + std::to_string(i + 1);
    if (e[i] != 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

std::string gens_str(const Subgroup& s, std::size_t width) {
  std::string out;
  for (const Element& m : s.igs()) {
    if (!out.empty()) out += ", ";
    out += word_str(*s.group(), m);
    if (out.size() > width) return out.substr(0, width) + "...";
  }
  return out.empty() ? "1" : out;
}

void print_table(std::ostream& os, const Filter& f,
                 const std::map<std::string, std::string>& origin) {
  os << "Maximal Index  Origin of Subgroup  Order   Generators\n";
  for (const auto& ent : f.entries) {
    auto it = origin.find(ent.subgroup.key());
    std::string org = (it != origin.end()) ? it->second : "generated";
    std::string order = std::to_string(f.group->p()) + "^" + std::to_string(ent.subgroup.length());
    std::string idx = ent.index.str();
    os << idx << std::string(idx.size() < 15 ? 15 - idx.size() : 1, ' ') << org
       << std::string(org.size() < 20 ? 20 - org.size() : 1, ' ') << order
       << std::string(order.size() < 8 ? 8 - order.size() : 1, ' ')
       << gens_str(ent.subgroup, 64) << "\n";
  }
}

void note_new_subgroups(std::map<std::string, std::string>& origin, const Filter& f,
                        const char* label) {
  for (const auto& ent : f.entries) origin.emplace(ent.subgroup.key(), label);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

void append_csv_row(const std::string& path, const std::string& row) {
  bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  if (fresh) out << kReportCsvHeader << "\n";
  out << row << "\n";
}

// "g1,g4+gamma2@1": generators, an optional series term, and the index
struct InsertSpec {
  std::vector<unsigned> gens;
  std::string series_term;  // "gamma2", "eta3", or empty
  MonoidIndex at;
};

InsertSpec parse_insert(const std::string& text) {
  auto at = text.find('@');
  if (at == std::string::npos) throw std::runtime_error("--insert needs <gens>@<index>");
  InsertSpec spec;
  std::vector<unsigned> coords = parse_uint_list(text.substr(at + 1));
  for (unsigned c : coords) spec.at.coords.push_back(c);
  std::string left = text.substr(0, at);
  auto plus = left.find('+');
  if (plus != std::string::npos) {
    spec.series_term = left.substr(plus + 1);
    left = left.substr(0, plus);
  }
  std::stringstream ss(left);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() < 2 || item[0] != 'g') throw std::runtime_error("bad generator name: " + item);
    spec.gens.push_back(static_cast<unsigned>(std::stoul(item.substr(1))));
  }
  return spec;
}

Subgroup resolve_insert(const PcGroupPtr& g, const InsertSpec& spec) {
  std::vector<Element> gens;
  for (unsigned k : spec.gens) {
    if (k < 1 || k > g->ngens()) throw std::runtime_error("generator index out of range in --insert");
    gens.push_back(g->gen(k - 1));
  }
  if (!spec.series_term.empty()) {
    std::string term = spec.series_term;
    Filter series;
    std::size_t num_at;
    if (term.rfind("gamma", 0) == 0) {
      series = lower_central_series(g);
      num_at = 5;
    } else if (term.rfind("eta", 0) == 0) {
      series = exponent_p_central_series(g);
      num_at = 3;
    } else {
      throw std::runtime_error("unknown series term in --insert: " + term);
    }
    std::size_t k = std::stoul(term.substr(num_at));
    if (k < 1 || k > series.entries.size())
      throw std::runtime_error("series term out of range in --insert: " + term);
    for (const Element& m : series.entries[k - 1].subgroup.igs()) gens.push_back(m);
  }
  return Subgroup::generated(g, gens);
}

int cmd_refine(const std::string& group_spec, const std::string& series_name,
               const std::string& policy_name_, std::uint64_t seed, unsigned max_iter,
               const std::string& insert_text, const std::string& out_json,
               const std::string& out_csv, bool verify_result) {
  GroupSpec gs = load_group(group_spec);
  Filter series = build_series(gs.group, series_name);
  std::map<std::string, std::string> origin;
  note_new_subgroups(origin, series, "input-series");

  Filter result;
  RefinementReport report;
  report.initial_length = series.length();
  int exit_code = 0;

  if (!insert_text.empty()) {
    InsertSpec ispec = parse_insert(insert_text);
    Subgroup h = resolve_insert(gs.group, ispec);
    origin.emplace(h.key(), "inserted");
    Prefilter pi = insert_subgroup(series, h, ispec.at);
    result = generate(pi);
    if (!is_full(result)) result = fill(result);
    report.iterations = 0;
  } else {
    Policy policy = policy_from_string(policy_name_);
    std::mt19937_64 rng(seed);
    Filter cur = series;
    auto t0 = std::chrono::steady_clock::now();
    for (;;) {
      if (report.iterations >= max_iter) {
        report.hit_cap = true;
        exit_code = 2;
        break;
      }
      IterationStat stat;
      auto it0 = std::chrono::steady_clock::now();
      auto [next, changed] = refine_once(cur, policy, rng, &stat);
      stat.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - it0).count();
      if (!changed) break;
      for (std::size_t k = 0; k < stat.inserted.size(); ++k) {
        std::string label = (k == 0) ? "J" : "J^" + std::to_string(k + 1);
        origin.emplace(stat.inserted[k].key(), label);
      }
      ++report.iterations;
      report.per_iteration.push_back(std::move(stat));
      cur = std::move(next);
    }
    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result = std::move(cur);
  }
  report.final_length = result.length();
  report.subgroups_added = report.final_length - report.initial_length;
  note_new_subgroups(origin, result, "generated");

  print_table(std::cout, result, origin);
  if (verify_result) {
    VerifyReport rep = verify_filter(result);
    if (!rep.ok || !is_full(result)) {
      std::cerr << "result failed verification: " << (rep.ok ? "not full" : rep.message) << "\n";
      return 1;
    }
  }
  if (!out_json.empty()) write_file(out_json, filter_to_json(result));
  if (!out_csv.empty())
    append_csv_row(out_csv, report_csv_row(gs.name, gs.group, p_class(gs.group), report));
  return exit_code;
}

int cmd_verify(const std::string& group_spec, const std::string& filter_path) {
  GroupSpec gs = load_group(group_spec);
  Filter f = filter_from_json(gs.group, slurp(filter_path));
  VerifyReport rep = verify_filter(f);
  if (!rep.ok) {
    std::cerr << "verification failed: " << rep.message << "\n";
    return 1;
  }
  std::cout << "ok: " << f.entries.size() << " stored terms, sign " << (f.sign > 0 ? "+1" : "-1")
            << ", " << (is_full(f) ? "full" : "not full") << "\n";
  return 0;
}

int cmd_bench(const std::string& corpus_dir, const std::string& out_csv,
              const std::string& series_name, const std::string& policy_name_,
              std::uint64_t seed, unsigned max_iter) {
  std::vector<fs::path> files;
  for (const auto& ent : fs::directory_iterator(corpus_dir))
    if (ent.is_regular_file() && ent.path().extension() == ".pc") files.push_back(ent.path());
  std::sort(files.begin(), files.end());
  {
    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot write file: " + out_csv);
    out << kReportCsvHeader << "\n";
  }
  Policy policy = policy_from_string(policy_name_);
  for (const auto& path : files) {
    try {
      PcGroupPtr g = parse_presentation(slurp(path.string()), true);
      Filter series = build_series(g, series_name);
      auto [fin, report] = refine_loop(series, policy, seed, max_iter);
      append_csv_row(out_csv, report_csv_row(path.stem().string(), g, p_class(g), report));
    } catch (const std::exception& e) {
      std::cerr << path.string() << ": " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_sample(const std::string& group_spec, unsigned count, std::uint64_t seed,
               const std::string& out_dir) {
  GroupSpec gs = load_group(group_spec);
  fs::create_directories(out_dir);
  std::mt19937_64 rng(seed);
  for (unsigned i = 0; i < count; ++i) {
    PcGroupPtr sec = random_section(gs.group, rng);
    std::ostringstream name;
    name << "sec_" << std::setw(3) << std::setfill('0') << i << ".pc";
    write_file((fs::path(out_dir) / name.str()).string(), print_presentation(*sec));
  }
  std::cout << "wrote " << count << " sections to " << out_dir << "\n";
  return 0;
}

int cmd_emit(const std::string& group_spec, const std::string& out_path) {
  GroupSpec gs = load_group(group_spec);
  std::string text = print_presentation(*gs.group);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"characteristic filters of finite p-groups"};
  app.require_subcommand(1);

  std::string group_spec, series_name = "epcs", policy = "first", insert_text;
  std::string out_json, out_csv, filter_path, corpus_dir, out_path;
  std::uint64_t seed = 0;
  unsigned max_iter = 64, count = 20;

  auto* refine = app.add_subcommand("refine", "refine a standard series into a longer filter");
  refine->add_option("--group", group_spec, "ut:N,P | sylow-sym:P,K | sylow-sn:P,N | elgo:P | file")
      ->required();
  refine->add_option("--series", series_name, "lcs or epcs (default epcs)");
  refine->add_option("--policy", policy, "first|random|adjoint|derivation|sweep");
  auto* seed_opt = refine->add_option("--seed", seed, "seed for --policy random");
  refine->add_option("--max-iter", max_iter, "iteration cap (default 64)");
  refine->add_option("--insert", insert_text, "insert <gens>[+gammaK|+etaK]@<index> and close");
  refine->add_option("--out-json", out_json, "write the final filter as JSON");
  refine->add_option("--out-csv", out_csv, "append a benchmark row");
  bool verify_result = false;
  refine->add_flag("--verify", verify_result, "re-check the filter axioms of the result");

  auto* verify = app.add_subcommand("verify", "check the filter axioms of an exported filter");
  verify->add_option("--group", group_spec, "the group the filter lives in")->required();
  verify->add_option("--filter", filter_path, "filter JSON file")->required();

  auto* bench = app.add_subcommand("bench", "refine every presentation in a corpus directory");
  bench->add_option("--corpus", corpus_dir, "directory of .pc presentation files")->required();
  bench->add_option("--out", out_csv, "output CSV path")->required();
  bench->add_option("--series", series_name, "lcs or epcs (default epcs)");
  bench->add_option("--policy", policy, "first|random|adjoint|derivation|sweep");
  bench->add_option("--seed", seed, "seed");
  bench->add_option("--max-iter", max_iter, "iteration cap");

  auto* sample = app.add_subcommand("sample", "write random sections of a group as a corpus");
  sample->add_option("--group", group_spec, "source group")->required();
  sample->add_option("--count", count, "number of sections (default 20)");
  sample->add_option("--seed", seed, "seed");
  sample->add_option("--out", out_path, "output directory")->required();

  auto* emit = app.add_subcommand("emit", "print a built-in group as a presentation file");
  emit->add_option("--group", group_spec, "group spec")->required();
  emit->add_option("--out", out_path, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (refine->parsed()) {
      if (policy == "random" && seed_opt->count() == 0)
        throw std::runtime_error("--policy random requires --seed");
      return cmd_refine(group_spec, series_name, policy, seed, max_iter, insert_text, out_json,
                        out_csv, verify_result);
    }
    if (verify->parsed()) return cmd_verify(group_spec, filter_path);
    if (bench->parsed()) return cmd_bench(corpus_dir, out_csv, series_name, policy, seed, max_iter);
    if (sample->parsed()) return cmd_sample(group_spec, count, seed, out_path);
    if (emit->parsed()) return cmd_emit(group_spec, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
