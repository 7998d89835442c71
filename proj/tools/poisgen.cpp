// poisgen: check, classify and search two-product algebras against the
// square/angle-circle Poisson-type definitions.
//
// Exit codes: 0 all requested checks pass, 1 an axiom fails, 2 input or usage error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poisgen/poisgen.hpp"

namespace {

using namespace poisgen;
using io::json;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_input = 2;

enum class Format { Text, Machine };

struct Output {
  Format format = Format::Text;
};

void emit(const json &doc) { std::cout << doc.dump(2) << '\n'; }

std::string kind_help() {
  std::string s = "kind name, one of:";
  for (auto n : kind_names)
    s += " " + std::string(n);
  return s;
}

template <FieldElement T> std::string describe_failure(const Failure<T> &f) {
  std::ostringstream os;
  os << "    FAIL " << f.axiom;
  if (!f.witness.empty()) {
    os << " at (";
    for (std::size_t i = 0; i < f.witness.size(); ++i)
      os << (i ? "," : "") << f.witness[i];
    os << ")";
  }
  if (f.residual)
    os << " residual " << f.residual->to_string();
  return os.str();
}

template <FieldElement T> void print_report(const AxiomReport<T> &r) {
  std::cout << (r.passed ? "PASS " : "FAIL ") << kind_name(r.kind);
  if (r.alpha_used)
    std::cout << " (alpha = " << r.alpha_used->to_string() << ")";
  std::cout << '\n';
  for (const auto &f : r.failures)
    std::cout << describe_failure(f) << '\n';
  for (const auto &w : r.warnings)
    std::cout << "    warning: " << w << '\n';
}

// --------------------------------------------------------------------------

int run_check(const std::string &path, const std::vector<std::string> &kind_args, bool all, Format format) {
  const std::string bytes = io::read_file(path);
  const auto algebra = io::algebra_from_json(io::parse_json(bytes, path));
  std::vector<StructureKind> kinds;
  if (all)
    kinds.assign(all_kinds.begin(), all_kinds.end());
  for (const auto &k : kind_args)
    kinds.push_back(require_kind(k));
  if (kinds.empty())
    throw InputError("check: pass --kind <name> or --all");

  return std::visit(
      [&](const auto &a) {
        using Tv = typename std::decay_t<decltype(a)>::scalar_type;
        Checker<Tv> checker(a);
        std::vector<AxiomReport<Tv>> reports;
        for (auto k : kinds)
          reports.push_back(check(checker, k));
        bool ok = true;
        for (const auto &r : reports)
          ok = ok && r.passed;
        if (format == Format::Machine) {
          json doc = io::envelope("check", io::sha256_hex(bytes));
          doc["field"] = a.field().to_string();
          doc["dim"] = a.dim();
          doc["passed"] = ok;
          json rs = json::array();
          for (const auto &r : reports)
            rs.push_back(io::report_to_json(r));
          doc["reports"] = std::move(rs);
          emit(doc);
        } else {
          for (const auto &r : reports)
            print_report(r);
        }
        return ok ? exit_pass : exit_fail;
      },
      algebra);
}

int run_classify(const std::string &path, Format format) {
  const std::string bytes = io::read_file(path);
  const auto algebra = io::algebra_from_json(io::parse_json(bytes, path));
  return std::visit(
      [&](const auto &a) {
        auto c = classify(a);
        if (format == Format::Machine) {
          json doc = io::envelope("classify", io::sha256_hex(bytes));
          doc["field"] = a.field().to_string();
          doc["dim"] = a.dim();
          doc["passed"] = io::kind_list(c.passed);
          doc["failed"] = io::kind_list(c.failed);
          doc["not_applicable"] = io::kind_list(c.not_applicable);
          json rs = json::array();
          for (const auto &r : c.reports)
            rs.push_back(io::report_to_json(r));
          doc["reports"] = std::move(rs);
          emit(doc);
        } else {
          auto line = [](const char *label, const std::vector<StructureKind> &ks) {
            std::cout << label << " (" << ks.size() << "):";
            for (auto k : ks)
              std::cout << ' ' << kind_name(k);
            std::cout << '\n';
          };
          line("passed", c.passed);
          line("failed", c.failed);
          line("not-applicable", c.not_applicable);
        }
        return exit_pass;
      },
      algebra);
}

int run_solve_alpha(const std::string &path, const std::string &kind_arg, Format format) {
  const StructureKind kind = require_kind(kind_arg);
  const std::string bytes = io::read_file(path);
  const auto algebra = io::algebra_from_json(io::parse_json(bytes, path));
  return std::visit(
      [&](const auto &a) {
        auto sol = solve_alpha(kind, a);
        const auto status = alpha_status_name(static_cast<std::uint8_t>(sol.status));
        if (format == Format::Machine) {
          json doc = io::envelope("solve-alpha", io::sha256_hex(bytes));
          doc["kind"] = std::string(kind_name(kind));
          doc["status"] = std::string(status);
          doc["alpha"] = sol.value ? json(sol.value->to_string()) : json(nullptr);
          emit(doc);
        } else {
          std::cout << kind_name(kind) << ": " << status;
          if (sol.value)
            std::cout << " alpha = " << sol.value->to_string();
          std::cout << '\n';
        }
        using Status = typename decltype(sol)::Status;
        return sol.status == Status::NoSolution ? exit_fail : exit_pass;
      },
      algebra);
}

int run_survey(std::size_t n, std::size_t m, const std::string &field_text, const std::string &catalog_path,
               unsigned threads, Format format) {
  const auto shape = endv::SpaceShape::make(n, m);
  const FieldSpec field = FieldSpec::parse(field_text);
  const endv::Catalog catalog =
      catalog_path.empty() ? endv::default_catalog()
                           : io::catalog_from_json(io::parse_json(io::read_file(catalog_path), catalog_path));
  const json input = {{"shape", {{"n", n}, {"m", m}}}, {"field", field.to_string()},
                      {"catalog", io::catalog_to_json(catalog)}};
  const auto report = field.is_rational() ? endv::survey<Rational>(shape, catalog, field, threads)
                                          : endv::survey<Residue>(shape, catalog, field, threads);
  if (format == Format::Machine) {
    json doc = io::envelope("survey", io::sha256_hex(input.dump()));
    doc["survey"] = io::survey_to_json(report);
    emit(doc);
  } else {
    std::cout << "survey n=" << n << " m=" << m << " over " << field << ": " << report.rows.size() << " rows, "
              << report.closed_rows << " closed\n";
    for (const auto &row : report.rows) {
      if (!row.closed || !row.kinds_passed)
        continue;
      std::cout << "  " << row.subspace << " | [,]=" << row.bracket << " | o=" << row.circle
                << " | D=" << row.derivation << " (dim " << row.dim << "):";
      for (auto k : all_kinds)
        if (row.kinds_passed & kind_bit(k))
          std::cout << ' ' << kind_name(k);
      std::cout << '\n';
    }
    std::cout << "counts:\n";
    for (auto k : all_kinds)
      std::cout << "  " << kind_name(k) << ": " << report.counts[kind_index(k)] << '\n';
    std::cout << "remark check (left-angle-circle rows also right-angle-circle): "
              << (report.remark_check ? "holds" : "fails") << " (" << report.remark_exceptions
              << " exceptions)\n";
  }
  return exit_pass;
}

int run_census(const std::string &field_text, std::size_t dim, bool with_derivation,
               const std::vector<std::string> &kind_args, std::uint64_t cap, unsigned threads, Format format) {
  census::CensusSpec spec;
  spec.field = FieldSpec::parse(field_text);
  spec.dim = dim;
  spec.with_derivation = with_derivation;
  spec.cap = cap;
  if (!kind_args.empty()) {
    spec.kinds = 0;
    for (const auto &k : kind_args)
      spec.kinds |= kind_bit(require_kind(k));
  } else if (!with_derivation) {
    spec.kinds = endv::tailless_mask;
  }
  census::CensusOptions options;
  options.threads = threads;
  const auto result = census::run_census(spec, options);
  if (format == Format::Machine) {
    json doc = io::envelope("census", io::sha256_hex(io::census_spec_to_json(spec).dump()));
    doc["census"] = io::census_to_json(result);
    emit(doc);
  } else {
    std::cout << "census " << spec.field << " dim " << dim << (with_derivation ? " with D" : "") << ": "
              << result.total_enumerated << " tuples\n";
    for (auto k : all_kinds) {
      if (!(spec.kinds & kind_bit(k)))
        continue;
      std::cout << "  " << kind_name(k) << ": " << result.counts[kind_index(k)];
      if (const auto &w = result.witnesses[kind_index(k)]) {
        std::cout << "  first witness ";
        for (auto d : *w)
          std::cout << d;
      }
      std::cout << '\n';
    }
  }
  return exit_pass;
}

void add_format(CLI::App *cmd, Format &format) {
  cmd->add_option("--format", format, "output format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"text", Format::Text},
                                                                         {"machine", Format::Machine}},
                                          CLI::ignore_case));
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"poisgen: exact checker and model finder for Poisson-algebra generalizations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::tool_version));

  Format format = Format::Text;
  std::string path;
  std::vector<std::string> kinds;
  bool all = false;

  auto *check_cmd = app.add_subcommand("check", "check an algebra file against one or more kinds");
  check_cmd->add_option("file", path, "algebra file (JSON)")->required();
  check_cmd->add_option("--kind", kinds, kind_help())->take_all();
  check_cmd->add_flag("--all", all, "check all 21 kinds");
  add_format(check_cmd, format);

  auto *classify_cmd = app.add_subcommand("classify", "list the kinds an algebra file satisfies");
  classify_cmd->add_option("file", path, "algebra file (JSON)")->required();
  add_format(classify_cmd, format);

  std::string alpha_kind;
  auto *alpha_cmd = app.add_subcommand("solve-alpha", "solve for the scalar alpha of a tailed kind");
  alpha_cmd->add_option("file", path, "algebra file (JSON)")->required();
  alpha_cmd->add_option("--kind", alpha_kind, kind_help())->required();
  add_format(alpha_cmd, format);

  std::size_t n = 0, m = 0;
  std::string field_text = "Q";
  std::string catalog_path;
  unsigned threads = 0;
  auto *survey_cmd = app.add_subcommand("survey", "instantiate the template catalog inside End(V)");
  survey_cmd->add_option("--dim", n, "dim V")->required();
  survey_cmd->add_option("--subdim", m, "dim W, 0 < m < n")->required();
  survey_cmd->add_option("--field", field_text, "Q or F<p>");
  survey_cmd->add_option("--catalog", catalog_path, "catalog override file (JSON)");
  survey_cmd->add_option("--threads", threads, "worker threads (0: all cores)");
  add_format(survey_cmd, format);

  std::string census_field;
  std::size_t census_dim = 0;
  bool with_derivation = false;
  std::uint64_t cap = census::default_cap;
  auto *census_cmd = app.add_subcommand("census", "enumerate every structure-constant tuple over GF(p)");
  census_cmd->add_option("--field", census_field, "F<p>")->required();
  census_cmd->add_option("--dim", census_dim, "dimension")->required();
  census_cmd->add_flag("--with-derivation", with_derivation, "also enumerate D");
  census_cmd->add_option("--kinds", kinds, "comma-separated kind names (default: all applicable)")->delimiter(',');
  census_cmd->add_option("--cap", cap, "maximum number of tuples");
  census_cmd->add_option("--threads", threads, "worker threads (0: all cores)");
  add_format(census_cmd, format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return exit_input;
  }

  try {
    if (*check_cmd)
      return run_check(path, kinds, all, format);
    if (*classify_cmd)
      return run_classify(path, format);
    if (*alpha_cmd)
      return run_solve_alpha(path, alpha_kind, format);
    if (*survey_cmd)
      return run_survey(n, m, field_text, catalog_path, threads, format);
    if (*census_cmd)
      return run_census(census_field, census_dim, with_derivation, kinds, cap, threads, format);
  } catch (const InputError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const DomainError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const json::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  }
  return exit_input;
}
