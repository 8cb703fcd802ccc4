#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "polyembed/document.hpp"
#include "polyembed/errors.hpp"
#include "polyembed/plot.hpp"
#include "polyembed/regret.hpp"

using namespace polyembed;

namespace {

enum Exit { Ok = 0, Failure = 1, Usage = 2, Guard = 3, Domain = 4, Representative = 5, LinkFailure = 6, Violation = 7 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

bool is_zoo(const std::string& source) { return source.rfind("zoo:", 0) == 0; }

Document load(const std::string& source) {
  if (!is_zoo(source)) return parse_document(read_file(source));
  auto spec = zoo::parse_spec(source);
  if (zoo::is_discrete(spec)) return zoo::make_discrete(spec);
  if (zoo::is_surrogate(spec)) return zoo::make_surrogate(spec);
  throw ParseError("\"" + source + "\" is not a loss");
}

DiscreteLoss load_discrete(const std::string& source) {
  auto doc = load(source);
  if (auto* loss = std::get_if<DiscreteLoss>(&doc)) return std::move(*loss);
  throw ParseError(source + " is not a discrete loss");
}

PolyhedralLoss load_surrogate(const std::string& source) {
  auto doc = load(source);
  if (auto* loss = std::get_if<PolyhedralLoss>(&doc)) return std::move(*loss);
  throw ParseError(source + " is not a surrogate");
}

Link load_link(const std::string& source) {
  if (is_zoo(source)) {
    auto spec = zoo::parse_spec(source);
    if (!zoo::is_link(spec)) throw ParseError("\"" + source + "\" is not a link");
    return zoo::make_link(spec);
  }
  auto artifact = std::make_shared<LinkArtifact>(parse_artifact(read_file(source)));
  return [artifact](std::span<const Rational> u) { return artifact->link_name(u); };
}

Norm parse_norm(const std::string& text) {
  if (text == "inf") return Norm::Infinity;
  if (text == "l1") return Norm::L1;
  throw ParseError("norm must be inf or l1");
}

Vec parse_point(const std::string& line) {
  std::istringstream in(line);
  Vec out;
  for (std::string token; in >> token;) out.push_back(parse_rational(token));
  return out;
}

std::string names(const std::vector<std::string>& all, const std::vector<std::size_t>& indices) {
  std::string out;
  for (auto i : indices) out += (out.empty() ? "" : ",") + all[i];
  return "{" + out + "}";
}

std::string bound_text(const EpsilonMax& bound) { return bound.value ? to_string(*bound.value) : "infinite"; }

int run_trim(const std::string& source) {
  auto loss = load_discrete(source);
  auto trimmed = trim(loss);
  std::cout << "trim: " << trimmed.vectors.size() << " vectors\n";
  for (std::size_t i = 0; i < trimmed.vectors.size(); ++i) {
    std::cout << "  " << loss.reports()[trimmed.reports[i]] << '\t' << to_string(trimmed.vectors[i]) << '\n';
  }
  std::cout << "reports:\n";
  auto redundancy = redundancy_report(loss);
  for (std::size_t r = 0; r < loss.report_count(); ++r) {
    std::cout << "  " << loss.reports()[r] << '\t';
    switch (redundancy[r].status) {
      case Redundancy::Kept: std::cout << "kept"; break;
      case Redundancy::StrictlyRedundant:
        std::cout << "redundant";
        if (redundancy[r].other) std::cout << " (level set inside " << loss.reports()[*redundancy[r].other] << ")";
        break;
      case Redundancy::Duplicate: std::cout << "duplicate of " << loss.reports()[*redundancy[r].other]; break;
    }
    std::cout << '\n';
  }
  return Ok;
}

int run_analyze(const std::string& source, bool auto_quotient, const std::string& output) {
  auto surrogate = load_surrogate(source);
  auto analysis = analyze(surrogate, auto_quotient);
  const auto& embedded = analysis.embedded;
  std::cout << "dimension: " << surrogate.dimension() << '\n'
            << "lineality: " << lineality_space(surrogate).size() << '\n'
            << "reduced dimension: " << analysis.reduced().dimension() << '\n'
            << "representatives: " << analysis.representatives.size() << '\n';
  for (std::size_t i = 0; i < analysis.representatives.size(); ++i) {
    std::cout << "  " << to_string(analysis.quotient.lift(analysis.representatives[i])) << '\t'
              << to_string(embedded.loss(i)) << '\n';
  }
  auto trimmed = trim(embedded);
  std::cout << "embedded trim: " << trimmed.vectors.size() << " vectors\n";
  for (std::size_t i = 0; i < trimmed.vectors.size(); ++i) {
    std::cout << "  " << to_string(analysis.quotient.lift(analysis.representatives[trimmed.reports[i]])) << '\t'
              << to_string(trimmed.vectors[i]) << '\n';
  }
  if (!output.empty()) write_output(output, to_document(embedded));
  return Ok;
}

int run_linkgen(const std::string& source, const std::string& target_source, const std::string& norm,
                const std::string& eps, const std::string& mode, const std::string& output) {
  auto geometry = surrogate_geometry(load_surrogate(source));
  auto target = load_discrete(target_source);
  LinkOptions options;
  options.norm = parse_norm(norm);
  if (!eps.empty()) options.epsilon = parse_rational(eps);
  if (mode == "embedding") {
    options.source = ReportSource::Embedding;
  } else if (mode != "property") {
    throw ParseError("report source must be property or embedding");
  }
  auto artifact = build_link(geometry, target, options);
  std::cout << "epsilon_max: " << bound_text(artifact.bound()) << '\n'
            << "epsilon: " << to_string(artifact.epsilon()) << '\n'
            << "members: " << artifact.family().members.size() << '\n';
  if (artifact.bound().value) std::cout << "attained at: " << to_string(artifact.bound().point) << '\n';
  if (!output.empty()) write_output(output, to_document(artifact));
  return Ok;
}

int run_linkeval(const std::string& source) {
  auto artifact = parse_artifact(read_file(source));
  for (std::string line; std::getline(std::cin, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto u = parse_point(line);
    if (u.size() != artifact.dimension()) {
      throw ParseError("point \"" + line + "\" needs " + std::to_string(artifact.dimension()) + " coordinates");
    }
    auto envelope = artifact.envelope(u);
    std::cout << artifact.family().reports[envelope.front()] << '\t' << names(artifact.family().reports, envelope)
              << '\n';
  }
  return Ok;
}

int run_verify(const std::string& source, const std::string& target_source, const std::string& link_source,
               const std::string& norm, const std::string& eps, std::size_t samples, std::uint64_t seed, bool exact,
               const std::string& certify) {
  auto geometry = surrogate_geometry(load_surrogate(source));
  auto target = load_discrete(target_source);
  auto link = load_link(link_source);
  VerifyOptions options{parse_norm(norm), parse_rational(eps), samples, seed, exact};
  if (!certify.empty()) {
    auto search = certify_epsilon(geometry, target, link, options, parse_rational(certify));
    std::cout << "certified epsilon: " << (search.epsilon ? to_string(*search.epsilon) : "none") << " after "
              << search.rounds << " rounds (sample verification)\n";
    return search.epsilon ? Ok : LinkFailure;
  }
  auto result = verify_proposed_link(geometry, target, link, options);
  if (result.refuted) {
    std::cout << "refuted\n"
              << "  point: " << to_string(result.point) << '\n'
              << "  link value: " << result.proposed << '\n'
              << "  distribution: " << to_string(result.distribution) << '\n';
    return LinkFailure;
  }
  std::cout << "verified at " << result.points_checked << " points"
            << (result.exhaustive ? " including every boundary arrangement point" : "") << '\n';
  return Ok;
}

int run_diagnose(const std::string& source, const std::string& target_source) {
  auto doc = load(source);
  DiscreteLoss embedded = std::holds_alternative<PolyhedralLoss>(doc)
                              ? analyze(std::get<PolyhedralLoss>(doc)).embedded
                              : std::get<DiscreteLoss>(std::move(doc));
  auto target = load_discrete(target_source);
  auto verdict = diagnose_consistency(embedded, target);
  auto trimmed = trim(embedded);
  auto cell_names = [&](const std::vector<std::size_t>& cells) {
    std::vector<std::string> all;
    for (auto c : cells) all.push_back(embedded.reports()[trimmed.reports[c]]);
    std::string out;
    for (const auto& n : all) out += "\n  " + n;
    return out;
  };
  std::cout << (verdict.calibrated ? "calibrated" : "inconsistent for target") << '\n';
  std::cout << "calibrated cells: " << verdict.good_cells.size() << cell_names(verdict.good_cells) << '\n';
  std::cout << "offending cells: " << verdict.bad_cells.size() << cell_names(verdict.bad_cells) << '\n';
  if (!verdict.calibrated) {
    std::cout << "witness p: " << to_string(verdict.witness) << '\n'
              << "witness p': " << to_string(verdict.other_witness) << '\n';
  }
  return Ok;
}

int run_regret(const std::string& source, const std::string& target_source, const std::string& link_source,
               const std::string& norm, const std::string& eps, const std::string& constant, std::size_t samples,
               std::uint64_t seed, bool strict) {
  auto geometry = surrogate_geometry(load_surrogate(source));
  auto target = load_discrete(target_source);
  LinkOptions options;
  options.norm = parse_norm(norm);
  if (!eps.empty()) options.epsilon = parse_rational(eps);
  auto artifact = build_link(geometry, target, options);
  auto bound = regret_bound_constant(geometry, target, artifact);
  Link link = link_source.empty()
                  ? Link([&artifact](std::span<const Rational> u) { return artifact.link_name(u); })
                  : load_link(link_source);
  Rational c = constant.empty() ? bound.c_bound : parse_rational(constant);
  auto check = empirical_transfer_check(geometry.surrogate, target, link, c,
                                        {samples, seed, 3, strict && constant.empty()});
  std::cout << "loss gap\t" << to_string(bound.c_ell) << '\n'
            << "hoffman\t" << to_string(bound.hoffman) << (bound.hoffman_exact ? " (exact)" : " (sampled lower bound)")
            << '\n'
            << "epsilon\t" << to_string(bound.eps_psi) << '\n'
            << "c bound\t" << to_string(bound.c_bound) << '\n'
            << "c tested\t" << to_string(c) << '\n'
            << "pairs\t" << check.samples_used << '\n'
            << "violations\t" << check.violations << '\n'
            << "max ratio\t" << to_string(check.max_sampled_ratio) << '\n';
  if (!check.worst_distribution.empty()) {
    std::cout << "attained at\tp = " << to_string(check.worst_distribution) << ", u = " << to_string(check.worst_point)
              << '\n';
  }
  return Ok;
}

int run_plot(const std::string& source, const std::string& slice_text, const std::string& overlay_source,
             const std::string& output) {
  auto loss = load_discrete(source);
  std::optional<Slice> slice;
  if (!slice_text.empty()) slice = parse_slice(loss, slice_text);
  std::optional<DiscreteLoss> overlay;
  if (!overlay_source.empty()) overlay = load_discrete(overlay_source);
  auto plot = simplex_plot(loss, slice, overlay ? &*overlay : nullptr);
  write_output(output, render_svg(plot));
  std::size_t shaded = std::count_if(plot.cells.begin(), plot.cells.end(), [](const auto& c) { return !c.contained; });
  std::cerr << "cells: " << plot.cells.size();
  if (plot.has_overlay) std::cerr << ", overlay cells: " << plot.overlay.size() << ", not contained: " << shaded;
  std::cerr << '\n';
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact polyhedral surrogate and link analysis"};
  app.require_subcommand(1);
  const std::string norm_help = "inf or l1";

  std::string source, target, link, norm = "inf", eps, output, mode = "property", slice, overlay, constant, certify;
  std::size_t samples = 10'000;
  std::uint64_t seed = 1;
  bool no_quotient = false, no_exact = false, strict = false;

  auto* trim_cmd = app.add_subcommand("trim", "Trim a discrete loss and classify its reports");
  trim_cmd->add_option("loss", source, "zoo:<name>?.. or a document")->required();

  auto* embed_cmd = app.add_subcommand("embed", "Write the conjugate surrogate of a discrete loss");
  embed_cmd->add_option("loss", source)->required();
  embed_cmd->add_option("-o,--output", output, "document path, stdout by default");

  auto* analyze_cmd = app.add_subcommand("analyze", "Quotient, representative set and embedded loss of a surrogate");
  analyze_cmd->add_option("surrogate", source)->required();
  analyze_cmd->add_flag("--no-quotient", no_quotient, "keep directions of constancy");
  analyze_cmd->add_option("-o,--output", output, "write the embedded loss document");

  auto* linkgen_cmd = app.add_subcommand("linkgen", "Build a thickened link");
  linkgen_cmd->add_option("surrogate", source)->required();
  linkgen_cmd->add_option("--target", target)->required();
  linkgen_cmd->add_option("--norm", norm, norm_help);
  linkgen_cmd->add_option("--eps", eps, "thickening radius, half the largest one by default");
  linkgen_cmd->add_option("--source", mode, "property or embedding");
  linkgen_cmd->add_option("-o,--output", output, "link document path");

  auto* linkeval_cmd = app.add_subcommand("linkeval", "Evaluate a link document on points read from stdin");
  linkeval_cmd->add_option("artifact", source)->required();

  auto* verify_cmd = app.add_subcommand("verify-link", "Check that a proposed link is separated");
  verify_cmd->add_option("surrogate", source)->required();
  verify_cmd->add_option("--target", target)->required();
  verify_cmd->add_option("--link", link, "zoo:<link> or a link document")->required();
  verify_cmd->add_option("--norm", norm, norm_help);
  verify_cmd->add_option("--eps", eps)->required();
  verify_cmd->add_option("--samples", samples);
  verify_cmd->add_option("--seed", seed);
  verify_cmd->add_flag("--no-exact", no_exact, "skip boundary arrangement points");
  verify_cmd->add_option("--certify", certify, "bisect for the largest passing radius below this bound");

  auto* diagnose_cmd = app.add_subcommand("diagnose", "Compare the cells of an embedded loss with a target");
  diagnose_cmd->add_option("loss", source, "surrogate or discrete loss")->required();
  diagnose_cmd->add_option("--target", target)->required();

  auto* regret_cmd = app.add_subcommand("regret", "Regret transfer constant and its empirical check");
  regret_cmd->add_option("surrogate", source)->required();
  regret_cmd->add_option("--target", target)->required();
  regret_cmd->add_option("--link", link, "defaults to the produced link");
  regret_cmd->add_option("--norm", norm, norm_help);
  regret_cmd->add_option("--eps", eps);
  regret_cmd->add_option("--c", constant, "constant to test instead of the bound");
  regret_cmd->add_option("--samples", samples);
  regret_cmd->add_option("--seed", seed);
  regret_cmd->add_flag("--strict", strict, "fail on the first violation of the computed bound");

  auto* plot_cmd = app.add_subcommand("plot", "Draw level-set cells on the simplex as SVG");
  plot_cmd->add_option("loss", source)->required();
  plot_cmd->add_option("--slice", slice, "y<label>=<value> for four outcomes");
  plot_cmd->add_option("--overlay", overlay, "target loss drawn dashed");
  plot_cmd->add_option("-o,--output", output)->required();

  auto* list_cmd = app.add_subcommand("zoo", "List the named constructions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (*trim_cmd) return run_trim(source);
    if (*embed_cmd) {
      write_output(output, to_document(conjugate_surrogate(load_discrete(source))));
      return Ok;
    }
    if (*analyze_cmd) return run_analyze(source, !no_quotient, output);
    if (*linkgen_cmd) return run_linkgen(source, target, norm, eps, mode, output);
    if (*linkeval_cmd) return run_linkeval(source);
    if (*verify_cmd) return run_verify(source, target, link, norm, eps, samples, seed, !no_exact, certify);
    if (*diagnose_cmd) return run_diagnose(source, target);
    if (*regret_cmd) return run_regret(source, target, link, norm, eps, constant, samples, seed, strict);
    if (*plot_cmd) return run_plot(source, slice, overlay, output);
    if (*list_cmd) {
      for (const auto& name : zoo::names()) std::cout << "zoo:" << name << '\n';
      return Ok;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return Usage;
  } catch (const GuardExceeded& e) {
    std::cerr << "guard exceeded: " << e.what() << '\n';
    return Guard;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return Domain;
  } catch (const NotRepresentative& e) {
    std::cerr << "not representative: " << e.what() << '\n';
    return Representative;
  } catch (const LinkError& e) {
    std::cerr << "link error: " << e.what() << '\n';
    return LinkFailure;
  } catch (const ViolationWithProof& e) {
    std::cerr << "violation: " << e.what() << '\n';
    return Violation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Failure;
  }
  return Failure;
}
