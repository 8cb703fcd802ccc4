#include "polyembed/document.hpp"

#include "json.hpp"

#include "polyembed/errors.hpp"

namespace polyembed {

using nlohmann::json;

namespace {

json rationals(std::span<const Rational> values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

Rational read_rational(const json& node) {
  if (!node.is_string()) throw ParseError("rationals must be written as strings, got " + node.dump());
  return parse_rational(node.get<std::string>());
}

Vec read_rationals(const json& node, std::size_t expected) {
  if (!node.is_array()) throw ParseError("expected an array of rationals");
  if (node.size() != expected) {
    throw ParseError("expected " + std::to_string(expected) + " entries, got " + std::to_string(node.size()));
  }
  Vec out;
  for (const auto& v : node) out.push_back(read_rational(v));
  return out;
}

std::vector<std::string> read_names(const json& node) {
  if (!node.is_array()) throw ParseError("expected an array of names");
  std::vector<std::string> out;
  for (const auto& v : node) {
    if (!v.is_string()) throw ParseError("names must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

const json& field(const json& node, const char* key) {
  if (!node.is_object() || !node.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  return node.at(key);
}

std::size_t read_size(const json& node) {
  if (!node.is_number_unsigned()) throw ParseError("expected a nonnegative integer");
  return node.get<std::size_t>();
}

json header(const char* kind) { return json{{"format", document_format}, {"kind", kind}}; }

json constraints(const std::vector<Constraint>& list) {
  json out = json::array();
  for (const auto& c : list) out.push_back({{"normal", rationals(c.normal)}, {"offset", to_string(c.offset)}});
  return out;
}

std::vector<Constraint> read_constraints(const json& node, std::size_t dimension) {
  if (!node.is_array()) throw ParseError("expected an array of constraints");
  std::vector<Constraint> out;
  for (const auto& c : node) {
    out.push_back({read_rationals(field(c, "normal"), dimension), read_rational(field(c, "offset"))});
  }
  return out;
}

const char* norm_name(Norm norm) { return norm == Norm::Infinity ? "inf" : "l1"; }

Norm read_norm(const json& node) {
  if (node == "inf") return Norm::Infinity;
  if (node == "l1") return Norm::L1;
  throw ParseError("norm must be \"inf\" or \"l1\"");
}

DiscreteLoss discrete_from(const json& doc) {
  auto outcomes = read_names(field(doc, "outcomes"));
  std::vector<std::string> names;
  Matrix rows;
  const auto& reports = field(doc, "reports");
  if (!reports.is_array()) throw ParseError("\"reports\" must be an array");
  for (const auto& r : reports) {
    const auto& name = field(r, "name");
    if (!name.is_string()) throw ParseError("report names must be strings");
    names.push_back(name.get<std::string>());
    rows.push_back(read_rationals(field(r, "loss"), outcomes.size()));
  }
  return DiscreteLoss(std::move(outcomes), std::move(names), std::move(rows));
}

PolyhedralLoss surrogate_from(const json& doc) {
  const std::size_t d = read_size(field(doc, "dimension"));
  auto outcomes = read_names(field(doc, "outcomes"));
  const auto& per_outcome = field(doc, "pieces");
  if (!per_outcome.is_array() || per_outcome.size() != outcomes.size()) {
    throw ParseError("\"pieces\" needs one list per outcome");
  }
  std::vector<std::vector<AffinePiece>> pieces;
  for (const auto& list : per_outcome) {
    if (!list.is_array()) throw ParseError("each outcome needs a list of pieces");
    auto& out = pieces.emplace_back();
    for (const auto& piece : list) {
      out.push_back({read_rationals(field(piece, "slope"), d), read_rational(field(piece, "intercept"))});
    }
  }
  return PolyhedralLoss(d, std::move(outcomes), std::move(pieces));
}

LinkArtifact artifact_from(const json& doc) {
  const std::size_t d = read_size(field(doc, "dimension"));
  ReportFamily family;
  family.reports = read_names(field(doc, "reports"));
  const auto& members = field(doc, "members");
  if (!members.is_array()) throw ParseError("\"members\" must be an array");
  for (const auto& m : members) {
    family.members.emplace_back(d, read_constraints(field(m, "inequalities"), d),
                                read_constraints(field(m, "equalities"), d));
    auto& set = family.report_sets.emplace_back();
    const auto& reports = field(m, "reports");
    if (!reports.is_array()) throw ParseError("member reports must be an array");
    for (const auto& r : reports) {
      auto index = read_size(r);
      if (index >= family.reports.size()) throw ParseError("member report index out of range");
      set.push_back(index);
    }
  }
  EpsilonMax bound;
  const auto& limit = field(doc, "epsilon_max");
  if (!limit.is_null()) {
    bound.value = read_rational(field(limit, "value"));
    bound.point = read_rationals(field(limit, "point"), d);
    for (const auto& m : field(limit, "family")) bound.family.push_back(read_size(m));
  }
  Rational epsilon = read_rational(field(doc, "epsilon"));
  if (sgn(epsilon) <= 0) throw ParseError("epsilon must be positive");
  return LinkArtifact(std::move(family), read_norm(field(doc, "norm")), epsilon, std::move(bound));
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
}

std::string kind_of(const json& doc) {
  const auto& format = field(doc, "format");
  if (!format.is_number_integer() || format.get<int>() != document_format) {
    throw ParseError("unsupported document format " + format.dump());
  }
  const auto& kind = field(doc, "kind");
  if (!kind.is_string()) throw ParseError("\"kind\" must be a string");
  return kind.get<std::string>();
}

}  // namespace

std::string to_document(const DiscreteLoss& loss) {
  json doc = header("discrete");
  doc["outcomes"] = loss.outcomes();
  json reports = json::array();
  for (std::size_t r = 0; r < loss.report_count(); ++r) {
    reports.push_back({{"name", loss.reports()[r]}, {"loss", rationals(loss.loss(r))}});
  }
  doc["reports"] = std::move(reports);
  return doc.dump(2) + "\n";
}

std::string to_document(const PolyhedralLoss& loss) {
  json doc = header("surrogate");
  doc["dimension"] = loss.dimension();
  doc["outcomes"] = loss.outcomes();
  json pieces = json::array();
  for (std::size_t y = 0; y < loss.outcome_count(); ++y) {
    json list = json::array();
    for (const auto& piece : loss.pieces(y)) {
      list.push_back({{"slope", rationals(piece.slope)}, {"intercept", to_string(piece.intercept)}});
    }
    pieces.push_back(std::move(list));
  }
  doc["pieces"] = std::move(pieces);
  return doc.dump(2) + "\n";
}

std::string to_document(const LinkArtifact& artifact) {
  json doc = header("link");
  doc["dimension"] = artifact.dimension();
  doc["norm"] = norm_name(artifact.norm());
  doc["epsilon"] = to_string(artifact.epsilon());
  const auto& bound = artifact.bound();
  if (bound.value) {
    doc["epsilon_max"] = {{"value", to_string(*bound.value)}, {"point", rationals(bound.point)}, {"family", bound.family}};
  } else {
    doc["epsilon_max"] = nullptr;
  }
  doc["reports"] = artifact.family().reports;
  json members = json::array();
  for (std::size_t m = 0; m < artifact.family().members.size(); ++m) {
    const auto& member = artifact.family().members[m];
    members.push_back({{"inequalities", constraints(member.inequalities())},
                       {"equalities", constraints(member.equalities())},
                       {"reports", artifact.family().report_sets[m]}});
  }
  doc["members"] = std::move(members);
  return doc.dump(2) + "\n";
}

Document parse_document(const std::string& text) {
  json doc = parse_json(text);
  auto kind = kind_of(doc);
  if (kind == "discrete") return discrete_from(doc);
  if (kind == "surrogate") return surrogate_from(doc);
  if (kind == "link") return artifact_from(doc);
  throw ParseError("unknown document kind \"" + kind + "\"");
}

DiscreteLoss parse_discrete(const std::string& text) {
  auto doc = parse_document(text);
  if (auto* loss = std::get_if<DiscreteLoss>(&doc)) return std::move(*loss);
  throw ParseError("expected a discrete loss document");
}

PolyhedralLoss parse_surrogate(const std::string& text) {
  auto doc = parse_document(text);
  if (auto* loss = std::get_if<PolyhedralLoss>(&doc)) return std::move(*loss);
  throw ParseError("expected a surrogate document");
}

LinkArtifact parse_artifact(const std::string& text) {
  auto doc = parse_document(text);
  if (auto* artifact = std::get_if<LinkArtifact>(&doc)) return std::move(*artifact);
  throw ParseError("expected a link document");
}

}  // namespace polyembed
