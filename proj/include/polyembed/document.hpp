#pragma once

#include <string>
#include <variant>

#include "polyembed/link_builder.hpp"

namespace polyembed {

// JSON documents with a "format": 1 header; every rational is a "num/den"
// string and numeric literals in rational positions are rejected.
inline constexpr int document_format = 1;

std::string to_document(const DiscreteLoss& loss);
std::string to_document(const PolyhedralLoss& loss);
std::string to_document(const LinkArtifact& artifact);

using Document = std::variant<DiscreteLoss, PolyhedralLoss, LinkArtifact>;

// Throws ParseError on malformed input.
Document parse_document(const std::string& text);

DiscreteLoss parse_discrete(const std::string& text);
PolyhedralLoss parse_surrogate(const std::string& text);
LinkArtifact parse_artifact(const std::string& text);

}  // namespace polyembed
