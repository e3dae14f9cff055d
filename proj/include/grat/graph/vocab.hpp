#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace grat::graph {

using LabelId = std::size_t;
using EdgeTypeId = std::size_t;

/// Reserved edge types, always at these indices.
namespace edge {
inline constexpr EdgeTypeId kNoBond = 0;
inline constexpr EdgeTypeId kVirtual = 1;
inline constexpr EdgeTypeId kSelf = 2;
inline constexpr EdgeTypeId kMaskEdge = 3;
/// Decoder prediction class for "no edge"; never stored in a graph.
inline constexpr EdgeTypeId kNoEdge = 4;
inline constexpr std::size_t kReservedCount = 5;
}  // namespace edge

/// Reserved node tokens, always at these indices.
namespace token {
inline constexpr LabelId kGenerate = 0;  // <G>
inline constexpr LabelId kEndOfGraph = 1;
inline constexpr LabelId kCls = 2;
inline constexpr LabelId kMask = 3;
inline constexpr LabelId kPad = 4;
inline constexpr LabelId kReactant = 5;
inline constexpr LabelId kReagent = 6;
inline constexpr LabelId kProduct = 7;
inline constexpr std::size_t kReservedCount = 8;
}  // namespace token

/// Closed, ordered vocabulary of names with a reserved prefix.
class Vocab {
 public:
  std::size_t size() const { return names_.size(); }
  std::size_t reserved_count() const { return reserved_; }
  bool is_reserved(std::size_t id) const { return id < reserved_; }

  const std::string& name(std::size_t id) const;
  std::optional<std::size_t> find(const std::string& name) const;
  /// Like find() but throws ContractError for an unknown name.
  std::size_t id(const std::string& name) const;

  const std::vector<std::string>& names() const { return names_; }
  /// Names after the reserved prefix, in order.
  std::vector<std::string> user_names() const;

  bool operator==(const Vocab& other) const { return names_ == other.names_ && reserved_ == other.reserved_; }

 protected:
  Vocab(std::vector<std::string> reserved, const std::vector<std::string>& user);

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::size_t reserved_ = 0;
};

class EdgeTypeVocab : public Vocab {
 public:
  explicit EdgeTypeVocab(const std::vector<std::string>& real_types = {});

  std::size_t real_count() const { return size() - edge::kReservedCount; }
  bool is_real(EdgeTypeId id) const { return id >= edge::kReservedCount && id < size(); }

  /// Decoder edge classes: 0 = no edge, c >= 1 = real type kReservedCount + c - 1.
  std::size_t class_count() const { return real_count() + 1; }
  static std::size_t class_of(EdgeTypeId id);
  static EdgeTypeId type_of_class(std::size_t cls);
};

class NodeLabelVocab : public Vocab {
 public:
  explicit NodeLabelVocab(const std::vector<std::string>& labels = {});

  static bool is_delimiter(LabelId id) {
    return id == token::kReactant || id == token::kReagent || id == token::kProduct;
  }
};

}  // namespace grat::graph
