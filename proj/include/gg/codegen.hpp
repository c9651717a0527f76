#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gg/dataset.hpp"
#include "gg/induction.hpp"

namespace gg {

enum class EmitDialect { PseudoCode, CStyle, PythonStyle };

std::string_view to_string(EmitDialect d) noexcept;
/// "pseudo", "c", "python"
std::optional<EmitDialect> parse_dialect(std::string_view text) noexcept;

struct EmitOptions {
  EmitDialect dialect = EmitDialect::PseudoCode;
  std::string function_name = "dtalgo";
  /// Keep every model feature in the signature, tested or not.
  bool keep_unused_parameters = false;
};

/// Renders the tree as one function made of nested if/else ladders. Branches
/// are emitted most-populous first; a categorical node whose branches cover
/// the whole domain turns its last branch into the final `else`, otherwise the
/// final `else` returns the node's fallback label.
std::string emit(const TrainedModel& model, const EmitOptions& options = {});

/// Parameter list emit() uses: tested features in first-use order, then
/// (optionally) the remaining model features.
std::vector<std::string> emitted_parameters(const TrainedModel& model, bool keep_unused = false);

/// Tree-walk label for a record; the semantic oracle emitted code must match.
std::string interpret(const TrainedModel& model, const Row& record);
std::string interpret(const TrainedModel& model, const Record& record);

/// Parser and evaluator for the PseudoCode dialect, independent of emit().
class PseudoProgram {
 public:
  static PseudoProgram parse(std::string_view source);

  const std::string& function_name() const noexcept { return name_; }
  const std::vector<std::string>& parameters() const noexcept { return params_; }
  std::string evaluate(const Record& arguments) const;
  std::size_t return_count() const noexcept;

  struct Node;

 private:
  std::string name_;
  std::vector<std::string> params_;
  std::shared_ptr<const Node> body_;
};

}  // namespace gg
