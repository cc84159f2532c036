#include "msqkd/error.hpp"

namespace msqkd {
namespace {

std::string join_cells(const std::vector<std::string>& cells) {
  std::string out = "missing statistics cells:";
  for (const auto& c : cells) out += " " + c;
  return out;
}

}  // namespace

MissingCellsError::MissingCellsError(std::vector<std::string> cells)
    : Error(ErrorCode::MissingCells, join_cells(cells)), cells_(std::move(cells)) {}

}  // namespace msqkd
