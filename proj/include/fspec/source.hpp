#pragma once

#include <cstdint>
#include <string>

namespace fspec {

/// A half-open region of a source file. Lines and columns are 1-based;
/// columns count Unicode code points, not bytes.
struct SourceSpan {
  std::string file;
  uint32_t line = 1;
  uint32_t column = 1;
  uint32_t length = 0;

  std::string str() const {
    return file + ":" + std::to_string(line) + ":" + std::to_string(column);
  }
};

}  // namespace fspec
