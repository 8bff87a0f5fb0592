#include "irap/error.hpp"

namespace irap {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

InterestSyntaxError::InterestSyntaxError(std::size_t offset, const std::string& what)
    : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

}  // namespace irap
