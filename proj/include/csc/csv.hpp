#pragma once

#include <string>
#include <vector>

namespace csc::csv {

// RFC-4180: CRLF records, fields quoted when they hold a comma, quote or
// line break, embedded quotes doubled.
std::string escape(const std::string& field);
std::string row(const std::vector<std::string>& fields);

// Shortest round-trip decimal form.
std::string number(double v);
// Fixed notation with `digits` decimals.
std::string fixed(double v, int digits);

class Table {
public:
  explicit Table(std::vector<std::string> header);
  void add(std::vector<std::string> fields);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Parses RFC-4180 text (CRLF or LF records) into rows of fields.
std::vector<std::vector<std::string>> parse(const std::string& text);

}  // namespace csc::csv
