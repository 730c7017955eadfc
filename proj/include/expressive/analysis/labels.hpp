#pragma once

// Labels file: UTF-8 CSV with header
//   participant_id,expression_shown,rank,label_text
// Fields may be double-quoted; "" inside quotes is a literal quote.

#include "expressive/analysis/lexicon.hpp"
#include "expressive/error.hpp"
#include "expressive/laban.hpp"

#include <istream>
#include <string>
#include <vector>

namespace expressive::analysis {

struct LabelRecord {
  std::string participant_id;
  laban::Expression expression_shown = laban::Expression::Happy;
  int rank = 1;
  std::string label_text;
};

namespace detail {

/// Splits one CSV record, reading continuation lines when a quoted field spans
/// a newline. Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++line_no;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (quoted) {
        if (!std::getline(in, line)) throw ParseError(line_no, "unterminated quoted field");
        ++line_no;
        cur.push_back('\n');
        i = static_cast<std::size_t>(-1);
        continue;
      }
      break;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r' || i + 1 != line.size()) {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return true;
}

}  // namespace detail

/// Throws ParseError with the line number for a bad header, wrong field count,
/// unknown expression or a rank outside 1..3.
inline std::vector<LabelRecord> load_labels(std::istream& in) {
  std::vector<LabelRecord> records;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  if (!detail::read_csv_record(in, fields, line_no)) return records;
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
  const std::vector<std::string> header{"participant_id", "expression_shown", "rank", "label_text"};
  std::vector<std::string> got;
  for (const auto& f : fields) got.push_back(detail::lower(detail::trim(f)));
  if (got != header) throw ParseError(line_no, "expected header participant_id,expression_shown,rank,label_text");

  while (detail::read_csv_record(in, fields, line_no)) {
    if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
    if (fields.size() != 4) throw ParseError(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
    LabelRecord r;
    r.participant_id = std::string(detail::trim(fields[0]));
    const auto expr = laban::try_parse_expression(detail::trim(fields[1]));
    if (!expr) throw ParseError(line_no, "unknown expression '" + fields[1] + "'");
    r.expression_shown = *expr;
    const auto rank = detail::parse_double(fields[2]);
    if (!rank || (*rank != 1.0 && *rank != 2.0 && *rank != 3.0))
      throw ParseError(line_no, "rank must be 1, 2 or 3");
    r.rank = static_cast<int>(*rank);
    r.label_text = fields[3];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace expressive::analysis
