#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "projspec/core.hpp"

namespace projspec {

namespace io_detail {

/// Walks a text buffer line by line, skipping blank lines and `#` comments.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  /// Next meaningful line; false at end of input.
  bool next(std::string_view& line) {
    while (pos_ < text_.size()) {
      const auto nl = text_.find('\n', pos_);
      const auto stop = nl == std::string_view::npos ? text_.size() : nl;
      std::string_view raw = text_.substr(pos_, stop - pos_);
      pos_ = stop == text_.size() ? stop : stop + 1;
      ++line_no_;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      const auto first = raw.find_first_not_of(" \t");
      if (first == std::string_view::npos || raw[first] == '#') continue;
      line = raw;
      return true;
    }
    return false;
  }

  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

struct Token {
  std::string_view text;
  int column;  // 1-based
};

inline std::vector<Token> split(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

inline bool parse_real(const char*& p, const char* end, double& value) {
  if (p < end && *p == '+') ++p;
  if (p < end && (*p == 'i' || *p == 'n' || *p == 'I' || *p == 'N')) return false;
  const auto res = std::from_chars(p, end, value, std::chars_format::general);
  if (res.ec != std::errc()) return false;
  p = res.ptr;
  return std::isfinite(value);
}

inline std::size_t parse_count(const Token& tok, int line) {
  std::size_t value = 0;
  const auto* b = tok.text.data();
  const auto* e = b + tok.text.size();
  const auto res = std::from_chars(b, e, value);
  if (res.ec != std::errc() || res.ptr != e) {
    throw ParseError(line, tok.column, "expected a non-negative integer, got '" +
                                           std::string(tok.text) + "'");
  }
  return value;
}

}  // namespace io_detail

/// Parses a complex literal of the form `<re><sign><im>i`.
inline bool parse_complex(std::string_view text, Cplx& out) {
  const char* p = text.data();
  const char* end = p + text.size();
  double re = 0.0, im = 0.0;
  if (!io_detail::parse_real(p, end, re)) return false;
  if (p >= end || (*p != '+' && *p != '-')) return false;
  const bool negative = *p == '-';
  ++p;
  if (p < end && (*p == '+' || *p == '-')) return false;
  if (!io_detail::parse_real(p, end, im)) return false;
  if (p + 1 != end || *p != 'i') return false;
  out = Cplx(re, negative ? -im : im);
  return true;
}

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_complex(Cplx z) {
  std::string s = format_real(z.real());
  s += std::signbit(z.imag()) ? '-' : '+';
  s += format_real(std::abs(z.imag()));
  s += 'i';
  return s;
}

namespace io_detail {

inline CMatrix read_matrix_block(LineReader& reader) {
  std::string_view line;
  if (!reader.next(line)) throw ParseError(reader.line_no() + 1, 1, "missing 'cmatrix' header");
  const auto header = split(line);
  if (header.size() != 3 || header[0].text != "cmatrix") {
    throw ParseError(reader.line_no(), header.empty() ? 1 : header[0].column,
                     "expected 'cmatrix <rows> <cols>'");
  }
  const int header_line = reader.line_no();
  const auto rows = parse_count(header[1], header_line);
  const auto cols = parse_count(header[2], header_line);
  if (rows != cols) {
    throw Error(ErrorCode::DimMismatch, "line " + std::to_string(header_line) +
                                            ": operators must be square, got " +
                                            std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (rows == 0) throw ParseError(header_line, header[1].column, "dimension must be positive");

  const auto n = static_cast<Index>(rows);
  CMatrix m(n, n);
  for (Index r = 0; r < n; ++r) {
    if (!reader.next(line)) {
      throw ParseError(reader.line_no() + 1, 1,
                       "expected " + std::to_string(rows) + " rows, found " + std::to_string(r));
    }
    const auto toks = split(line);
    if (toks.size() != cols) {
      throw Error(ErrorCode::DimMismatch, "line " + std::to_string(reader.line_no()) + ": row has " +
                                              std::to_string(toks.size()) + " entries, expected " +
                                              std::to_string(cols));
    }
    for (Index c = 0; c < n; ++c) {
      const auto& tok = toks[static_cast<std::size_t>(c)];
      Cplx z;
      if (!parse_complex(tok.text, z)) {
        throw ParseError(reader.line_no(), tok.column,
                         "malformed complex literal '" + std::string(tok.text) + "'");
      }
      m(r, c) = z;
    }
  }
  return m;
}

inline void expect_end(LineReader& reader) {
  std::string_view line;
  if (reader.next(line)) throw ParseError(reader.line_no(), 1, "trailing content after matrix data");
}

}  // namespace io_detail

inline CMatrix parse_matrix(std::string_view text) {
  io_detail::LineReader reader(text);
  CMatrix m = io_detail::read_matrix_block(reader);
  io_detail::expect_end(reader);
  return m;
}

inline std::string emit_matrix(const CMatrix& a) {
  std::string out = "cmatrix " + std::to_string(a.rows()) + " " + std::to_string(a.cols()) + "\n";
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) {
      if (c) out += ' ';
      out += format_complex(a(r, c));
    }
    out += '\n';
  }
  return out;
}

inline OperatorTuple parse_tuple(std::string_view text) {
  io_detail::LineReader reader(text);
  std::string_view line;
  if (!reader.next(line)) throw ParseError(1, 1, "missing 'ctuple' header");
  const auto header = io_detail::split(line);
  if (header.size() != 2 || header[0].text != "ctuple") {
    throw ParseError(reader.line_no(), 1, "expected 'ctuple <k>'");
  }
  const auto k = io_detail::parse_count(header[1], reader.line_no());
  if (k == 0) throw ParseError(reader.line_no(), header[1].column, "tuple must be nonempty");
  std::vector<CMatrix> mats;
  mats.reserve(k);
  for (std::size_t i = 0; i < k; ++i) mats.push_back(io_detail::read_matrix_block(reader));
  io_detail::expect_end(reader);
  return OperatorTuple(std::move(mats));
}

inline std::string emit_tuple(const OperatorTuple& t) {
  std::string out = "ctuple " + std::to_string(t.size()) + "\n";
  for (const auto& m : t.mats()) out += emit_matrix(m);
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace projspec
